// Continuous-rotation mode: straighten the legs, then spin both actuators of
// each leg at the same rate so the leg rolls like a spoke.

use std::error::Error;

use miniq::gait::{rotary_command, rotary_entry, LegId};
use miniq::legkin::{inverse_kinematics, Branch, FootPoint};
use miniq::sim::{simulate_rotary, MotorModel, RobotConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = RobotConfig::default();
    let motor = MotorModel::default();

    let stand = inverse_kinematics(&cfg.geom, FootPoint::new(0.0, -0.035), Branch::ElbowPlus)?;
    let cmd = rotary_command(5.0, &cfg.geom);
    let entry = rotary_entry(&[stand.actuators; 4], &cmd, 0.002, motor.no_load_speed)?;
    println!(
        "straighten legs in {:.3} s; knee rate while rolling {}",
        entry.duration(),
        cmd.knee_rate(LegId::FrontLeft)
    );

    for omega in [2.0, 5.0, 10.0, 20.0] {
        let r = simulate_rotary(&rotary_command(omega, &cfg.geom), &cfg, &motor)?;
        println!(
            "ω = {omega:>4} rad/s: v = {:.3} m/s ({:.2} BL/s), {:.2} A, COT {:.1}",
            r.v_ss, r.normalized_v, r.avg_current, r.cot
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
