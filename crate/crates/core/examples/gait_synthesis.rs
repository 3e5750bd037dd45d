// Preset gaits turned into actuator streams, plus a hip-centred circle that
// shows the actuators winding past ±π without a reset.

use std::error::Error;
use std::f64::consts::TAU;

use miniq::gait::{gait_to_actuator, make_gait, GaitParams, GaitSpec, LegId, StreamOptions};
use miniq::legkin::{Branch, LegGeometry};
use miniq::sim::MotorModel;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let geom = LegGeometry::default();
    let opts = StreamOptions::new(MotorModel::default().no_load_speed);

    for params in GaitParams::presets() {
        let spec = make_gait(&params, &geom)?;
        let traj = gait_to_actuator(&spec, &geom, 0.002, 1, &opts)?;
        println!(
            "{:<10} {:>4} samples, peak actuator rate {:5.1} rad/s",
            params.name,
            traj.len(),
            traj.max_step() / traj.dt
        );
    }

    let circle = GaitSpec::hip_circle(0.04, 1.0, Branch::ElbowPlus);
    let traj = gait_to_actuator(&circle, &geom, 0.005, 3, &opts)?;
    let t1 = traj.channel(LegId::FrontLeft, 0);
    let turns = (t1.last().unwrap() - t1[0]) / TAU;
    println!("hip circle: θ1 advanced {turns:.3} turns over 3 cycles");
    assert!((turns - 3.0).abs() < 1e-9);

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    println!("{}", String::from_utf8(csv)?.lines().next().unwrap_or(""));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
