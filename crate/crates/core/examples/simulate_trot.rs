// Quasi-static prediction of speed, current and cost of transport for the
// preset gaits, and a frequency sweep of the slow trot.

use std::error::Error;

use miniq::gait::{make_gait, GaitParams};
use miniq::sim::{simulate_gait, sweep, write_sweep_csv, MotorModel, RobotConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = RobotConfig::default();
    let motor = MotorModel::default();

    for params in GaitParams::presets() {
        let spec = make_gait(&params, &cfg.geom)?;
        let r = simulate_gait(&spec, &cfg, &motor)?;
        println!(
            "{:<10} v = {:.3} m/s  i = {:.3} A  COT = {:5.1}  peak τ = {:.4} N·m",
            params.name,
            r.v_ss,
            r.avg_current,
            r.cot,
            r.peak_torque()
        );
    }

    let set: Vec<_> = [1.0, 2.0, 4.0, 6.0]
        .into_iter()
        .map(|f| GaitParams {
            frequency: f,
            ..GaitParams::slow_trot()
        })
        .collect();
    let rows = sweep(&set, &cfg, &motor)?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
