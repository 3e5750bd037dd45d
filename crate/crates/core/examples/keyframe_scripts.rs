// Built-in keyframe sequences (stair placement, low crawl, jump, backflip)
// and a custom script written inline.

use std::error::Error;

use miniq::gait::KeyframeScript;
use miniq::legkin::{inverse_kinematics, Branch, FootPoint, LegGeometry};
use miniq::sim::MotorModel;

const CUSTOM: &str = r#"[
  {"time_s": 0.2, "legs": {
    "fl": {"cartesian": {"x": 0.0, "y": -0.035}},
    "fr": {"cartesian": {"x": 0.0, "y": -0.035}},
    "rl": {"cartesian": {"x": 0.0, "y": -0.035}},
    "rr": {"cartesian": {"x": 0.0, "y": -0.035}}}},
  {"time_s": 0.6, "interpolation": "hold", "legs": {
    "fl": {"joint": {"q1": -1.2, "q2": 0.9}},
    "fr": {"joint": {"q1": -1.2, "q2": 0.9}},
    "rl": {"cartesian": {"x": -0.01, "y": -0.03}},
    "rr": {"cartesian": {"x": -0.01, "y": -0.03}}}}
]"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let geom = LegGeometry::default();
    let omega = MotorModel::default().no_load_speed;
    let stand = inverse_kinematics(&geom, FootPoint::new(0.0, -0.035), Branch::ElbowPlus)?;
    let initial = [stand.actuators; 4];

    for name in KeyframeScript::builtin_names() {
        let script = KeyframeScript::builtin(name).ok_or("missing builtin")?;
        let traj = script.render(&geom, 0.005, omega, &initial)?;
        println!(
            "{name:<18} {} keyframes, {:.2} s, peak rate {:.1} rad/s",
            script.keyframes.len(),
            traj.duration(),
            traj.max_step() / traj.dt
        );
    }

    let custom = KeyframeScript::from_json(CUSTOM)?;
    let traj = custom.render(&geom, 0.005, omega, &initial)?;
    println!("custom script: {} samples", traj.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
