// Recovering from an inversion by mirroring every leg instead of rolling
// the body over.

use std::error::Error;

use miniq::gait::{flip_recovery, FLIP_DEADLINE};
use miniq::legkin::{
    actuator_to_joint, forward_kinematics, inverse_kinematics, Branch, FootPoint, LegGeometry,
};
use miniq::sim::MotorModel;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let geom = LegGeometry::default();
    let omega = MotorModel::default().no_load_speed;

    // A crouched pose, feet slightly forward.
    let stand = inverse_kinematics(&geom, FootPoint::new(0.008, -0.03), Branch::ElbowPlus)?;
    let start = [stand.actuators; 4];

    let traj = flip_recovery(&start, 0.002, omega)?;
    println!(
        "flip takes {:.3} s (limit {FLIP_DEADLINE} s), {} samples",
        traj.duration(),
        traj.len()
    );

    let end = *traj.samples.last().ok_or("empty flip")?;
    let before = forward_kinematics(&geom, actuator_to_joint(start[0]));
    let after = forward_kinematics(&geom, actuator_to_joint(end[0]));
    println!(
        "foot ({:.4}, {:.4}) -> ({:.4}, {:.4})",
        before.x, before.y, after.x, after.y
    );

    let back = flip_recovery(&end, 0.002, omega)?;
    let home = forward_kinematics(
        &geom,
        actuator_to_joint(*back.samples.last().unwrap_or(&end).first().unwrap()),
    );
    println!(
        "flipping twice returns within {:.1e} m",
        home.distance(before)
    );
    assert!(home.distance(before) < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
