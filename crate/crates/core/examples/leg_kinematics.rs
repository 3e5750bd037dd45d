// Forward and inverse kinematics of one coupled leg, both elbow branches,
// Jacobians and the static torques that hold the body up.

use std::error::Error;

use miniq::legkin::{
    forward_kinematics, inverse_kinematics, jacobians, joint_to_actuator, manipulability,
    static_torques, Branch, FootPoint, LegGeometry, WrenchForce,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let geom = LegGeometry::default();
    let target = FootPoint::new(0.01, -0.035);

    for branch in [Branch::ElbowPlus, Branch::ElbowMinus] {
        let sol = inverse_kinematics(&geom, target, branch)?;
        let back = forward_kinematics(&geom, sol.joints);
        println!(
            "{branch:?}: q = ({:.4}, {:.4})  θ = ({:.4}, {:.4})  error {:.1e} m",
            sol.joints.q1,
            sol.joints.q2,
            sol.actuators.theta1,
            sol.actuators.theta2,
            back.distance(target)
        );
        assert!(back.distance(target) < 1e-12);
        assert_eq!(joint_to_actuator(sol.joints), sol.actuators);

        let j = jacobians(&geom, sol.joints);
        println!("  J_θ = {:.4?}", j.j_theta);
        println!("  w   = {:.3e} m²", manipulability(&geom, sol.joints));

        // Half of a 240 g robot on this foot.
        let tau = static_torques(&geom, sol.joints, WrenchForce::new(0.0, -0.12 * 9.81));
        println!("  τ   = [{:.4}, {:.4}] N·m", tau[0], tau[1]);
    }

    let far = inverse_kinematics(&geom, FootPoint::new(0.07, 0.0), Branch::ElbowPlus);
    println!("outside the annulus: {}", far.unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
