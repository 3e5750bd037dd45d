//! Every example doubles as a smoke test.

mod leg_kinematics {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/leg_kinematics.rs"
    ));
}

mod workspace_compare {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/workspace_compare.rs"
    ));
}

mod manipulability_map {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/manipulability_map.rs"
    ));
}

mod gait_synthesis {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/gait_synthesis.rs"
    ));
}

mod flip_recovery {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/flip_recovery.rs"
    ));
}

mod rotary_locomotion {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/rotary_locomotion.rs"
    ));
}

mod simulate_trot {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/simulate_trot.rs"
    ));
}

mod telemetry_metrics {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/telemetry_metrics.rs"
    ));
}

mod keyframe_scripts {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/keyframe_scripts.rs"
    ));
}

#[test]
fn leg_kinematics_example_runs() {
    leg_kinematics::run_example().expect("leg_kinematics example should run");
}

#[test]
fn workspace_compare_example_runs() {
    workspace_compare::run_example().expect("workspace_compare example should run");
}

#[test]
fn manipulability_map_example_runs() {
    manipulability_map::run_example().expect("manipulability_map example should run");
}

#[test]
fn gait_synthesis_example_runs() {
    gait_synthesis::run_example().expect("gait_synthesis example should run");
}

#[test]
fn flip_recovery_example_runs() {
    flip_recovery::run_example().expect("flip_recovery example should run");
}

#[test]
fn rotary_locomotion_example_runs() {
    rotary_locomotion::run_example().expect("rotary_locomotion example should run");
}

#[test]
fn simulate_trot_example_runs() {
    simulate_trot::run_example().expect("simulate_trot example should run");
}

#[test]
fn telemetry_metrics_example_runs() {
    telemetry_metrics::run_example().expect("telemetry_metrics example should run");
}

#[test]
fn keyframe_scripts_example_runs() {
    keyframe_scripts::run_example().expect("keyframe_scripts example should run");
}
