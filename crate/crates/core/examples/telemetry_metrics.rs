// Stability and cost of transport from a logged run.

use std::error::Error;
use std::f64::consts::TAU;

use miniq::metrics::{
    average_current, cost_of_transport, load_telemetry, normalized_speed, stability, EnergyInput,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // A synthetic 10 s log at an uneven ~17 Hz: pitch rocking ±2°, current around 1.47 A.
    let mut csv = String::from("# synthetic run\nt_s,roll_deg,pitch_deg,yaw_deg,current_a\n");
    let mut t = 0.0;
    let mut k = 0;
    while t < 10.0 {
        let pitch = 2.0 * (TAU * 2.5 * t).sin();
        let current = 1.473 + 0.2 * (TAU * 5.0 * t).sin();
        csv.push_str(&format!(
            "{t:.4},{:.4},{pitch:.4},0.0,{current:.4}\n",
            0.5 * pitch
        ));
        t += [0.055, 0.062][k % 2];
        k += 1;
    }

    let log = load_telemetry(csv.as_bytes())?;
    let s = stability(&log);
    let i = average_current(&log);
    println!("{} samples over {:.2} s", log.len(), log.duration());
    println!("pitch std {:.3}°, roll std {:.3}°", s.pitch_std, s.roll_std);

    let v = 0.46;
    let cot = cost_of_transport(&EnergyInput {
        voltage: 6.0,
        avg_current: i,
        mass: 0.240,
        gravity: 9.81,
        v_ss: v,
    })?;
    println!(
        "avg current {i:.3} A -> COT {cot:.2} at {v} m/s ({:.2} BL/s)",
        normalized_speed(v, 0.088)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
