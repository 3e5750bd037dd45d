// Manipulability over foot position and over the commanded angles.
//
// The Cartesian map peaks on the ring `r = √(l1² + l2²)`. Over joint angles
// the index depends on the knee alone; over actuator angles the same values
// are sheared along the diagonal, with the same peak.

use std::error::Error;

use miniq::legkin::{Branch, LegGeometry};
use miniq::workspace::{configuration_manipulability, manipulability_map, AngleSpace, GridSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let geom = LegGeometry::default();
    let spec = GridSpec::centered(1.05 * geom.reach(), 201)?;
    let field = manipulability_map(&geom, &spec, Branch::ElbowPlus);
    let (i, j, w) = field.argmax().ok_or("empty map")?;
    let c = spec.center(i, j);
    let ring = geom.l1.hypot(geom.l2);
    println!(
        "Cartesian peak {w:.3e} at r = {:.4} m (ring at {ring:.4} m)",
        c.norm()
    );

    for space in [AngleSpace::Joint, AngleSpace::Actuator] {
        let map = configuration_manipulability(&geom, space, 181)?;
        let (_, _, peak) = map.argmax().ok_or("empty map")?;
        println!("{space:?}-space peak {peak:.4e} m²");
    }

    let mut csv = Vec::new();
    field.write_csv(&mut csv)?;
    println!(
        "CSV export: {} rows",
        csv.iter().filter(|&&b| b == b'\n').count() - 1
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
