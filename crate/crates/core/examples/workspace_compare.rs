// Reachable area of the serial leg against a five-bar baseline with the same
// total link length, on one shared grid.

use std::error::Error;
use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;

use miniq::legkin::LegGeometry;
use miniq::workspace::{
    compare_workspaces, fivebar_workspace, serial_workspace, FiveBarGeometry, GridSpec,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let geom = LegGeometry::default();
    let fb = FiveBarGeometry::default();
    let spec = GridSpec::centered(0.065, 301)?;

    let serial = serial_workspace(&geom, &spec);
    let five = fivebar_workspace(&fb, &spec, 361)?;
    let report = compare_workspaces(&serial, &five)?;

    let analytic = PI * geom.reach().powi(2);
    println!(
        "serial area   {:.4e} m² (analytic {:.4e})",
        serial.area(),
        analytic
    );
    println!("five-bar area {:.4e} m²", five.area());
    println!(
        "ratio {:.3}, contained: {}",
        report.ratio.unwrap_or(0.0),
        report.b_contained_in_a
    );
    assert!(report.b_contained_in_a);

    let path = std::env::temp_dir().join("miniq_fivebar.pgm");
    five.to_field()
        .write_pgm(BufWriter::new(File::create(&path)?))?;
    println!("five-bar raster written to {}", path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
