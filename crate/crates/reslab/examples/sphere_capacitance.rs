//! Boundary-element capacitance of a single sphere, converging to the
//! analytic value `4 pi R` under icosphere refinement.
//!
//! Run with `cargo run --release -p reslab --example sphere_capacitance`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use reslab::capacitance::{assemble_single_layer, cap_b, capacitance_matrix, solve_density};
use reslab::geometry::{mesh_sphere, MaterialConstants, ResonatorSystem, Sphere};

fn main() -> reslab::Result<()> {
    let sphere = Sphere::new(Vector3::zeros(), 1.0)?;
    let system = ResonatorSystem::new(vec![sphere], MaterialConstants::new(1e-3, 1.0, 1.0)?)?;

    println!("unit sphere, analytic capacitance 4 pi = {:.9}", cap_b(1.0));
    println!("refinement  panels  area       capacitance   rel. error");
    for refinement in 0..=3 {
        let mesh = mesh_sphere(&system.spheres[0], refinement);
        let area = mesh.resonator_area(0);
        let c = capacitance_matrix(&system, refinement)?;
        let value = c.entries[(0, 0)];
        println!(
            "{refinement:>10}  {:>6}  {area:<9.5}  {value:<12.7}  {:+.3e}",
            mesh.panel_count(),
            value / cap_b(1.0) - 1.0
        );
    }

    // The solved boundary density approaches the uniform value -1/R.
    let mesh = mesh_sphere(&system.spheres[0], 2);
    let op = assemble_single_layer(&mesh)?;
    let density = solve_density(&op, &mesh, 0)?;
    let max_dev = density
        .panel_values
        .iter()
        .map(|v| (v + 1.0).abs())
        .fold(0.0f64, f64::max);
    println!();
    println!(
        "refinement 2 density: max deviation from -1/R is {max_dev:.2e} (solve residual {:.2e})",
        density.residual
    );
    println!("area defect vs 4 pi at refinement 2: {:+.3e}", mesh.resonator_area(0) - 4.0 * PI);
    Ok(())
}
