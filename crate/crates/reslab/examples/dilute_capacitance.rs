//! Dilute asymptotics of the capacitance matrix: for spheres of fixed size
//! placed at `z_j / eta`, the boundary-element matrix approaches the
//! closed-form dilute matrix with an `O(eta^2)` remainder.
//!
//! The dilute reference uses the boundary-element value of the single-sphere
//! capacitance at the same refinement, so the discretisation bias cancels
//! and the quadratic remainder is visible.
//!
//! Run with `cargo run --release -p reslab --example dilute_capacitance`.

use nalgebra::Vector3;
use reslab::capacitance::{cap_b_bem, capacitance_matrix, dilute_capacitance};
use reslab::geometry::{MaterialConstants, ResonatorSystem};
use reslab::linalg::log_log_slope;

fn main() -> reslab::Result<()> {
    let refinement = 2;
    let constants = MaterialConstants::new(1e-3, 1.0, 1.0)?;
    let z = [Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)];
    let capb = cap_b_bem(1.0, refinement)?;
    println!("two unit spheres at centers z/eta, |z1 - z2| = 1, refinement {refinement}");
    println!("matched single-sphere capacitance: {capb:.8}");
    println!();
    println!("eta    separation  C12 (BEM)     C12 (dilute)  max entry diff");

    let etas = [0.2, 0.1, 0.05];
    let mut diffs = Vec::new();
    for &eta in &etas {
        let system = ResonatorSystem::dilute(1.0, &z, eta, constants)?;
        let bem = capacitance_matrix(&system, refinement)?;
        let approx = dilute_capacitance(&z, eta, capb)?;
        let diff = (&bem.entries - &approx.entries).amax();
        println!(
            "{eta:<5}  {:<10}  {:<12.7}  {:<12.7}  {diff:.6e}",
            1.0 / eta,
            bem.entries[(0, 1)],
            approx.entries[(0, 1)]
        );
        diffs.push(diff);
    }

    let slope = log_log_slope(&etas, &diffs)?;
    println!();
    println!("fitted log-log slope of the remainder: {slope:.3} (expected ~2)");
    Ok(())
}
