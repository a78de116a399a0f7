//! Tight-binding approximant vs the full static Hamiltonian: the sorted
//! spectra agree to first order in the diluteness, with an `O(eta^2)`
//! mismatch once the single-sphere capacitance is taken from the same
//! boundary-element discretisation.
//!
//! Run with `cargo run --release -p reslab --example tight_binding_spectrum`.

use nalgebra::{DMatrix, Vector3};
use reslab::capacitance::{cap_b_bem, capacitance_matrix};
use reslab::geometry::{MaterialConstants, ResonatorSystem};
use reslab::linalg::log_log_slope;
use reslab::tightbinding::{build_model, compare_spectra};

fn main() -> reslab::Result<()> {
    let refinement = 2;
    let constants = MaterialConstants::new(0.05, 1.0, 1.0)?;
    let centers = [Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)];
    let volume_b = 4.0 / 3.0 * std::f64::consts::PI;
    let capb = cap_b_bem(1.0, refinement)?;

    println!("two resonators, matched capB = {capb:.8}");
    println!();
    let etas = [0.2, 0.1, 0.05];
    let mut mismatches = Vec::new();
    for &eta in &etas {
        let system = ResonatorSystem::dilute(1.0, &centers, eta, constants)?;
        let capacitance = capacitance_matrix(&system, refinement)?;
        let n = system.len();
        let volumes = system.volumes();
        let m0 = DMatrix::from_fn(n, n, |i, j| {
            constants.delta * constants.kappa_r * capacitance.entries[(i, j)]
                / (constants.rho_r * volumes[i])
        });
        let model = build_model(&constants, volume_b, capb, &centers, eta)?;
        let report = compare_spectra(&model, &m0)?;
        println!("eta = {eta}");
        println!("  tight-binding: {}", join(&report.tb_values));
        println!("  full solver:   {}", join(&report.full_values));
        println!("  max mismatch:  {:.6e}", report.max_mismatch);
        mismatches.push(report.max_mismatch);
    }

    let slope = log_log_slope(&etas, &mismatches)?;
    println!();
    println!("fitted mismatch slope in eta: {slope:.3} (expected ~2)");
    Ok(())
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:>12.8}"))
        .collect::<Vec<_>>()
        .join(" ")
}
