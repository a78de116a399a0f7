//! Solving for the first-order periodic transformation `T1(t)` and checking
//! that the resulting Hamiltonian is Hermitian up to a second-order defect.
//!
//! The defect is measured on the Hamiltonian built from its defining
//! relation with the exact inverse of `T0 + eps T1`, so the truncated
//! Neumann series is the only error source and the defect must scale
//! like `eps^2`.
//!
//! Run with `cargo run --release -p reslab --example modulated_hamiltonian`.

use nalgebra::Vector3;
use num_complex::Complex64;
use reslab::capacitance::{cap_b, dilute_capacitance};
use reslab::geometry::MaterialConstants;
use reslab::hamiltonian::{definition_defect, modulated_hamiltonian};
use reslab::linalg::log_log_slope;
use reslab::modulation::{FourierSeries, HillCoefficient, ModulationProfile};

fn main() -> reslab::Result<()> {
    let omega = 1.0;
    let constants = MaterialConstants::new(0.05, 1.0, 1.0)?;
    let volume = 4.0 / 3.0 * std::f64::consts::PI;

    let centers = [
        Vector3::zeros(),
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(2.1, 0.4, 0.0),
    ];
    let capacitance = dilute_capacitance(&centers, 0.1, cap_b(1.0))?;
    let kappa_inv = vec![
        FourierSeries::from_positive_coeffs(&[(1, Complex64::new(0.5, 0.0))], omega)?,
        FourierSeries::from_positive_coeffs(&[(1, Complex64::new(0.0, -0.4))], omega)?,
        FourierSeries::from_positive_coeffs(&[(2, Complex64::new(0.3, 0.1))], omega)?,
    ];
    let rho_inv = vec![FourierSeries::constant(1.0, omega); 3];

    println!("three modulated resonators, transform solved over one period");
    println!();
    println!("epsilon    sup |H - H^dagger|   sup |diag H|   max |T1|");
    let epsilons = [1e-2, 5e-3, 2.5e-3];
    let mut defects = Vec::new();
    for &eps in &epsilons {
        let profile = ModulationProfile::new(rho_inv.clone(), kappa_inv.clone(), eps)?;
        let coeff = HillCoefficient::new(
            capacitance.clone(),
            profile,
            constants,
            vec![volume; 3],
        )?;
        let (traj, _) = modulated_hamiltonian(&coeff, 512, 1e-11)?;
        let report = definition_defect(&traj, eps)?;
        println!(
            "{eps:<9}  {:<19.6e}  {:<13.6e}  {:.6e}",
            report.sup_hermitian,
            report.sup_diagonal,
            traj.max_norm()
        );
        defects.push(report.sup_hermitian);
    }

    let slope = log_log_slope(&epsilons, &defects)?;
    println!();
    println!("fitted defect slope in epsilon: {slope:.3} (expected ~2)");
    Ok(())
}
