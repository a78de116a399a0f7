//! Floquet quasifrequencies of a modulated two-resonator system.
//!
//! At zero modulation the folded Floquet exponents coincide with the signed
//! square roots of the generalised capacitance spectrum; switching the
//! modulation on moves them continuously and opens (generically complex)
//! branches while the monodromy determinant stays at one.
//!
//! Run with `cargo run --release -p reslab --example floquet_spectrum`.

use nalgebra::Vector3;
use num_complex::Complex64;
use reslab::capacitance::capacitance_matrix;
use reslab::floquet::{monodromy, quasifrequencies, static_spectrum};
use reslab::geometry::{MaterialConstants, ResonatorSystem, Sphere};
use reslab::modulation::{FourierSeries, HillCoefficient, ModulationProfile};

fn main() -> reslab::Result<()> {
    let omega = 1.0;
    let tol = 1e-10;
    let constants = MaterialConstants::new(0.05, 1.0, 1.0)?;
    let system = ResonatorSystem::new(
        vec![
            Sphere::new(Vector3::zeros(), 1.0)?,
            Sphere::new(Vector3::new(4.0, 0.0, 0.0), 1.0)?,
        ],
        constants,
    )?;
    let capacitance = capacitance_matrix(&system, 2)?;

    // Cosine modulation of both bulk moduli, one resonator phase-shifted.
    let kappa_inv = vec![
        FourierSeries::from_positive_coeffs(&[(1, Complex64::new(0.5, 0.0))], omega)?,
        FourierSeries::from_positive_coeffs(&[(1, Complex64::new(0.0, -0.5))], omega)?,
    ];
    let rho_inv = vec![FourierSeries::constant(1.0, omega); 2];

    println!("epsilon  quasifrequencies (re, im) in [0, Omega)          |det Phi|");
    for &eps in &[0.0, 0.01, 0.05] {
        let profile = ModulationProfile::new(rho_inv.clone(), kappa_inv.clone(), eps)?;
        let coeff = HillCoefficient::from_system(&system, capacitance.clone(), profile)?;
        let mono = monodromy(&coeff, tol)?;
        let det = mono.matrix.clone().lu().determinant().norm();
        let qf = quasifrequencies(&mono, omega)?;
        let entries: Vec<String> = qf
            .values
            .iter()
            .map(|w| format!("({:.6}, {:+.2e})", w.re, w.im))
            .collect();
        println!("{eps:<7}  {}  {det:.9}", entries.join(" "));
    }

    let m0 = {
        let profile = ModulationProfile::static_profile(2, omega)?;
        HillCoefficient::from_system(&system, capacitance, profile)?.m_static()
    };
    let folded: Vec<String> = static_spectrum(&m0)?
        .iter()
        .map(|w| format!("{:.6}", w.rem_euclid(omega)))
        .collect();
    println!();
    println!("static +-sqrt(eig M0) folded into [0, Omega): {}", folded.join(" "));
    Ok(())
}
