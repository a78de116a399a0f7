//! Static Hamiltonian form of a resonator system: the block anti-diagonal
//! `H0 = [[0, sqrt(M0)], [sqrt(M0), 0]]` whose eigenvalues are the signed
//! square roots of the generalised capacitance spectrum, and whose
//! off-diagonal block product recovers `M0`.
//!
//! Run with `cargo run --release -p reslab --example static_hamiltonian`.

use nalgebra::{DMatrix, Vector3};
use reslab::capacitance::capacitance_matrix;
use reslab::floquet::static_spectrum;
use reslab::geometry::{MaterialConstants, ResonatorSystem, Sphere};
use reslab::hamiltonian::static_hamiltonian;
use reslab::linalg::sym_eigen_sorted;

fn main() -> reslab::Result<()> {
    let constants = MaterialConstants::new(0.05, 1.0, 1.0)?;
    let system = ResonatorSystem::new(
        vec![
            Sphere::new(Vector3::zeros(), 1.0)?,
            Sphere::new(Vector3::new(5.0, 0.0, 0.0), 1.0)?,
        ],
        constants,
    )?;
    let capacitance = capacitance_matrix(&system, 2)?;
    let volumes = system.volumes();
    let n = system.len();
    let m0 = DMatrix::from_fn(n, n, |i, j| {
        constants.delta * constants.kappa_r * capacitance.entries[(i, j)]
            / (constants.rho_r * volumes[i])
    });

    let stat = static_hamiltonian(&m0)?;
    println!("generalised capacitance matrix M0:");
    print_matrix(&m0);
    println!("static Hamiltonian H0 (block anti-diagonal):");
    print_matrix(&stat.h0);

    let (h_eigs, _) = sym_eigen_sorted(&stat.h0)?;
    let expected = static_spectrum(&m0)?;
    println!("eig(H0) vs signed square roots of eig(M0):");
    let mut max_gap: f64 = 0.0;
    for (got, want) in h_eigs.iter().zip(&expected) {
        println!("  {got:>12.9}  vs  {want:>12.9}");
        max_gap = max_gap.max((got - want).abs());
    }
    println!("max eigenvalue gap: {max_gap:.3e}");

    let product = &stat.sqrt_m0 * &stat.sqrt_m0;
    println!(
        "block product reproduces M0 within {:.3e}",
        (&product - &m0).amax()
    );
    Ok(())
}

fn print_matrix(m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:>12.8}", m[(i, j)])).collect();
        println!("  [{}]", row.join(", "));
    }
}
