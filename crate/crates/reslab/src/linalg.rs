//! Dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative symmetry tolerance accepted by [`sqrt_spd`].
pub const SPD_SYMMETRY_TOL: f64 = 1e-10;

/// Checks that `m` is square and symmetric within `tol * max|m|`.
pub fn check_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Numerical(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    for j in 0..m.ncols() {
        for i in 0..j {
            let gap = (m[(i, j)] - m[(j, i)]).abs();
            if gap > tol * scale {
                return Err(Error::Numerical(format!(
                    "matrix not symmetric: |m[{i},{j}] - m[{j},{i}]| = {gap:.3e} exceeds {:.3e}",
                    tol * scale
                )));
            }
        }
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted
/// ascending and eigenvector columns permuted to match.
///
/// Columns are sign-normalised (largest-magnitude component positive) so
/// repeated runs on identical input produce identical output.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_symmetric(m, SPD_SYMMETRY_TOL)?;
    let n = m.nrows();
    // Work on the exactly symmetrised matrix so roundoff asymmetry cannot leak in.
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut values = DVector::zeros(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        let col = eig.eigenvectors.column(src);
        let pivot = col.iter().cloned().fold(0.0f64, |acc, v| {
            if v.abs() > acc.abs() {
                v
            } else {
                acc
            }
        });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    Ok((values, vectors))
}

/// Unique symmetric positive definite square root of a symmetric positive
/// definite matrix, via its eigendecomposition.
pub fn sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, q) = sym_eigen_sorted(m)?;
    if let Some(bad) = values.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Numerical(format!(
            "matrix not positive definite: eigenvalue {bad:.6e} <= 0"
        )));
    }
    let sqrt_d = DMatrix::from_diagonal(&values.map(f64::sqrt));
    Ok(&q * sqrt_d * q.transpose())
}

/// Eigenvalues of a real square matrix, sorted ascending by real part with
/// ties broken by imaginary part.
pub fn eigenvalues_real_matrix(m: &DMatrix<f64>) -> Vec<Complex64> {
    let mut values: Vec<Complex64> = m.complex_eigenvalues().iter().cloned().collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    values
}

/// 1-norm condition number of a complex matrix, `inf` when singular.
pub fn cond_1_complex(m: &DMatrix<Complex64>) -> f64 {
    let norm = one_norm_complex(m);
    match m.clone().try_inverse() {
        Some(inv) => norm * one_norm_complex(&inv),
        None => f64::INFINITY,
    }
}

fn one_norm_complex(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Frobenius norm of the anti-Hermitian part `m - m†`.
pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).norm()
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
///
/// The standard check for an `O(x^p)` remainder: sample `y` on a geometric
/// ladder of `x` and require the fitted slope to be near `p`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Numerical(
            "log-log fit needs at least two matching samples".into(),
        ));
    }
    if x.iter().chain(y.iter()).any(|&v| v <= 0.0) {
        return Err(Error::Numerical(
            "log-log fit requires strictly positive samples".into(),
        ));
    }
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("log-log fit abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Maps a real matrix into the complex field.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}
