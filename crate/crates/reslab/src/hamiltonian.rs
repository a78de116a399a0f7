//! Hermitian Hamiltonian form `i Phi' = H(t) Phi` of the Hill system.
//!
//! The static part has the closed form `H0 = [[0, sqrt(M0)], [sqrt(M0), 0]]`
//! with transformation `T0 = blockdiag(sqrt(M0), i Id)`. The modulated
//! correction `T1(t)` solves a linear time-varying system obtained by
//! imposing Hermitianity on the first-order block expansion of the
//! transformed coefficient matrix, under the upper-triangular ansatz: `T1`
//! upper triangular with real diagonal entries in the first half and purely
//! imaginary ones in the second. With the strictly lower block `T3 = 0` and
//! the undetermined diagonal parts excluded, each Hermitianity equation
//! isolates exactly one derivative, so the system is already in normal form
//! and integrates with the shared embedded Runge-Kutta scheme.
//!
//! All solve-state computations happen in the eigenbasis of `M0` (where it
//! is diagonal); results conjugate back by the orthogonal basis, which
//! preserves Hermitianity and spectra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{complexify, cond_1_complex, sqrt_spd, sym_eigen_sorted};
use crate::modulation::HillCoefficient;
use crate::ode;

/// Default number of uniform samples per period.
pub const DEFAULT_SAMPLES: usize = 2048;
/// Condition ceiling for inverting `T(t)` pointwise.
pub const MAX_T_CONDITION: f64 = 1e10;

/// Static Hamiltonian data: the SPD square root, the block anti-diagonal
/// Hamiltonian and the static transformation.
#[derive(Debug, Clone)]
pub struct StaticHamiltonian {
    pub sqrt_m0: DMatrix<f64>,
    pub h0: DMatrix<f64>,
    pub t0: DMatrix<Complex64>,
}

/// Builds the static Hamiltonian from a symmetric positive definite
/// coefficient and verifies that the off-diagonal block product recovers it.
pub fn static_hamiltonian(m0: &DMatrix<f64>) -> Result<StaticHamiltonian> {
    let n = m0.nrows();
    let sqrt_m0 = sqrt_spd(m0)?;

    let mut h0 = DMatrix::zeros(2 * n, 2 * n);
    let mut t0 = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            h0[(i, n + j)] = sqrt_m0[(i, j)];
            h0[(n + i, j)] = sqrt_m0[(i, j)];
            t0[(i, j)] = Complex64::new(sqrt_m0[(i, j)], 0.0);
        }
        t0[(n + i, n + i)] = Complex64::new(0.0, 1.0);
    }

    // The off-diagonal block product must reproduce the coefficient matrix.
    let product = &sqrt_m0 * &sqrt_m0;
    let scale = m0.amax().max(f64::MIN_POSITIVE);
    if (&product - m0).amax() > 1e-10 * scale {
        return Err(Error::Numerical(
            "square-root block product fails to reproduce the coefficient".into(),
        ));
    }
    Ok(StaticHamiltonian { sqrt_m0, h0, t0 })
}

/// Index layout of the determined transform unknowns: real and imaginary
/// parts of the upper-triangular blocks of `T1`, flattened into one vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    n: usize,
}

impl Layout {
    fn size(&self) -> usize {
        4 * self.n * self.n
    }

    // Upper triangle including the diagonal, row-major.
    fn tri_with_diag(&self, j: usize, k: usize) -> usize {
        debug_assert!(j <= k && k < self.n);
        j * self.n - j * (j + 1) / 2 + j + (k - j)
    }

    // Strict upper triangle, row-major.
    fn tri_strict(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < k && k < self.n);
        j * (self.n - 1) - j * (j + 1) / 2 + j + (k - j - 1)
    }

    fn a1(&self, j: usize, k: usize) -> usize {
        self.tri_with_diag(j, k)
    }

    fn b1(&self, j: usize, k: usize) -> usize {
        self.n * (self.n + 1) / 2 + self.tri_strict(j, k)
    }

    fn a2(&self, j: usize, k: usize) -> usize {
        self.n * (self.n + 1) / 2 + self.n * (self.n - 1) / 2 + j * self.n + k
    }

    fn b2(&self, j: usize, k: usize) -> usize {
        self.a2(j, k) + self.n * self.n
    }

    fn a4(&self, j: usize, k: usize) -> usize {
        self.n * (self.n + 1) / 2
            + self.n * (self.n - 1) / 2
            + 2 * self.n * self.n
            + self.tri_strict(j, k)
    }

    fn b4(&self, j: usize, k: usize) -> usize {
        self.n * (self.n + 1) / 2
            + self.n * (self.n - 1)
            + 2 * self.n * self.n
            + self.tri_with_diag(j, k)
    }
}

/// Right-hand side of the normal-form system for the transform unknowns.
/// `m1_tilde` is the modulated coefficient in the solve basis.
fn transform_rhs(
    layout: Layout,
    s: &DVector<f64>,
    m1_tilde: &DMatrix<f64>,
    x: &DVector<f64>,
) -> DVector<f64> {
    let n = layout.n;
    let mut dx = DVector::zeros(layout.size());
    for j in 0..n {
        dx[layout.a1(j, j)] = s[j] * s[j] * x[layout.a2(j, j)];
        dx[layout.b4(j, j)] = -s[j] * x[layout.a2(j, j)];
        for k in (j + 1)..n {
            dx[layout.a1(j, k)] = s[k] * (x[layout.a2(j, k)] * s[k] + x[layout.a2(k, j)] * s[j]);
            dx[layout.b1(j, k)] = s[k] * (x[layout.b2(j, k)] * s[k] - x[layout.b2(k, j)] * s[j]);
            dx[layout.a4(j, k)] = s[j] * x[layout.b2(j, k)] - s[k] * x[layout.b2(k, j)];
            dx[layout.b4(j, k)] = -s[j] * x[layout.a2(j, k)] - s[k] * x[layout.a2(k, j)];
        }
    }
    for j in 0..n {
        for k in 0..n {
            // The modulated inhomogeneity enters through M1 (M0)^{-1/2},
            // i.e. scaled by the column eigenvalue root.
            let mut da = m1_tilde[(k, j)] / s[j];
            let mut db = 0.0;
            if j <= k {
                da += -x[layout.a1(j, k)] + s[j] * x[layout.b4(j, k)];
            }
            if k <= j {
                da += s[j] * x[layout.b4(k, j)] - (s[k] / s[j]) * x[layout.a1(k, j)];
            }
            if j < k {
                db += -x[layout.b1(j, k)] - s[j] * x[layout.a4(j, k)];
            }
            if k < j {
                db += s[j] * x[layout.a4(k, j)] + (s[k] / s[j]) * x[layout.b1(k, j)];
            }
            dx[layout.a2(j, k)] = da;
            dx[layout.b2(j, k)] = db;
        }
    }
    dx
}

/// First-order transform correction sampled over one period, together with
/// the eigenbasis the solve ran in.
#[derive(Debug, Clone)]
pub struct TransformTrajectory {
    pub times: Vec<f64>,
    states: Vec<DVector<f64>>,
    derivs: Vec<DVector<f64>>,
    m1_samples: Vec<DMatrix<f64>>,
    /// Orthogonal eigenbasis `Q` of the static coefficient.
    pub basis: DMatrix<f64>,
    /// Eigenvalues of the static coefficient, ascending.
    pub eigenvalues: DVector<f64>,
    sqrt_eigenvalues: DVector<f64>,
    layout: Layout,
    pub tol: f64,
}

impl TransformTrajectory {
    pub fn sample_count(&self) -> usize {
        self.times.len()
    }

    pub fn resonator_count(&self) -> usize {
        self.layout.n
    }

    fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// `T1` at sample `idx`, in the solve basis.
    pub fn t1_matrix(&self, idx: usize) -> DMatrix<Complex64> {
        self.matrix_from(&self.states[idx])
    }

    /// Analytic time derivative of `T1` at sample `idx` (solve basis),
    /// evaluated through the system right-hand side.
    pub fn t1_prime_matrix(&self, idx: usize) -> DMatrix<Complex64> {
        self.matrix_from(&self.derivs[idx])
    }

    /// Modulated coefficient in the solve basis at sample `idx`.
    pub fn m1_tilde(&self, idx: usize) -> &DMatrix<f64> {
        &self.m1_samples[idx]
    }

    /// Square roots of the static eigenvalues, ascending.
    pub fn sqrt_eigenvalues(&self) -> &DVector<f64> {
        &self.sqrt_eigenvalues
    }

    /// Largest `T1` Frobenius norm over the stored period, a cheap monitor
    /// for secular growth of the correction.
    pub fn max_norm(&self) -> f64 {
        (0..self.sample_count())
            .map(|i| self.t1_matrix(i).norm())
            .fold(0.0, f64::max)
    }

    /// Confirms the structural zeros of the ansatz at a sample: lower
    /// triangle, first-half diagonal imaginary parts and second-half
    /// diagonal real parts all vanish identically.
    pub fn ansatz_zeros_hold(&self, idx: usize) -> bool {
        let t1 = self.t1_matrix(idx);
        let n = self.layout.n;
        let mut ok = true;
        for j in 0..2 * n {
            for k in 0..j {
                ok &= t1[(j, k)].norm() == 0.0;
            }
        }
        for j in 0..n {
            ok &= t1[(j, j)].im == 0.0;
            ok &= t1[(n + j, n + j)].re == 0.0;
        }
        ok
    }

    fn matrix_from(&self, x: &DVector<f64>) -> DMatrix<Complex64> {
        let n = self.layout.n;
        let l = self.layout;
        let mut t = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
        for j in 0..n {
            t[(j, j)] = Complex64::new(x[l.a1(j, j)], 0.0);
            t[(n + j, n + j)] = Complex64::new(0.0, x[l.b4(j, j)]);
            for k in (j + 1)..n {
                t[(j, k)] = Complex64::new(x[l.a1(j, k)], x[l.b1(j, k)]);
                t[(n + j, n + k)] = Complex64::new(x[l.a4(j, k)], x[l.b4(j, k)]);
            }
            for k in 0..n {
                t[(j, n + k)] = Complex64::new(x[l.a2(j, k)], x[l.b2(j, k)]);
            }
        }
        t
    }

    /// 4th-order finite-difference derivative of the `T1` samples,
    /// independent of the analytic right-hand side.
    pub fn t1_prime_fd(&self, idx: usize) -> DMatrix<Complex64> {
        let h = self.step();
        let last = self.sample_count() - 1;
        let combo = |c: &[(f64, usize)]| {
            let mut acc = DMatrix::from_element(
                2 * self.layout.n,
                2 * self.layout.n,
                Complex64::new(0.0, 0.0),
            );
            for &(w, i) in c {
                if w != 0.0 {
                    acc += self.t1_matrix(i) * Complex64::new(w / (12.0 * h), 0.0);
                }
            }
            acc
        };
        if idx >= 2 && idx + 2 <= last {
            combo(&[
                (1.0, idx - 2),
                (-8.0, idx - 1),
                (8.0, idx + 1),
                (-1.0, idx + 2),
            ])
        } else if idx == 0 {
            combo(&[(-25.0, 0), (48.0, 1), (-36.0, 2), (16.0, 3), (-3.0, 4)])
        } else if idx == 1 {
            combo(&[(-3.0, 0), (-10.0, 1), (18.0, 2), (-6.0, 3), (1.0, 4)])
        } else if idx == last {
            combo(&[
                (25.0, last),
                (-48.0, last - 1),
                (36.0, last - 2),
                (-16.0, last - 3),
                (3.0, last - 4),
            ])
        } else {
            combo(&[
                (3.0, last),
                (10.0, last - 1),
                (-18.0, last - 2),
                (6.0, last - 3),
                (-1.0, last - 4),
            ])
        }
    }

    /// Residuals of the four scalar equations governing the one-resonator
    /// transform, with derivatives taken by finite differences so the check
    /// is independent of the integrator path. Rows are
    /// `[a' - m c, h' + s c, c' - 2 s h - M1/s + 2 a, d']`.
    pub fn one_resonator_residuals(&self) -> Result<Vec<[f64; 4]>> {
        if self.layout.n != 1 {
            return Err(Error::Config(
                "closed-system residuals are defined for one resonator".into(),
            ));
        }
        let s = self.sqrt_eigenvalues[0];
        let m = self.eigenvalues[0];
        let mut out = Vec::with_capacity(self.sample_count());
        for idx in 0..self.sample_count() {
            let t1 = self.t1_matrix(idx);
            let d1 = self.t1_prime_fd(idx);
            let a = t1[(0, 0)].re;
            let c = t1[(0, 1)].re;
            let h = t1[(1, 1)].im;
            let da = d1[(0, 0)].re;
            let dc = d1[(0, 1)].re;
            let dd = d1[(0, 1)].im;
            let dh = d1[(1, 1)].im;
            let m1 = self.m1_samples[idx][(0, 0)];
            out.push([
                da - m * c,
                dh + s * c,
                dc - 2.0 * s * h - m1 / s + 2.0 * a,
                dd,
            ]);
        }
        Ok(out)
    }
}

/// Solves the determined first-order system for `T1` over one period with
/// zero initial data, sampling on a uniform grid.
///
/// `m1` must be real and `tau`-periodic; it is evaluated in the original
/// basis and rotated into the eigenbasis internally.
pub fn solve_transform(
    m0: &DMatrix<f64>,
    m1: &dyn Fn(f64) -> DMatrix<f64>,
    tau: f64,
    samples: usize,
    tol: f64,
) -> Result<TransformTrajectory> {
    if samples < 8 {
        return Err(Error::Config("transform grid needs at least 8 samples".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::Config("period must be positive".into()));
    }
    let n = m0.nrows();
    let (eigenvalues, basis) = sym_eigen_sorted(m0)?;
    if let Some(bad) = eigenvalues.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Numerical(format!(
            "static coefficient not positive definite: eigenvalue {bad:.6e}"
        )));
    }
    let sqrt_eigenvalues = eigenvalues.map(f64::sqrt);
    let layout = Layout { n };

    let m1_tilde = |t: f64| basis.transpose() * m1(t) * &basis;
    let rhs = |t: f64, x: &DVector<f64>| transform_rhs(layout, &sqrt_eigenvalues, &m1_tilde(t), x);

    let times: Vec<f64> = (0..=samples).map(|i| tau * i as f64 / samples as f64).collect();
    let states = ode::integrate_path(&rhs, &times, DVector::zeros(layout.size()), tol)?;
    let derivs: Vec<DVector<f64>> = times.iter().zip(&states).map(|(&t, x)| rhs(t, x)).collect();
    let m1_samples: Vec<DMatrix<f64>> = times.iter().map(|&t| m1_tilde(t)).collect();

    Ok(TransformTrajectory {
        times,
        states,
        derivs,
        m1_samples,
        basis,
        eigenvalues,
        sqrt_eigenvalues,
        layout,
        tol,
    })
}

/// First-order Hamiltonian trajectory `H(t) = H0 + eps H1(t)`.
#[derive(Debug, Clone)]
pub struct HamiltonianTrajectory {
    pub times: Vec<f64>,
    /// Static part, original basis.
    pub h0: DMatrix<f64>,
    /// First-order part at each sample, original basis.
    pub h1: Vec<DMatrix<Complex64>>,
    /// First-order part in the solve basis, where the structural
    /// statements (zero diagonal, real block diagonals) live.
    pub h1_solve: Vec<DMatrix<Complex64>>,
    pub epsilon: f64,
}

fn block_matrix(
    b11: &DMatrix<Complex64>,
    b12: &DMatrix<Complex64>,
    b21: &DMatrix<Complex64>,
    b22: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let n = b11.nrows();
    let mut out = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = b11[(i, j)];
            out[(i, n + j)] = b12[(i, j)];
            out[(n + i, j)] = b21[(i, j)];
            out[(n + i, n + j)] = b22[(i, j)];
        }
    }
    out
}

fn blockdiag2(q: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = q.nrows();
    let mut out = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = Complex64::new(q[(i, j)], 0.0);
            out[(n + i, n + j)] = Complex64::new(q[(i, j)], 0.0);
        }
    }
    out
}

/// Assembles the first-order Hamiltonian from a solved transform: the four
/// blocks of the expansion in the solve basis, conjugated back by the
/// orthogonal basis.
pub fn hamiltonian_trajectory(
    m0: &DMatrix<f64>,
    traj: &TransformTrajectory,
    epsilon: f64,
) -> Result<HamiltonianTrajectory> {
    let n = traj.resonator_count();
    if m0.nrows() != n {
        return Err(Error::Config("coefficient and trajectory dimensions differ".into()));
    }
    let stat = static_hamiltonian(m0)?;
    let i_unit = Complex64::new(0.0, 1.0);
    let s = DMatrix::from_diagonal(&traj.sqrt_eigenvalues.map(|v| Complex64::new(v, 0.0)));
    let s_inv = DMatrix::from_diagonal(&traj.sqrt_eigenvalues.map(|v| Complex64::new(1.0 / v, 0.0)));
    let p = blockdiag2(&traj.basis);
    let pt = p.transpose();

    let mut h1 = Vec::with_capacity(traj.sample_count());
    let mut h1_solve = Vec::with_capacity(traj.sample_count());
    for idx in 0..traj.sample_count() {
        let t1 = traj.t1_matrix(idx);
        let d1 = traj.t1_prime_matrix(idx);
        let split = |m: &DMatrix<Complex64>, row: usize, col: usize| {
            m.view((row * n, col * n), (n, n)).into_owned()
        };
        let (t1_b, t2_b, t4_b) = (split(&t1, 0, 0), split(&t1, 0, 1), split(&t1, 1, 1));
        let (d1_b, d2_b, d4_b) = (split(&d1, 0, 0), split(&d1, 0, 1), split(&d1, 1, 1));
        let m1c = complexify(traj.m1_tilde(idx));

        let b11 = (&d1_b * &s_inv) * i_unit - (&t2_b * &s) * i_unit;
        let b12 = &d2_b + &t1_b + (&s * &t4_b) * i_unit;
        let b21 = (&t4_b * &s) * (-i_unit) + &m1c * &s_inv - &s * &t1_b * &s_inv;
        let b22 = &d4_b + (&s * &t2_b) * i_unit;
        let solve = block_matrix(&b11, &b12, &b21, &b22);
        h1.push(&p * &solve * &pt);
        h1_solve.push(solve);
    }
    Ok(HamiltonianTrajectory {
        times: traj.times.clone(),
        h0: stat.h0,
        h1,
        h1_solve,
        epsilon,
    })
}

/// Defect diagnostics of the Hamiltonian built from its defining relation
/// with the exact inverse of `T = T0 + eps T1` (no series truncation).
#[derive(Debug, Clone, Copy)]
pub struct DefectReport {
    /// `sup_t ||H_def(t) - H_def(t)^dagger||_F`; decays like `eps^2`.
    pub sup_hermitian: f64,
    /// `sup_t max_j |H_def[j][j]|` in the solve basis; also `O(eps^2)`.
    pub sup_diagonal: f64,
}

/// Evaluates `H_def = i (T' + T K(M)) T^{-1}` on the stored grid, where
/// `K(M)` is the companion matrix of the full coefficient `M = M0 + eps M1`,
/// and measures how far it is from Hermitian. The truncated Neumann series
/// behind the solved equations makes this an `O(eps^2)` quantity.
pub fn definition_defect(traj: &TransformTrajectory, epsilon: f64) -> Result<DefectReport> {
    let n = traj.resonator_count();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut t0 = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        t0[(j, j)] = Complex64::new(traj.sqrt_eigenvalues[j], 0.0);
        t0[(n + j, n + j)] = i_unit;
    }

    let mut sup_hermitian: f64 = 0.0;
    let mut sup_diagonal: f64 = 0.0;
    for idx in 0..traj.sample_count() {
        let t = &t0 + traj.t1_matrix(idx) * Complex64::new(epsilon, 0.0);
        if cond_1_complex(&t) > MAX_T_CONDITION {
            return Err(Error::Numerical(format!(
                "transformation ill-conditioned at sample {idx}"
            )));
        }
        let t_prime = traj.t1_prime_matrix(idx) * Complex64::new(epsilon, 0.0);
        let mut companion = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
        for j in 0..n {
            companion[(j, n + j)] = Complex64::new(1.0, 0.0);
            for k in 0..n {
                let m_full = if j == k { traj.eigenvalues[j] } else { 0.0 }
                    + epsilon * traj.m1_samples[idx][(j, k)];
                companion[(n + j, k)] = Complex64::new(-m_full, 0.0);
            }
        }
        let inv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("transformation not invertible".into()))?;
        let h_def = (&t_prime + &t * &companion) * inv * i_unit;
        sup_hermitian = sup_hermitian.max(crate::linalg::hermitian_defect(&h_def));
        for j in 0..2 * n {
            sup_diagonal = sup_diagonal.max(h_def[(j, j)].norm());
        }
    }
    Ok(DefectReport { sup_hermitian, sup_diagonal })
}

/// Reconstruction of the Hill coefficient from `(T, H)` through
/// `[[0, Id], [-M, 0]] = -i T^{-1} (H T - i T')`, with `T'` taken by
/// 4th-order finite differences of the stored trajectory. The relation is
/// the exact inverse of the defining equation `H = i (T' + T K) T^{-1}`.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub times: Vec<f64>,
    /// Recovered coefficient per sample, original basis.
    pub m_rec: Vec<DMatrix<f64>>,
    /// `sup_t` deviation of the top-left block from zero.
    pub top_left_defect: f64,
    /// `sup_t` deviation of the top-right block from the identity.
    pub top_right_defect: f64,
}

pub fn reconstruct_m(traj: &TransformTrajectory, epsilon: f64) -> Result<Reconstruction> {
    let n = traj.resonator_count();
    let i_unit = Complex64::new(0.0, 1.0);

    // Static parts in the solve basis.
    let mut t0 = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    let mut h0 = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        t0[(j, j)] = Complex64::new(traj.sqrt_eigenvalues[j], 0.0);
        t0[(n + j, n + j)] = i_unit;
        h0[(j, n + j)] = Complex64::new(traj.sqrt_eigenvalues[j], 0.0);
        h0[(n + j, j)] = Complex64::new(traj.sqrt_eigenvalues[j], 0.0);
    }

    let m0 = &traj.basis * DMatrix::from_diagonal(&traj.eigenvalues) * traj.basis.transpose();
    let hamiltonian = hamiltonian_trajectory(&m0, traj, epsilon)?;

    let mut m_rec = Vec::with_capacity(traj.sample_count());
    let mut top_left: f64 = 0.0;
    let mut top_right: f64 = 0.0;
    for idx in 0..traj.sample_count() {
        let t = &t0 + traj.t1_matrix(idx) * Complex64::new(epsilon, 0.0);
        if cond_1_complex(&t) > MAX_T_CONDITION {
            return Err(Error::Numerical(format!(
                "transformation ill-conditioned at sample {idx}"
            )));
        }
        let t_prime = traj.t1_prime_fd(idx) * Complex64::new(epsilon, 0.0);
        let h = &h0 + &hamiltonian.h1_solve[idx] * Complex64::new(epsilon, 0.0);
        let inv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("transformation not invertible".into()))?;
        let k = inv * (&h * &t - &t_prime * i_unit) * (-i_unit);

        for i in 0..n {
            for j in 0..n {
                top_left = top_left.max(k[(i, j)].norm());
                let id = if i == j { 1.0 } else { 0.0 };
                top_right = top_right.max((k[(i, n + j)] - Complex64::new(id, 0.0)).norm());
            }
        }
        let m_tilde = DMatrix::from_fn(n, n, |i, j| -k[(n + i, j)].re);
        m_rec.push(&traj.basis * m_tilde * traj.basis.transpose());
    }
    Ok(Reconstruction {
        times: traj.times.clone(),
        m_rec,
        top_left_defect: top_left,
        top_right_defect: top_right,
    })
}

/// Bundles the modulated pipeline for a Hill coefficient: eigenbasis solve
/// of the transform and assembly of the first-order Hamiltonian.
pub fn modulated_hamiltonian(
    coeff: &HillCoefficient,
    samples: usize,
    tol: f64,
) -> Result<(TransformTrajectory, HamiltonianTrajectory)> {
    let m0 = coeff.m_static();
    let m1 = |t: f64| coeff.m_modulated(t).expect("validated profile");
    let traj = solve_transform(&m0, &m1, coeff.period(), samples, tol)?;
    let hamiltonian = hamiltonian_trajectory(&m0, &traj, coeff.profile.epsilon())?;
    Ok((traj, hamiltonian))
}
