//! Floquet analysis of the Hill system `Psi'' + M(t) Psi = 0`.
//!
//! The system is advanced in first-order form, the monodromy matrix is the
//! fundamental solution after one period, and the quasifrequencies are the
//! scaled logarithms of its eigenvalues folded into the frequency Brillouin
//! zone `[0, Omega)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{cond_1_complex, sym_eigen_sorted};
use crate::modulation::{HillCoefficient, ModulationProfile};
use crate::ode;

/// Determinant drift allowed for a monodromy matrix (the companion matrix
/// is traceless, so the exact determinant is one).
pub const DET_TOL: f64 = 1e-8;
/// Eigenvector-matrix condition beyond which the monodromy is flagged as
/// (numerically) defective.
pub const DEFECT_CONDITION: f64 = 1e10;

/// State of the Hill system at one instant.
#[derive(Debug, Clone)]
pub struct HillState {
    pub psi: DVector<Complex64>,
    pub dpsi: DVector<Complex64>,
    pub t: f64,
}

impl HillState {
    pub fn new(psi: DVector<Complex64>, dpsi: DVector<Complex64>, t: f64) -> Result<Self> {
        if psi.len() != dpsi.len() {
            return Err(Error::Config("psi and psi' must have the same dimension".into()));
        }
        if psi.iter().chain(dpsi.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Config("Hill state entries must be finite".into()));
        }
        Ok(Self { psi, dpsi, t })
    }

    fn pack(&self) -> DVector<Complex64> {
        let n = self.psi.len();
        DVector::from_fn(2 * n, |k, _| if k < n { self.psi[k] } else { self.dpsi[k - n] })
    }

    fn unpack(y: &DVector<Complex64>, t: f64) -> Self {
        let n = y.len() / 2;
        Self {
            psi: y.rows(0, n).into_owned(),
            dpsi: y.rows(n, n).into_owned(),
            t,
        }
    }
}

/// Fundamental solution of the Hill system over one period.
#[derive(Debug, Clone)]
pub struct Monodromy {
    pub matrix: DMatrix<Complex64>,
    pub period: f64,
}

/// Floquet exponents folded into `[0, Omega)`, with the multipliers they
/// came from.
#[derive(Debug, Clone)]
pub struct Quasifrequencies {
    pub values: Vec<Complex64>,
    pub multipliers: Vec<Complex64>,
    pub omega: f64,
    /// Set when the eigenvector matrix is too ill-conditioned to trust the
    /// eigenvalue pairing, e.g. at parametric resonance points.
    pub defective: bool,
}

fn hill_rhs(coeff: &HillCoefficient) -> impl Fn(f64, &DVector<Complex64>) -> DVector<Complex64> + '_ {
    let n = coeff.size();
    move |t, y| {
        // The profile is validated non-degenerate over the period, so
        // assembling M cannot fail for in-range times.
        let m = coeff.assemble_m(t).expect("validated profile");
        let mut dy = DVector::from_element(2 * n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            dy[i] = y[n + i];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += m[(i, j)] * y[j];
            }
            dy[n + i] = -acc;
        }
        dy
    }
}

/// Advances the Hill system from the state's own time to `t1`.
pub fn integrate_hill(
    coeff: &HillCoefficient,
    state0: &HillState,
    t1: f64,
    tol: f64,
) -> Result<HillState> {
    if state0.psi.len() != coeff.size() {
        return Err(Error::Config(format!(
            "state dimension {} does not match system size {}",
            state0.psi.len(),
            coeff.size()
        )));
    }
    if t1 < state0.t {
        return Err(Error::Config("integration must move forward in time".into()));
    }
    let rhs = hill_rhs(coeff);
    let y = ode::integrate_adaptive(&rhs, state0.t, t1, state0.pack(), tol)?;
    Ok(HillState::unpack(&y, t1))
}

/// Integrates the `2N` columns of the identity over one period.
pub fn monodromy(coeff: &HillCoefficient, tol: f64) -> Result<Monodromy> {
    let n = coeff.size();
    let tau = coeff.period();
    let columns: Vec<DVector<Complex64>> = (0..2 * n)
        .into_par_iter()
        .map(|k| {
            let mut e = DVector::from_element(2 * n, Complex64::new(0.0, 0.0));
            e[k] = Complex64::new(1.0, 0.0);
            ode::integrate_adaptive(&hill_rhs(coeff), 0.0, tau, e, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for (k, col) in columns.iter().enumerate() {
        matrix.set_column(k, col);
    }
    let det = matrix.clone().lu().determinant();
    if (det - Complex64::new(1.0, 0.0)).norm() > DET_TOL {
        return Err(Error::Numerical(format!(
            "monodromy determinant {det} deviates from 1 beyond {DET_TOL:e}; tighten the tolerance"
        )));
    }
    Ok(Monodromy { matrix, period: tau })
}

/// Floquet exponents `omega_j = -i log(mu_j) / tau` with real parts folded
/// into `[0, Omega)`, sorted ascending by real then imaginary part.
pub fn quasifrequencies(mono: &Monodromy, omega: f64) -> Result<Quasifrequencies> {
    if !(omega > 0.0) {
        return Err(Error::Config(format!(
            "folding frequency must be positive, got {omega}"
        )));
    }
    let dim = mono.matrix.nrows();
    let scale = mono.matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let max_imag = mono.matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-10 * scale {
        return Err(Error::Numerical(
            "monodromy has non-real entries; the Hill coefficient must be real".into(),
        ));
    }
    let real = DMatrix::from_fn(dim, dim, |i, j| mono.matrix[(i, j)].re);
    let mut multipliers: Vec<Complex64> = real.complex_eigenvalues().iter().cloned().collect();
    multipliers.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let tau = mono.period;
    let mut pairs: Vec<(Complex64, Complex64)> = multipliers
        .iter()
        .map(|&mu| {
            let log = Complex64::new(mu.norm().ln(), mu.arg());
            let w = Complex64::new(0.0, -1.0) * log / tau;
            (Complex64::new(w.re.rem_euclid(omega), w.im), mu)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let defective = eigenvector_condition(&mono.matrix, &multipliers)
        .map(|c| c > DEFECT_CONDITION)
        .unwrap_or(true);

    Ok(Quasifrequencies {
        values: pairs.iter().map(|p| p.0).collect(),
        multipliers: pairs.iter().map(|p| p.1).collect(),
        omega,
        defective,
    })
}

/// Condition estimate of the eigenvector matrix, built by shifted inverse
/// iteration from deterministic start vectors.
fn eigenvector_condition(matrix: &DMatrix<Complex64>, multipliers: &[Complex64]) -> Option<f64> {
    let dim = matrix.nrows();
    let mut vectors = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (k, &mu) in multipliers.iter().enumerate() {
        let shift = mu + Complex64::new(1e-8 * (1.0 + mu.norm()), 0.0);
        let shifted = matrix - DMatrix::from_diagonal_element(dim, dim, shift);
        let lu = shifted.lu();
        let mut v = DVector::from_fn(dim, |i, _| {
            Complex64::new(
                (1.0 + (i * 31 + k * 17) as f64).sin(),
                (1.0 + (i * 13 + k * 7) as f64).cos(),
            )
        });
        for _ in 0..3 {
            v = lu.solve(&v)?;
            let norm = v.norm();
            if !(norm > 0.0 && norm.is_finite()) {
                return None;
            }
            v /= Complex64::new(norm, 0.0);
        }
        vectors.set_column(k, &v);
    }
    Some(cond_1_complex(&vectors))
}

/// Signed square roots of the spectrum of a symmetric positive definite
/// matrix: the `2N` values `-sqrt(lambda_k)` and `+sqrt(lambda_k)`,
/// ascending.
pub fn static_spectrum(m0: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (values, _) = sym_eigen_sorted(m0)?;
    if let Some(bad) = values.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Numerical(format!(
            "static coefficient not positive definite: eigenvalue {bad:.6e}"
        )));
    }
    let mut out: Vec<f64> = values.iter().flat_map(|&l| [-l.sqrt(), l.sqrt()]).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Pointwise map from the Hill variable to the physical amplitude:
/// `c = (sqrt(kappa) / rho) Psi`.
pub fn c_from_psi_at(rho: f64, kappa: f64, psi: Complex64) -> Complex64 {
    psi * (kappa.sqrt() / rho)
}

/// Converts a sampled `Psi` trajectory to the amplitudes `c_i(t)`.
pub fn c_from_psi(
    profile: &ModulationProfile,
    times: &[f64],
    psi: &[DVector<Complex64>],
) -> Result<Vec<DVector<Complex64>>> {
    if times.len() != psi.len() {
        return Err(Error::Config("time and sample counts differ".into()));
    }
    times
        .iter()
        .zip(psi)
        .map(|(&t, state)| {
            if state.len() != profile.len() {
                return Err(Error::Config("sample dimension does not match the profile".into()));
            }
            let mut c = state.clone();
            for i in 0..profile.len() {
                let m = profile.material(i, t)?;
                c[i] = c_from_psi_at(m.rho, m.kappa, state[i]);
            }
            Ok(c)
        })
        .collect()
}

/// Inverse of [`c_from_psi`], used for round-trip checks.
pub fn psi_from_c(
    profile: &ModulationProfile,
    times: &[f64],
    c: &[DVector<Complex64>],
) -> Result<Vec<DVector<Complex64>>> {
    if times.len() != c.len() {
        return Err(Error::Config("time and sample counts differ".into()));
    }
    times
        .iter()
        .zip(c)
        .map(|(&t, state)| {
            let mut psi = state.clone();
            for i in 0..profile.len() {
                let m = profile.material(i, t)?;
                psi[i] = state[i] * (m.rho / m.kappa.sqrt());
            }
            Ok(psi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacitance::{cap_b, dilute_capacitance, CapacitanceMatrix};
    use crate::geometry::MaterialConstants;
    use crate::modulation::FourierSeries;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    fn modulated_coefficient(n: usize, epsilon: f64, omega: f64) -> HillCoefficient {
        let z: Vec<Vector3<f64>> = (0..n).map(|k| Vector3::new(k as f64, 0.0, 0.0)).collect();
        let capacitance = dilute_capacitance(&z, 0.1, cap_b(1.0)).unwrap();
        let kappa: Vec<FourierSeries> = (0..n)
            .map(|k| {
                FourierSeries::from_positive_coeffs(
                    &[(1, Complex64::new(0.4 + 0.1 * k as f64, 0.1))],
                    omega,
                )
                .unwrap()
            })
            .collect();
        let rho: Vec<FourierSeries> = vec![FourierSeries::constant(1.0, omega); n];
        let profile = ModulationProfile::new(rho, kappa, epsilon).unwrap();
        let constants = MaterialConstants::new(0.05, 1.0, 1.0).unwrap();
        HillCoefficient::new(capacitance, profile, constants, vec![4.0 / 3.0 * PI; n]).unwrap()
    }

    fn scalar_coefficient(m_value: f64, omega: f64) -> HillCoefficient {
        let entries = nalgebra::DMatrix::from_element(1, 1, 1.0);
        let capacitance = CapacitanceMatrix::new(entries, 0, 0.0).unwrap();
        // M0 = delta kappa_r C / (rho_r |D|) = m_value with |D| = 1/m_value.
        let profile = ModulationProfile::static_profile(1, omega).unwrap();
        let constants = MaterialConstants::new(1.0, 1.0, 1.0).unwrap();
        HillCoefficient::new(capacitance, profile, constants, vec![1.0 / m_value]).unwrap()
    }

    #[test]
    fn scalar_hill_matches_cosine() {
        let m = 0.49;
        let tol = 1e-10;
        let coeff = scalar_coefficient(m, 1.0);
        let state0 = HillState::new(
            DVector::from_vec(vec![Complex64::new(1.0, 0.0)]),
            DVector::from_vec(vec![Complex64::new(0.0, 0.0)]),
            0.0,
        )
        .unwrap();
        let t1 = 5.0;
        let state = integrate_hill(&coeff, &state0, t1, tol).unwrap();
        let exact = (m.sqrt() * t1).cos();
        assert!((state.psi[0].re - exact).abs() < 10.0 * tol * 1e2);
        assert!(state.psi[0].im.abs() < 1e-14);
    }

    #[test]
    fn zero_state_stays_zero() {
        let coeff = modulated_coefficient(2, 0.02, 0.7);
        let zero = DVector::from_element(2, Complex64::new(0.0, 0.0));
        let state0 = HillState::new(zero.clone(), zero, 0.0).unwrap();
        let state = integrate_hill(&coeff, &state0, 3.0, 1e-9).unwrap();
        assert_eq!(state.psi.iter().map(|z| z.norm()).sum::<f64>(), 0.0);
        assert_eq!(state.dpsi.iter().map(|z| z.norm()).sum::<f64>(), 0.0);
    }

    #[test]
    fn static_energy_is_conserved() {
        let coeff = modulated_coefficient(2, 0.0, 0.7);
        let m0 = coeff.m_static();
        let energy = |s: &HillState| {
            let kinetic: f64 = s.dpsi.iter().map(|z| z.norm_sqr()).sum();
            let mut potential = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    potential += (s.psi[i].conj() * m0[(i, j)] * s.psi[j]).re;
                }
            }
            kinetic + potential
        };
        let tol = 1e-10;
        let state0 = HillState::new(
            DVector::from_vec(vec![Complex64::new(1.0, 0.2), Complex64::new(-0.3, 0.0)]),
            DVector::from_vec(vec![Complex64::new(0.0, 0.1), Complex64::new(0.2, 0.0)]),
            0.0,
        )
        .unwrap();
        let e0 = energy(&state0);
        let state = integrate_hill(&coeff, &state0, 40.0, tol).unwrap();
        assert!((energy(&state) - e0).abs() < 10.0 * tol * (1.0 + e0.abs()) * 1e2);
    }

    #[test]
    fn static_monodromy_matches_closed_form() {
        let coeff = modulated_coefficient(2, 0.0, 0.7);
        let mono = monodromy(&coeff, 1e-11).unwrap();
        let (values, q) = sym_eigen_sorted(&coeff.m_static()).unwrap();
        let tau = coeff.period();
        // Blockwise cos/sinc of sqrt(M0) in its eigenbasis.
        let func = |f: &dyn Fn(f64) -> f64| {
            let d = nalgebra::DMatrix::from_diagonal(&values.map(f));
            &q * d * q.transpose()
        };
        let cos_b = func(&|l: f64| (l.sqrt() * tau).cos());
        let sinc_b = func(&|l: f64| (l.sqrt() * tau).sin() / l.sqrt());
        let msin_b = func(&|l: f64| -(l.sqrt() * tau).sin() * l.sqrt());
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(mono.matrix[(i, j)].re, cos_b[(i, j)], epsilon = 1e-8);
                assert_relative_eq!(mono.matrix[(i, j + 2)].re, sinc_b[(i, j)], epsilon = 1e-8);
                assert_relative_eq!(mono.matrix[(i + 2, j)].re, msin_b[(i, j)], epsilon = 1e-8);
                assert_relative_eq!(mono.matrix[(i + 2, j + 2)].re, cos_b[(i, j)], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn modulated_monodromy_has_unit_determinant() {
        let coeff = modulated_coefficient(2, 0.04, 0.7);
        let mono = monodromy(&coeff, 1e-10).unwrap();
        let det = mono.matrix.clone().lu().determinant();
        assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn short_period_monodromy_is_identity() {
        let coeff = modulated_coefficient(1, 0.0, 1e8);
        let mono = monodromy(&coeff, 1e-10).unwrap();
        let id = nalgebra::DMatrix::<Complex64>::identity(2, 2);
        assert!((mono.matrix.clone() - id).norm() < 1e-6);
    }

    #[test]
    fn static_quasifrequencies_fold_the_spectrum() {
        let omega = 0.7;
        let coeff = modulated_coefficient(2, 0.0, omega);
        let mono = monodromy(&coeff, 1e-11).unwrap();
        let qf = quasifrequencies(&mono, omega).unwrap();
        let mut expected: Vec<f64> = static_spectrum(&coeff.m_static())
            .unwrap()
            .iter()
            .map(|w| w.rem_euclid(omega))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in qf.values.iter().zip(expected) {
            assert!((got.re - want).abs() < 1e-6, "folded {} vs {want}", got.re);
            assert!(got.im.abs() < 1e-6);
        }
    }

    #[test]
    fn identity_monodromy_gives_zero_quasifrequencies() {
        let mono = Monodromy {
            matrix: nalgebra::DMatrix::<Complex64>::identity(4, 4),
            period: 2.0 * PI,
        };
        let qf = quasifrequencies(&mono, 1.0).unwrap();
        for w in &qf.values {
            assert!(w.norm() < 1e-12);
        }
    }

    #[test]
    fn multipliers_reproduce_from_exponents() {
        let omega = 0.7;
        let coeff = modulated_coefficient(2, 0.03, omega);
        let mono = monodromy(&coeff, 1e-11).unwrap();
        let qf = quasifrequencies(&mono, omega).unwrap();
        let tau = mono.period;
        for (w, mu) in qf.values.iter().zip(&qf.multipliers) {
            let back = (Complex64::new(0.0, 1.0) * w * tau).exp();
            assert!((back - mu).norm() < 1e-8);
        }
    }

    #[test]
    fn quasifrequency_pairing_under_real_coefficient() {
        let omega = 0.7;
        let coeff = modulated_coefficient(2, 0.05, omega);
        let mono = monodromy(&coeff, 1e-11).unwrap();
        let qf = quasifrequencies(&mono, omega).unwrap();
        assert!(!qf.defective);
        // The set is closed under omega -> -omega (mod Omega).
        let mut negated: Vec<Complex64> = qf
            .values
            .iter()
            .map(|w| Complex64::new((-w.re).rem_euclid(omega), -w.im))
            .collect();
        negated.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        for (a, b) in qf.values.iter().zip(&negated) {
            assert!((a - b).norm() < 1e-6, "pairing violated: {a} vs {b}");
        }
    }

    #[test]
    fn quasifrequencies_move_continuously_in_epsilon() {
        let omega = 0.7;
        let static_qf = {
            let coeff = modulated_coefficient(2, 0.0, omega);
            quasifrequencies(&monodromy(&coeff, 1e-11).unwrap(), omega).unwrap()
        };
        let dist = |eps: f64| {
            let coeff = modulated_coefficient(2, eps, omega);
            let qf = quasifrequencies(&monodromy(&coeff, 1e-11).unwrap(), omega).unwrap();
            qf.values
                .iter()
                .zip(&static_qf.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max)
        };
        let d1 = dist(2e-3);
        let d2 = dist(1e-3);
        assert!(d1 < 0.05, "perturbation {d1} too large for eps = 2e-3");
        assert!(d2 < 0.8 * d1, "halving epsilon did not shrink the shift: {d2} vs {d1}");
    }

    #[test]
    fn static_spectrum_examples() {
        let id = nalgebra::DMatrix::<f64>::identity(2, 2);
        assert_eq!(static_spectrum(&id).unwrap(), vec![-1.0, -1.0, 1.0, 1.0]);

        let diag = nalgebra::DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0]));
        assert_eq!(static_spectrum(&diag).unwrap(), vec![-3.0, -2.0, 2.0, 3.0]);

        let indefinite = nalgebra::DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(static_spectrum(&indefinite).is_err());
    }

    #[test]
    fn amplitude_map_round_trips() {
        let omega = 0.9;
        let profile = ModulationProfile::new(
            vec![FourierSeries::constant(1.0, omega); 2],
            vec![
                FourierSeries::from_positive_coeffs(&[(1, Complex64::new(0.3, -0.1))], omega)
                    .unwrap(),
                FourierSeries::constant(1.0, omega),
            ],
            0.2,
        )
        .unwrap();
        let times = [0.0f64, 0.4, 1.3];
        let psi: Vec<DVector<Complex64>> = times
            .iter()
            .map(|&t| {
                DVector::from_vec(vec![
                    Complex64::new(t.cos(), t.sin()),
                    Complex64::new(1.0 - t, 0.5 * t),
                ])
            })
            .collect();
        let c = c_from_psi(&profile, &times, &psi).unwrap();
        let back = psi_from_c(&profile, &times, &c).unwrap();
        for (orig, rt) in psi.iter().zip(&back) {
            assert!((orig - rt).norm() < 1e-12);
        }

        // Unit materials leave the variable unchanged.
        let unit = ModulationProfile::static_profile(2, omega).unwrap();
        let c_unit = c_from_psi(&unit, &times, &psi).unwrap();
        for (orig, mapped) in psi.iter().zip(&c_unit) {
            assert_eq!(orig, mapped);
        }

        // Constant rho = 2, kappa = 1 halves the amplitude.
        let mapped = c_from_psi_at(2.0, 1.0, Complex64::new(1.0, -0.5));
        assert_relative_eq!(mapped.re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(mapped.im, -0.25, epsilon = 1e-15);
    }
}
