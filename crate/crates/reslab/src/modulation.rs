//! Time-periodic material modulation and the Hill coefficient
//! `M(t) = (delta kappa_r / rho_r) W1(t) C W2(t) + W3(t)`.
//!
//! The inverse material laws `1/rho_i(t)` and `1/kappa_i(t)` are finite
//! Fourier series. The modulation amplitude `epsilon` scales the
//! non-constant coefficients only, so `epsilon = 0` recovers the static
//! normalisation `rho_i = kappa_i = 1`. All time derivatives are taken
//! analytically on the series; nothing is differentiated numerically.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::capacitance::CapacitanceMatrix;
use crate::error::{Error, Result};
use crate::geometry::{MaterialConstants, ResonatorSystem};

/// Tolerance for the Hermitian-symmetry and realness checks.
const REALNESS_TOL: f64 = 1e-12;
/// A material law closer to zero than this is considered degenerate.
const DEGENERACY_FLOOR: f64 = 1e-8;

/// Finite Fourier series `sum_{n=-M}^{M} c_n exp(i n Omega t)` with
/// Hermitian coefficients, representing a real periodic signal.
#[derive(Debug, Clone)]
pub struct FourierSeries {
    /// Coefficients for n = -order..=order, stored low to high.
    coeffs: Vec<Complex64>,
    base_frequency: f64,
}

impl FourierSeries {
    /// Builds a series from coefficients ordered `n = -M..=M`.
    /// Requires an odd length and Hermitian symmetry `c_{-n} = conj(c_n)`.
    pub fn new(coeffs: Vec<Complex64>, base_frequency: f64) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() % 2 == 0 {
            return Err(Error::Config(
                "Fourier coefficients must cover n = -M..=M (odd length)".into(),
            ));
        }
        if !(base_frequency > 0.0 && base_frequency.is_finite()) {
            return Err(Error::Config(format!(
                "base frequency must be positive, got {base_frequency}"
            )));
        }
        let order = coeffs.len() / 2;
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for n in 0..=order {
            let hi = coeffs[order + n];
            let lo = coeffs[order - n];
            if (lo - hi.conj()).norm() > REALNESS_TOL * scale {
                return Err(Error::Config(format!(
                    "coefficients violate Hermitian symmetry at n = {n}"
                )));
            }
        }
        Ok(Self { coeffs, base_frequency })
    }

    /// The constant series `value`.
    pub fn constant(value: f64, base_frequency: f64) -> Self {
        Self {
            coeffs: vec![Complex64::new(value, 0.0)],
            base_frequency,
        }
    }

    /// Builds a real series from coefficients for strictly positive `n`;
    /// negative-frequency partners are mirrored automatically and the
    /// constant term is fixed to one.
    pub fn from_positive_coeffs(positive: &[(u32, Complex64)], base_frequency: f64) -> Result<Self> {
        let order = positive.iter().map(|&(n, _)| n).max().unwrap_or(0) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * order + 1];
        coeffs[order] = Complex64::new(1.0, 0.0);
        for &(n, c) in positive {
            if n == 0 {
                return Err(Error::Config(
                    "coefficient n = 0 is fixed to 1 and cannot be supplied".into(),
                ));
            }
            let n = n as usize;
            if coeffs[order + n].norm() != 0.0 {
                return Err(Error::Config(format!("duplicate coefficient for n = {n}")));
            }
            coeffs[order + n] = c;
            coeffs[order - n] = c.conj();
        }
        Self::new(coeffs, base_frequency)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    pub fn coefficient(&self, n: i32) -> Complex64 {
        let order = self.order() as i32;
        if n.abs() > order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + order) as usize]
        }
    }

    /// Evaluates the series; the imaginary part cancels by symmetry.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_complex(t).re
    }

    /// Complex-arithmetic evaluation, exposed for realness checks.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        let order = self.order() as i32;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let n = k as i32 - order;
            acc += c * Complex64::new(0.0, n as f64 * self.base_frequency * t).exp();
        }
        acc
    }

    /// Term-by-term analytic derivative: `c_n -> i n Omega c_n`.
    pub fn derivative(&self) -> Self {
        let order = self.order() as i32;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let n = (k as i32 - order) as f64;
                c * Complex64::new(0.0, n * self.base_frequency)
            })
            .collect();
        Self {
            coeffs,
            base_frequency: self.base_frequency,
        }
    }

    /// Scales the non-constant coefficients by the modulation amplitude.
    fn with_amplitude(&self, epsilon: f64) -> Self {
        let order = self.order();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k == order { *c } else { c * epsilon })
            .collect();
        Self {
            coeffs,
            base_frequency: self.base_frequency,
        }
    }

    /// Sum of the non-constant coefficient magnitudes, an upper bound for
    /// the modulated part of the signal.
    fn modulation_weight(&self) -> f64 {
        let order = self.order();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != order)
            .map(|(_, c)| c.norm())
            .sum()
    }
}

/// Material state of one resonator at one instant.
#[derive(Debug, Clone, Copy)]
pub struct MaterialState {
    pub rho: f64,
    pub kappa: f64,
    pub kappa_dot: f64,
    pub kappa_ddot: f64,
}

/// Per-resonator inverse material laws plus the modulation amplitude.
///
/// The stored series are the unit-amplitude shapes with constant term one;
/// `epsilon` is applied on evaluation.
#[derive(Debug, Clone)]
pub struct ModulationProfile {
    rho_inv: Vec<FourierSeries>,
    kappa_inv: Vec<FourierSeries>,
    epsilon: f64,
}

impl ModulationProfile {
    pub fn new(
        rho_inv: Vec<FourierSeries>,
        kappa_inv: Vec<FourierSeries>,
        epsilon: f64,
    ) -> Result<Self> {
        if rho_inv.is_empty() || rho_inv.len() != kappa_inv.len() {
            return Err(Error::Config(
                "profiles for 1/rho and 1/kappa must cover the same resonators".into(),
            ));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be >= 0, got {epsilon}")));
        }
        let omega = rho_inv[0].base_frequency();
        for series in rho_inv.iter().chain(kappa_inv.iter()) {
            if (series.base_frequency() - omega).abs() > REALNESS_TOL * omega {
                return Err(Error::Config("all series must share the same base frequency".into()));
            }
            if (series.coefficient(0) - Complex64::new(1.0, 0.0)).norm() > REALNESS_TOL {
                return Err(Error::Config(
                    "constant Fourier term must be 1 (static normalisation)".into(),
                ));
            }
            // Keeps 1/rho and 1/kappa bounded away from zero over the period.
            if epsilon * series.modulation_weight() >= 1.0 - DEGENERACY_FLOOR {
                return Err(Error::Config(format!(
                    "modulation amplitude {epsilon} drives a material law toward zero"
                )));
            }
        }
        Ok(Self { rho_inv, kappa_inv, epsilon })
    }

    /// The unmodulated profile for `n` resonators.
    pub fn static_profile(n: usize, omega: f64) -> Result<Self> {
        let ones = vec![FourierSeries::constant(1.0, omega); n];
        Self::new(ones.clone(), ones, 0.0)
    }

    pub fn len(&self) -> usize {
        self.rho_inv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho_inv.is_empty()
    }

    pub fn omega(&self) -> f64 {
        self.rho_inv[0].base_frequency()
    }

    /// Modulation period `2 pi / Omega`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho_inv(&self) -> &[FourierSeries] {
        &self.rho_inv
    }

    pub fn kappa_inv(&self) -> &[FourierSeries] {
        &self.kappa_inv
    }

    /// The same shapes at a different amplitude.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.rho_inv.clone(), self.kappa_inv.clone(), epsilon)
    }

    /// Evaluates `rho_i`, `kappa_i` and the time derivatives of `kappa_i`
    /// by inverting the series values and chaining analytic derivatives.
    pub fn material(&self, i: usize, t: f64) -> Result<MaterialState> {
        if i >= self.len() {
            return Err(Error::Config(format!("resonator index {i} out of range")));
        }
        let rho_inv = self.rho_inv[i].with_amplitude(self.epsilon);
        let kappa_inv = self.kappa_inv[i].with_amplitude(self.epsilon);

        let r = rho_inv.eval(t);
        let u = kappa_inv.eval(t);
        if r.abs() < DEGENERACY_FLOOR || u.abs() < DEGENERACY_FLOOR {
            return Err(Error::Numerical(format!(
                "modulation degenerate at t = {t}: |1/rho| = {:.3e}, |1/kappa| = {:.3e}",
                r.abs(),
                u.abs()
            )));
        }
        let du = kappa_inv.derivative();
        let ddu = du.derivative();
        let u1 = du.eval(t);
        let u2 = ddu.eval(t);

        // kappa = 1/u, so kappa' = -u'/u^2 and kappa'' = (2 u'^2 - u u'')/u^3.
        let kappa = 1.0 / u;
        let kappa_dot = -u1 / (u * u);
        let kappa_ddot = (2.0 * u1 * u1 - u * u2) / (u * u * u);
        Ok(MaterialState {
            rho: 1.0 / r,
            kappa,
            kappa_dot,
            kappa_ddot,
        })
    }
}

/// Diagonal weights of the Hill coefficient at one instant:
/// `W1 = sqrt(kappa) rho / |D|`, `W2 = sqrt(kappa) / rho` and
/// `W3 = (sqrt(kappa)/2) d/dt (kappa' / kappa^{3/2})` expanded analytically.
pub fn assemble_w(
    profile: &ModulationProfile,
    volumes: &[f64],
    t: f64,
) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
    let n = profile.len();
    if volumes.len() != n {
        return Err(Error::Config("volume list does not match the profile".into()));
    }
    let mut w1 = DVector::zeros(n);
    let mut w2 = DVector::zeros(n);
    let mut w3 = DVector::zeros(n);
    for i in 0..n {
        let m = profile.material(i, t)?;
        let sqrt_kappa = m.kappa.sqrt();
        w1[i] = sqrt_kappa * m.rho / volumes[i];
        w2[i] = sqrt_kappa / m.rho;
        w3[i] = 0.5
            * sqrt_kappa
            * (m.kappa_ddot / m.kappa.powf(1.5)
                - 1.5 * m.kappa_dot * m.kappa_dot / m.kappa.powf(2.5));
    }
    Ok((w1, w2, w3))
}

/// Everything needed to evaluate the Hill coefficient `M(t)`.
#[derive(Debug, Clone)]
pub struct HillCoefficient {
    pub capacitance: CapacitanceMatrix,
    pub profile: ModulationProfile,
    pub constants: MaterialConstants,
    pub volumes: Vec<f64>,
}

impl HillCoefficient {
    pub fn new(
        capacitance: CapacitanceMatrix,
        profile: ModulationProfile,
        constants: MaterialConstants,
        volumes: Vec<f64>,
    ) -> Result<Self> {
        let n = capacitance.size();
        if profile.len() != n || volumes.len() != n {
            return Err(Error::Config(format!(
                "inconsistent sizes: capacitance {n}, profile {}, volumes {}",
                profile.len(),
                volumes.len()
            )));
        }
        if volumes.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Config("volumes must be positive".into()));
        }
        Ok(Self { capacitance, profile, constants, volumes })
    }

    /// Convenience constructor taking volumes from the system geometry.
    pub fn from_system(
        system: &ResonatorSystem,
        capacitance: CapacitanceMatrix,
        profile: ModulationProfile,
    ) -> Result<Self> {
        Self::new(capacitance, profile, system.constants, system.volumes())
    }

    pub fn size(&self) -> usize {
        self.capacitance.size()
    }

    pub fn period(&self) -> f64 {
        self.profile.period()
    }

    /// `M(t) = (delta kappa_r / rho_r) W1 C W2 + W3`.
    pub fn assemble_m(&self, t: f64) -> Result<DMatrix<f64>> {
        let (w1, w2, w3) = assemble_w(&self.profile, &self.volumes, t)?;
        let n = self.size();
        let factor = self.constants.delta * self.constants.kappa_r / self.constants.rho_r;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = factor * w1[i] * self.capacitance.entries[(i, j)] * w2[j];
            }
            m[(i, i)] += w3[i];
        }
        Ok(m)
    }

    /// The generalised capacitance matrix
    /// `M0[i][j] = delta kappa_r C[i][j] / (rho_r |D_i|)`.
    pub fn m_static(&self) -> DMatrix<f64> {
        let n = self.size();
        let factor = self.constants.delta * self.constants.kappa_r / self.constants.rho_r;
        DMatrix::from_fn(n, n, |i, j| {
            factor * self.capacitance.entries[(i, j)] / self.volumes[i]
        })
    }

    /// First-order modulated part `M1(t) = (M(t) - M0) / epsilon`,
    /// identically zero when `epsilon = 0`.
    pub fn m_modulated(&self, t: f64) -> Result<DMatrix<f64>> {
        let eps = self.profile.epsilon();
        if eps == 0.0 {
            let n = self.size();
            return Ok(DMatrix::zeros(n, n));
        }
        Ok((self.assemble_m(t)? - self.m_static()) / eps)
    }

    /// Splits `M(t)` into the static part and the order-one modulated part.
    pub fn split(&self) -> (DMatrix<f64>, impl Fn(f64) -> Result<DMatrix<f64>> + '_) {
        (self.m_static(), move |t| self.m_modulated(t))
    }

    /// Relative change of `sup_t ||M1||` when `epsilon` is halved, sampled
    /// on a uniform grid. Values well below one confirm that `M1` captures
    /// the first order; the guideline is < 0.2 for `epsilon <= 1e-2`.
    pub fn first_order_ratio(&self, samples: usize) -> Result<f64> {
        let eps = self.profile.epsilon();
        if eps == 0.0 {
            return Ok(0.0);
        }
        let halved = Self::new(
            self.capacitance.clone(),
            self.profile.with_epsilon(eps / 2.0)?,
            self.constants,
            self.volumes.clone(),
        )?;
        let tau = self.period();
        let mut sup_full: f64 = 0.0;
        let mut sup_half: f64 = 0.0;
        for k in 0..samples {
            let t = tau * k as f64 / samples as f64;
            sup_full = sup_full.max(self.m_modulated(t)?.norm());
            sup_half = sup_half.max(halved.m_modulated(t)?.norm());
        }
        if sup_full == 0.0 {
            return Ok(0.0);
        }
        Ok((sup_half - sup_full).abs() / sup_full)
    }
}
