//! Tight-binding approximant of the static Hamiltonian in the dilute regime
//! and the failure analysis of nearest-neighbour truncation.
//!
//! The approximant is `Htilde + Delta`: a diagonal `+-lambda0` part carrying
//! the self-interaction and a block-diagonal coupling built from the pairwise
//! interaction matrix `A`. The positive branch couples through
//! `-(eta/2) lambda0 A` (the minus mirrors the negative off-diagonal
//! capacitance entries) and the negative branch through its negation, so the
//! spectrum stays symmetric about zero and tracks the full Hamiltonian to
//! first order in the diluteness for any resonator count. No coupling
//! connects the positive and negative branches, by construction.

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::floquet::static_spectrum;
use crate::geometry::MaterialConstants;
use crate::linalg::sym_eigen_sorted;

/// Pairwise interaction strengths `A[j][k] = cap_b / (4 pi |z_j - z_k|)`,
/// zero on the diagonal.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    pub a: DMatrix<f64>,
    pub cap_b: f64,
    pub rescaled_centers: Vec<Vector3<f64>>,
}

pub fn interaction_matrix(rescaled_centers: &[Vector3<f64>], cap_b: f64) -> Result<InteractionMatrix> {
    let n = rescaled_centers.len();
    if n == 0 {
        return Err(Error::Config("interaction matrix needs at least one center".into()));
    }
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in (j + 1)..n {
            let gap = (rescaled_centers[j] - rescaled_centers[k]).norm();
            if gap == 0.0 {
                return Err(Error::Config(format!("centers {j} and {k} coincide")));
            }
            let value = cap_b / (4.0 * std::f64::consts::PI * gap);
            a[(j, k)] = value;
            a[(k, j)] = value;
        }
    }
    Ok(InteractionMatrix {
        a,
        cap_b,
        rescaled_centers: rescaled_centers.to_vec(),
    })
}

/// Dilute tight-binding model: base frequency, interaction matrix and the
/// diluteness parameter.
#[derive(Debug, Clone)]
pub struct TightBindingModel {
    /// `sqrt(delta kappa_r cap_b / (rho_r |B|))`.
    pub lambda0: f64,
    pub interaction: InteractionMatrix,
    pub eta: f64,
}

/// Builds the model from the material constants, the reference resonator
/// volume and capacitance, and the rescaled geometry.
pub fn build_model(
    constants: &MaterialConstants,
    volume_b: f64,
    cap_b: f64,
    rescaled_centers: &[Vector3<f64>],
    eta: f64,
) -> Result<TightBindingModel> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Config(format!("eta must lie in (0, 1), got {eta}")));
    }
    if !(volume_b > 0.0 && cap_b > 0.0) {
        return Err(Error::Config("reference volume and capacitance must be positive".into()));
    }
    let lambda0 = (constants.delta * constants.kappa_r * cap_b / (constants.rho_r * volume_b)).sqrt();
    Ok(TightBindingModel {
        lambda0,
        interaction: interaction_matrix(rescaled_centers, cap_b)?,
        eta,
    })
}

impl TightBindingModel {
    pub fn len(&self) -> usize {
        self.interaction.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coupling block of the positive branch: `-(eta/2) lambda0 A`.
    pub fn delta_positive(&self) -> DMatrix<f64> {
        &self.interaction.a * (-0.5 * self.eta * self.lambda0)
    }

    /// Coupling block of the negative branch, the negation of
    /// [`TightBindingModel::delta_positive`] so that the branches mirror
    /// each other.
    pub fn delta_negative(&self) -> DMatrix<f64> {
        &self.interaction.a * (0.5 * self.eta * self.lambda0)
    }

    /// Diagonal of the zeroth-order part: `+lambda0` N times, then
    /// `-lambda0` N times.
    pub fn h_tilde_diagonal(&self) -> Vec<f64> {
        let n = self.len();
        (0..2 * n)
            .map(|k| if k < n { self.lambda0 } else { -self.lambda0 })
            .collect()
    }

    /// The full `2N x 2N` approximant
    /// `blockdiag(lambda0 Id + Delta_+, -lambda0 Id + Delta_-)`.
    pub fn approximant(&self) -> DMatrix<f64> {
        let n = self.len();
        let delta_pos = self.delta_positive();
        let delta_neg = self.delta_negative();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            h[(i, i)] = self.lambda0;
            h[(n + i, n + i)] = -self.lambda0;
            for j in 0..n {
                h[(i, j)] += delta_pos[(i, j)];
                h[(n + i, n + j)] += delta_neg[(i, j)];
            }
        }
        h
    }

    /// Same geometry and scales with the coupling restricted to `adjacency`
    /// (undirected index pairs); all other hopping entries are zeroed.
    pub fn truncated(&self, adjacency: &[(usize, usize)]) -> Result<TightBindingModel> {
        let n = self.len();
        let mut keep = vec![vec![false; n]; n];
        for &(i, j) in adjacency {
            if i >= n || j >= n {
                return Err(Error::Config(format!("adjacency pair ({i}, {j}) out of range")));
            }
            if i == j {
                return Err(Error::Config("adjacency pairs must connect distinct resonators".into()));
            }
            keep[i][j] = true;
            keep[j][i] = true;
        }
        let mut a = self.interaction.a.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j && !keep[i][j] {
                    a[(i, j)] = 0.0;
                }
            }
        }
        Ok(TightBindingModel {
            lambda0: self.lambda0,
            interaction: InteractionMatrix {
                a,
                cap_b: self.interaction.cap_b,
                rescaled_centers: self.interaction.rescaled_centers.clone(),
            },
            eta: self.eta,
        })
    }
}

/// Eigenvalues of the approximant, ascending. Equals
/// `{ +-lambda0 (1 - eta a_j / 2) : a_j in eig(A) }`.
pub fn tb_spectrum(model: &TightBindingModel) -> Vec<f64> {
    let (a_eigs, _) = sym_eigen_sorted(&model.interaction.a).expect("interaction matrix symmetric");
    let mut out: Vec<f64> = a_eigs
        .iter()
        .flat_map(|&a| {
            let branch = model.lambda0 * (1.0 - 0.5 * model.eta * a);
            [branch, -branch]
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Result of pairing the sorted approximant spectrum against the sorted
/// spectrum of a full static Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpectraComparison {
    pub eta: f64,
    pub tb_values: Vec<f64>,
    pub full_values: Vec<f64>,
    pub max_mismatch: f64,
}

/// Compares the approximant spectrum to `+-sqrt(eig(M0))` of a full
/// generalised capacitance matrix for the same physical parameters.
pub fn compare_spectra(model: &TightBindingModel, m0_full: &DMatrix<f64>) -> Result<SpectraComparison> {
    if m0_full.nrows() != model.len() {
        return Err(Error::Config(format!(
            "model has {} resonators, coefficient matrix {}",
            model.len(),
            m0_full.nrows()
        )));
    }
    let tb_values = tb_spectrum(model);
    let full_values = static_spectrum(m0_full)?;
    let max_mismatch = tb_values
        .iter()
        .zip(&full_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SpectraComparison {
        eta: model.eta,
        tb_values,
        full_values,
        max_mismatch,
    })
}

/// Outcome of a nearest-neighbour truncation experiment.
#[derive(Debug, Clone)]
pub struct TruncationReport {
    /// `max_j |eig_j(truncated) - eig_j(full)|` over the sorted spectra.
    pub spectral_error: f64,
    /// Error normalised by the first-order coupling scale `eta lambda0`.
    /// Stays bounded away from zero as `eta -> 0` whenever discarded
    /// long-range hopping carries spectral weight.
    pub ratio: f64,
}

/// Zeroes coupling outside `adjacency` and quantifies the spectral damage.
pub fn nearest_neighbour_truncation(
    model: &TightBindingModel,
    adjacency: &[(usize, usize)],
) -> Result<(TightBindingModel, TruncationReport)> {
    let truncated = model.truncated(adjacency)?;
    let full = tb_spectrum(model);
    let kept = tb_spectrum(&truncated);
    let spectral_error = full
        .iter()
        .zip(&kept)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let ratio = spectral_error / (model.eta * model.lambda0);
    Ok((truncated, TruncationReport { spectral_error, ratio }))
}

/// Connects every resonator to its minimal-distance neighbours (ties within
/// a relative sliver all count). Returns deduplicated pairs with `i < j`.
pub fn nearest_neighbour_pairs(rescaled_centers: &[Vector3<f64>]) -> Vec<(usize, usize)> {
    let n = rescaled_centers.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        let mut min_gap = f64::INFINITY;
        for j in 0..n {
            if i != j {
                min_gap = min_gap.min((rescaled_centers[i] - rescaled_centers[j]).norm());
            }
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let gap = (rescaled_centers[i] - rescaled_centers[j]).norm();
            if gap <= min_gap * (1.0 + 1e-9) {
                let pair = (i.min(j), i.max(j));
                if !pairs.contains(&pair) {
                    pairs.push(pair);
                }
            }
        }
    }
    pairs.sort();
    pairs
}
