//! JSON experiment configuration shared by all CLI commands.
//!
//! Unknown keys are rejected, physical constants must be positive, and the
//! geometry block carries either explicit spheres or a dilute placement.
//! The full schema is documented in the repository README.

use std::path::Path;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{MaterialConstants, ResonatorSystem, Sphere};
use crate::modulation::{FourierSeries, ModulationProfile};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub materials: MaterialsConfig,
    #[serde(default)]
    pub modulation: Option<ModulationConfig>,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub tightbinding: Option<TightBindingConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default)]
    pub spheres: Option<Vec<SphereConfig>>,
    #[serde(default)]
    pub dilute: Option<DiluteConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereConfig {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiluteConfig {
    pub base_radius: f64,
    pub eta: f64,
    pub centers: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsConfig {
    pub delta: f64,
    pub kappa_r: f64,
    pub rho_r: f64,
}

/// Fourier triples are `(n, re, im)` with `n >= 1`; the constant term is
/// fixed to one and negative harmonics are mirrored for realness.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationConfig {
    pub omega: f64,
    pub epsilon: f64,
    pub rho_inv: Vec<Vec<(u32, f64, f64)>>,
    pub kappa_inv: Vec<Vec<(u32, f64, f64)>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub refinement: u32,
    pub tol: f64,
    pub grid: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            refinement: 2,
            tol: 1e-9,
            grid: crate::hamiltonian::DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightBindingConfig {
    #[serde(default)]
    pub adjacency: Option<Vec<(usize, usize)>>,
}

impl ExperimentConfig {
    /// Loads and validates a config file. Parse failures keep the
    /// line/column diagnostics from the JSON parser.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.geometry.spheres, &self.geometry.dilute) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "geometry must contain either `spheres` or `dilute`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config("geometry must contain `spheres` or `dilute`".into()))
            }
            _ => {}
        }
        self.constants()?;
        if !(self.numerics.tol > 0.0) {
            return Err(Error::Config("numerics.tol must be positive".into()));
        }
        if self.numerics.grid < 8 {
            return Err(Error::Config("numerics.grid must be at least 8".into()));
        }
        let n = self.resonator_count();
        if n == 0 {
            return Err(Error::Config("geometry lists no resonators".into()));
        }
        if let Some(modulation) = &self.modulation {
            if modulation.rho_inv.len() != n || modulation.kappa_inv.len() != n {
                return Err(Error::Config(format!(
                    "modulation lists {} rho and {} kappa profiles for {} resonators",
                    modulation.rho_inv.len(),
                    modulation.kappa_inv.len(),
                    n
                )));
            }
            // Surface Fourier-level problems (n = 0 terms, duplicate
            // harmonics, degeneracy) at load time.
            self.build_profile()?;
        }
        Ok(())
    }

    pub fn constants(&self) -> Result<MaterialConstants> {
        MaterialConstants::new(
            self.materials.delta,
            self.materials.kappa_r,
            self.materials.rho_r,
        )
    }

    pub fn resonator_count(&self) -> usize {
        match (&self.geometry.spheres, &self.geometry.dilute) {
            (Some(spheres), _) => spheres.len(),
            (_, Some(dilute)) => dilute.centers.len(),
            _ => 0,
        }
    }

    /// Physical resonator system described by the geometry block.
    pub fn build_system(&self) -> Result<ResonatorSystem> {
        let constants = self.constants()?;
        if let Some(spheres) = &self.geometry.spheres {
            let spheres = spheres
                .iter()
                .map(|s| Sphere::new(Vector3::from(s.center), s.radius))
                .collect::<Result<Vec<_>>>()?;
            return ResonatorSystem::new(spheres, constants);
        }
        let dilute = self.geometry.dilute.as_ref().expect("validated geometry");
        ResonatorSystem::dilute(
            dilute.base_radius,
            &dilute.rescaled_centers(),
            dilute.eta,
            constants,
        )
    }

    /// The modulation profile, or an error when the block is absent.
    pub fn build_profile(&self) -> Result<ModulationProfile> {
        let modulation = self
            .modulation
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs a `modulation` block".into()))?;
        if !(modulation.omega > 0.0) {
            return Err(Error::Config("modulation.omega must be positive".into()));
        }
        let series = |triples: &[(u32, f64, f64)]| -> Result<FourierSeries> {
            let coeffs: Vec<(u32, Complex64)> = triples
                .iter()
                .map(|&(n, re, im)| (n, Complex64::new(re, im)))
                .collect();
            FourierSeries::from_positive_coeffs(&coeffs, modulation.omega)
        };
        let rho_inv = modulation
            .rho_inv
            .iter()
            .map(|t| series(t))
            .collect::<Result<Vec<_>>>()?;
        let kappa_inv = modulation
            .kappa_inv
            .iter()
            .map(|t| series(t))
            .collect::<Result<Vec<_>>>()?;
        ModulationProfile::new(rho_inv, kappa_inv, modulation.epsilon)
    }
}

impl DiluteConfig {
    pub fn rescaled_centers(&self) -> Vec<Vector3<f64>> {
        self.centers.iter().map(|&c| Vector3::from(c)).collect()
    }
}
