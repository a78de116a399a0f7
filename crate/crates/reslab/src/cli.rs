//! Command implementations behind the `reslab` binary: each consumes a
//! validated [`ExperimentConfig`] and writes CSV tables into an output
//! directory. Output is byte-deterministic for a fixed config.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::capacitance::{cap_b_bem, capacitance_matrix, dilute_capacitance, CapacitanceMatrix};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::floquet::{monodromy, quasifrequencies};
use crate::geometry::{mesh_system, ResonatorSystem};
use crate::hamiltonian::{
    definition_defect, modulated_hamiltonian, static_hamiltonian, HamiltonianTrajectory,
    TransformTrajectory,
};
use crate::linalg::log_log_slope;
use crate::modulation::HillCoefficient;
use crate::tightbinding::{
    build_model, compare_spectra, nearest_neighbour_pairs, nearest_neighbour_truncation,
};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(outdir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(outdir)?;
    let path = outdir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

const PLOT_TEMPLATE: &str = r##"#!/usr/bin/env python3
# Starting point for plotting reslab CSV output; adapt freely.
#
# Usage: python3 plot_template.py <csv-file> <x-column> <y-column>
import csv
import sys

path, xcol, ycol = sys.argv[1], int(sys.argv[2]), int(sys.argv[3])
xs, ys = [], []
with open(path) as fh:
    for row in csv.reader(fh):
        if not row or row[0].startswith("#"):
            continue
        xs.append(float(row[xcol]))
        ys.append(float(row[ycol]))

try:
    import matplotlib.pyplot as plt
    plt.plot(xs, ys, "o-")
    plt.xlabel(f"column {xcol}")
    plt.ylabel(f"column {ycol}")
    plt.show()
except ImportError:
    for x, y in zip(xs, ys):
        print(x, y)
"##;

fn emit_plot_script(outdir: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    let (path, mut out) = writer(outdir, "plot_template.py")?;
    out.write_all(PLOT_TEMPLATE.as_bytes())?;
    files.push(path);
    Ok(())
}

/// Generalised capacitance matrix of a system from its boundary-element
/// capacitance: `M0[i][j] = delta kappa_r C[i][j] / (rho_r |D_i|)`.
fn m_static_from(system: &ResonatorSystem, capacitance: &CapacitanceMatrix) -> DMatrix<f64> {
    let n = system.len();
    let volumes = system.volumes();
    let c = system.constants;
    DMatrix::from_fn(n, n, |i, j| {
        c.delta * c.kappa_r * capacitance.entries[(i, j)] / (c.rho_r * volumes[i])
    })
}

#[derive(Debug, Clone, Default)]
pub struct CapmatOptions {
    pub sweep_refinement: bool,
    pub dilute: bool,
    pub mesh_off: bool,
    pub plot_script: bool,
}

/// Computes the capacitance matrix and optional convergence/dilute tables.
pub fn cmd_capmat(
    config: &ExperimentConfig,
    options: &CapmatOptions,
    outdir: &Path,
) -> Result<Vec<PathBuf>> {
    let system = config.build_system()?;
    let refinement = config.numerics.refinement;
    let mut files = Vec::new();

    let capacitance = capacitance_matrix(&system, refinement)?;
    std::fs::create_dir_all(outdir)?;
    let cap_path = outdir.join("capacitance.csv");
    capacitance.write_csv(&cap_path)?;
    files.push(cap_path);

    if options.sweep_refinement {
        let (path, mut out) = writer(outdir, "capacitance_convergence.csv")?;
        writeln!(out, "# capacitance convergence N={}", system.len())?;
        writeln!(out, "# columns: refinement,panels,c00,residual")?;
        for r in 0..=refinement {
            let c = capacitance_matrix(&system, r)?;
            let panels = system.len() * 20 * 4usize.pow(r);
            writeln!(
                out,
                "{r},{panels},{},{}",
                fmt(c.entries[(0, 0)]),
                fmt(c.residual)
            )?;
        }
        files.push(path);
    }

    if options.dilute {
        let dilute = config.geometry.dilute.as_ref().ok_or_else(|| {
            Error::Config("--dilute compares against the dilute formula and needs dilute geometry".into())
        })?;
        let centers = dilute.rescaled_centers();
        let capb = cap_b_bem(dilute.base_radius, refinement)?;
        let approx = dilute_capacitance(&centers, dilute.eta, capb)?;
        let dilute_path = outdir.join("capacitance_dilute.csv");
        approx.write_csv(&dilute_path)?;
        files.push(dilute_path);

        let (path, mut out) = writer(outdir, "capacitance_compare.csv")?;
        let max_diff = (&capacitance.entries - &approx.entries).amax();
        writeln!(out, "# bem vs dilute, capB={} max_abs_diff={}", fmt(capb), fmt(max_diff))?;
        writeln!(out, "# columns: i,j,c_bem,c_dilute,abs_diff")?;
        for i in 0..system.len() {
            for j in 0..system.len() {
                let bem = capacitance.entries[(i, j)];
                let dil = approx.entries[(i, j)];
                writeln!(out, "{i},{j},{},{},{}", fmt(bem), fmt(dil), fmt((bem - dil).abs()))?;
            }
        }
        files.push(path);
    }

    if options.mesh_off {
        let mesh = mesh_system(&system, refinement)?;
        let path = outdir.join("mesh.off");
        mesh.write_off(&path)?;
        files.push(path);
    }

    if options.plot_script {
        emit_plot_script(outdir, &mut files)?;
    }
    Ok(files)
}

#[derive(Debug, Clone, Default)]
pub struct FloquetOptions {
    pub epsilon_sweep: Option<Vec<f64>>,
    pub plot_script: bool,
}

/// Emits the quasifrequency table, one row per Floquet branch (and per
/// modulation amplitude when sweeping).
pub fn cmd_floquet(
    config: &ExperimentConfig,
    options: &FloquetOptions,
    outdir: &Path,
) -> Result<Vec<PathBuf>> {
    let system = config.build_system()?;
    let profile = config.build_profile()?;
    let capacitance = capacitance_matrix(&system, config.numerics.refinement)?;
    let tol = config.numerics.tol;
    let omega = profile.omega();

    let epsilons = options
        .epsilon_sweep
        .clone()
        .unwrap_or_else(|| vec![profile.epsilon()]);

    let mut files = Vec::new();
    let (path, mut out) = writer(outdir, "quasifrequencies.csv")?;
    writeln!(out, "# floquet N={} omega={}", system.len(), fmt(omega))?;
    writeln!(
        out,
        "# columns: epsilon,index,re_omega,im_omega,mu_abs,monodromy_det,defective"
    )?;
    for &eps in &epsilons {
        let coeff = HillCoefficient::from_system(
            &system,
            capacitance.clone(),
            profile.with_epsilon(eps)?,
        )?;
        let mono = monodromy(&coeff, tol)?;
        let det = mono.matrix.clone().lu().determinant();
        let qf = quasifrequencies(&mono, omega)?;
        for (index, (w, mu)) in qf.values.iter().zip(&qf.multipliers).enumerate() {
            writeln!(
                out,
                "{},{index},{},{},{},{},{}",
                fmt(eps),
                fmt(w.re),
                fmt(w.im),
                fmt(mu.norm()),
                fmt(det.norm()),
                u8::from(qf.defective)
            )?;
        }
    }
    files.push(path);

    if options.plot_script {
        emit_plot_script(outdir, &mut files)?;
    }
    Ok(files)
}

#[derive(Debug, Clone, Default)]
pub struct HamiltonianOptions {
    pub epsilon_sweep: Option<Vec<f64>>,
    pub static_only: bool,
    pub plot_script: bool,
}

fn write_matrix_csv(
    outdir: &Path,
    name: &str,
    header: &str,
    matrix: &DMatrix<f64>,
) -> Result<PathBuf> {
    let (path, mut out) = writer(outdir, name)?;
    writeln!(out, "{header}")?;
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols()).map(|j| fmt(matrix[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(path)
}

fn write_complex_trajectory(
    outdir: &Path,
    name: &str,
    header: &str,
    times: &[f64],
    sample: impl Fn(usize) -> DMatrix<Complex64>,
) -> Result<PathBuf> {
    let (path, mut out) = writer(outdir, name)?;
    writeln!(out, "{header}")?;
    for (idx, &t) in times.iter().enumerate() {
        let m = sample(idx);
        let mut row = vec![fmt(t)];
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                row.push(fmt(m[(i, j)].re));
                row.push(fmt(m[(i, j)].im));
            }
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(path)
}

/// Emits the static Hamiltonian and, for modulated configs, the transform
/// and Hamiltonian trajectories plus the Hermitianity-defect sweep.
pub fn cmd_hamiltonian(
    config: &ExperimentConfig,
    options: &HamiltonianOptions,
    outdir: &Path,
) -> Result<Vec<PathBuf>> {
    let system = config.build_system()?;
    let capacitance = capacitance_matrix(&system, config.numerics.refinement)?;
    let m0 = m_static_from(&system, &capacitance);
    let stat = static_hamiltonian(&m0)?;
    let n = system.len();

    let mut files = Vec::new();
    files.push(write_matrix_csv(
        outdir,
        "h0.csv",
        &format!("# h0 N={n}"),
        &stat.h0,
    )?);

    if options.static_only || config.modulation.is_none() {
        if options.plot_script {
            emit_plot_script(outdir, &mut files)?;
        }
        return Ok(files);
    }

    let profile = config.build_profile()?;
    let epsilon = profile.epsilon();
    let tol = config.numerics.tol;
    let grid = config.numerics.grid;

    let solve_at = |eps: f64| -> Result<(TransformTrajectory, HamiltonianTrajectory)> {
        let coeff =
            HillCoefficient::from_system(&system, capacitance.clone(), profile.with_epsilon(eps)?)?;
        modulated_hamiltonian(&coeff, grid, tol)
    };

    let (traj, hamiltonian) = solve_at(epsilon)?;
    files.push(write_complex_trajectory(
        outdir,
        "t1_trajectory.csv",
        &format!("# t1 N={n} epsilon={} basis=m0-eigen max_norm={}", fmt(epsilon), fmt(traj.max_norm())),
        &traj.times,
        |idx| traj.t1_matrix(idx),
    )?);
    files.push(write_complex_trajectory(
        outdir,
        "h_trajectory.csv",
        &format!("# h = h0 + eps h1, N={n} epsilon={}", fmt(epsilon)),
        &hamiltonian.times,
        |idx| {
            crate::linalg::complexify(&hamiltonian.h0)
                + &hamiltonian.h1[idx] * Complex64::new(epsilon, 0.0)
        },
    )?);

    if epsilon > 0.0 {
        let epsilons = options
            .epsilon_sweep
            .clone()
            .unwrap_or_else(|| vec![epsilon, epsilon / 2.0, epsilon / 4.0]);
        let (path, mut out) = writer(outdir, "hermitianity_sweep.csv")?;
        writeln!(out, "# columns: epsilon,sup_hermitian_defect,sup_diagonal")?;
        let mut defects = Vec::new();
        for &eps in &epsilons {
            let (traj_eps, _) = solve_at(eps)?;
            let report = definition_defect(&traj_eps, eps)?;
            writeln!(
                out,
                "{},{},{}",
                fmt(eps),
                fmt(report.sup_hermitian),
                fmt(report.sup_diagonal)
            )?;
            defects.push(report.sup_hermitian);
        }
        if epsilons.len() >= 2 {
            let slope = log_log_slope(&epsilons, &defects)?;
            writeln!(out, "# slope={}", fmt(slope))?;
        }
        files.push(path);
    }

    if n == 1 {
        let residuals = traj.one_resonator_residuals()?;
        let (path, mut out) = writer(outdir, "one_resonator_residuals.csv")?;
        writeln!(out, "# columns: t,r_a,r_h,r_c,r_d")?;
        for (idx, r) in residuals.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt(traj.times[idx]),
                fmt(r[0]),
                fmt(r[1]),
                fmt(r[2]),
                fmt(r[3])
            )?;
        }
        files.push(path);
    }

    if options.plot_script {
        emit_plot_script(outdir, &mut files)?;
    }
    Ok(files)
}

#[derive(Debug, Clone, Default)]
pub struct TightBindingOptions {
    pub eta_sweep: Option<Vec<f64>>,
    pub plot_script: bool,
}

/// Tight-binding model, spectra comparison against the boundary-element
/// Hamiltonian across a diluteness sweep, and the nearest-neighbour report.
pub fn cmd_tightbinding(
    config: &ExperimentConfig,
    options: &TightBindingOptions,
    outdir: &Path,
) -> Result<Vec<PathBuf>> {
    let dilute = config
        .geometry
        .dilute
        .as_ref()
        .ok_or_else(|| Error::Config("tightbinding needs dilute geometry".into()))?;
    let constants = config.constants()?;
    let refinement = config.numerics.refinement;
    let centers = dilute.rescaled_centers();
    let volume_b = 4.0 / 3.0 * std::f64::consts::PI * dilute.base_radius.powi(3);

    // Matched-refinement reference capacitance: comparing the boundary
    // element solve against a dilute model built from the same solver
    // cancels the discretisation bias that would otherwise mask the
    // second-order remainder.
    let capb = cap_b_bem(dilute.base_radius, refinement)?;

    let mut files = Vec::new();

    let model = build_model(&constants, volume_b, capb, &centers, dilute.eta)?;
    files.push(write_matrix_csv(
        outdir,
        "tb_model.csv",
        &format!(
            "# tightbinding approximant N={} lambda0={} eta={} capB={}",
            model.len(),
            fmt(model.lambda0),
            fmt(model.eta),
            fmt(capb)
        ),
        &model.approximant(),
    )?);

    let etas = options.eta_sweep.clone().unwrap_or_else(|| vec![dilute.eta]);

    let (path, mut out) = writer(outdir, "tb_spectra.csv")?;
    writeln!(out, "# columns: eta,lambda_index,tb_value,full_value,mismatch")?;
    let mut mismatches = Vec::new();
    for &eta in &etas {
        let system = ResonatorSystem::dilute(dilute.base_radius, &centers, eta, constants)?;
        let capacitance = capacitance_matrix(&system, refinement)?;
        let m0 = m_static_from(&system, &capacitance);
        let model_eta = build_model(&constants, volume_b, capb, &centers, eta)?;
        let report = compare_spectra(&model_eta, &m0)?;
        for (index, (tb, full)) in report.tb_values.iter().zip(&report.full_values).enumerate() {
            writeln!(
                out,
                "{},{index},{},{},{}",
                fmt(eta),
                fmt(*tb),
                fmt(*full),
                fmt((tb - full).abs())
            )?;
        }
        mismatches.push(report.max_mismatch);
    }
    if etas.len() >= 2 {
        let slope = log_log_slope(&etas, &mismatches)?;
        writeln!(out, "# slope={}", fmt(slope))?;
    }
    files.push(path);

    let adjacency = config
        .tightbinding
        .as_ref()
        .and_then(|tb| tb.adjacency.clone())
        .unwrap_or_else(|| nearest_neighbour_pairs(&centers));
    let (path, mut out) = writer(outdir, "nearest_neighbour.csv")?;
    let pairs: Vec<String> = adjacency.iter().map(|(i, j)| format!("{i}-{j}")).collect();
    writeln!(out, "# adjacency: {}", pairs.join(" "))?;
    writeln!(out, "# columns: eta,spectral_error,ratio")?;
    for &eta in &etas {
        let model_eta = build_model(&constants, volume_b, capb, &centers, eta)?;
        let (_, report) = nearest_neighbour_truncation(&model_eta, &adjacency)?;
        writeln!(
            out,
            "{},{},{}",
            fmt(eta),
            fmt(report.spectral_error),
            fmt(report.ratio)
        )?;
    }
    files.push(path);

    if options.plot_script {
        emit_plot_script(outdir, &mut files)?;
    }
    Ok(files)
}
