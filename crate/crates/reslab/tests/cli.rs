//! Behavioural tests of the `reslab` binary: exit codes, file contents and
//! the documented CSV columns.

use std::path::{Path, PathBuf};
use std::process::Output;

use nalgebra::{DMatrix, Vector3};
use reslab::capacitance::{cap_b_bem, CapacitanceMatrix};
use reslab::floquet::static_spectrum;
use reslab::geometry::{MaterialConstants, ResonatorSystem, Sphere};

fn run(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_reslab"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

/// Data rows of a CSV file, comment lines skipped.
fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

const TWO_SPHERES: &str = r#"{
    "geometry": {"spheres": [
        {"center": [0, 0, 0], "radius": 1.0},
        {"center": [4, 0, 0], "radius": 1.0}
    ]},
    "materials": {"delta": 0.05, "kappa_r": 1.0, "rho_r": 1.0},
    "modulation": {"omega": 1.0, "epsilon": 0.0,
        "rho_inv": [[], []],
        "kappa_inv": [[[1, 0.5, 0.0]], [[1, 0.0, -0.5]]]},
    "numerics": {"refinement": 1, "tol": 1e-9, "grid": 64}
}"#;

#[test]
fn capmat_unit_sphere_writes_4pi() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"spheres": [{"center": [0, 0, 0], "radius": 1.0}]},
            "materials": {"delta": 1e-3, "kappa_r": 1.0, "rho_r": 1.0},
            "numerics": {"refinement": 2, "tol": 1e-9, "grid": 64}
        }"#,
    );
    let out = dir.path().join("out");
    let result = run(&[
        "capmat",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--sweep-refinement",
        "--mesh-off",
    ]);
    assert!(result.status.success());

    let matrix = CapacitanceMatrix::read_csv(&out.join("capacitance.csv")).unwrap();
    let rel = (matrix.entries[(0, 0)] - 4.0 * std::f64::consts::PI).abs()
        / (4.0 * std::f64::consts::PI);
    assert!(rel < 0.02, "CSV capacitance off by {rel}");

    let convergence = csv_rows(&out.join("capacitance_convergence.csv"));
    assert_eq!(convergence.len(), 3);
    assert_eq!(convergence[1][1], 80.0);

    let off = std::fs::read_to_string(out.join("mesh.off")).unwrap();
    assert!(off.starts_with("OFF\n"));
}

#[test]
fn capmat_dilute_flag_compares_side_by_side() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"dilute": {"base_radius": 1.0, "eta": 0.1,
                "centers": [[0, 0, 0], [1, 0, 0]]}},
            "materials": {"delta": 1e-3, "kappa_r": 1.0, "rho_r": 1.0},
            "numerics": {"refinement": 1, "tol": 1e-9, "grid": 64}
        }"#,
    );
    let out = dir.path().join("out");
    let result = run(&[
        "capmat",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--dilute",
    ]);
    assert!(result.status.success());

    let rows = csv_rows(&out.join("capacitance_compare.csv"));
    assert_eq!(rows.len(), 4);
    for row in &rows {
        // columns: i, j, c_bem, c_dilute, abs_diff
        assert!((row[2] - row[3]).abs() - row[4] < 1e-15);
    }
    let header = std::fs::read_to_string(out.join("capacitance_compare.csv")).unwrap();
    assert!(header.starts_with("# bem vs dilute"));
    assert!(out.join("capacitance_dilute.csv").exists());
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bad.json", "{\n  \"geometry\": {,}\n}");
    let result = run(&["capmat", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("line") && stderr.contains("column"), "stderr: {stderr}");
}

#[test]
fn missing_modulation_block_exits_2_for_floquet() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"spheres": [{"center": [0, 0, 0], "radius": 1.0}]},
            "materials": {"delta": 1e-3, "kappa_r": 1.0, "rho_r": 1.0}
        }"#,
    );
    let result = run(&["floquet", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn missing_omega_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"spheres": [{"center": [0, 0, 0], "radius": 1.0}]},
            "materials": {"delta": 1e-3, "kappa_r": 1.0, "rho_r": 1.0},
            "modulation": {"epsilon": 0.01, "rho_inv": [[]], "kappa_inv": [[]]}
        }"#,
    );
    let result = run(&["floquet", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("omega"));
}

#[test]
fn floquet_static_table_matches_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "config.json", TWO_SPHERES);
    let out = dir.path().join("out");
    let result = run(&[
        "floquet",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--epsilon-sweep",
        "0.0,0.01",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    let rows = csv_rows(&out.join("quasifrequencies.csv"));
    assert_eq!(rows.len(), 8, "two amplitudes, four branches each");

    // Recompute the static reference through the library.
    let constants = MaterialConstants::new(0.05, 1.0, 1.0).unwrap();
    let system = ResonatorSystem::new(
        vec![
            Sphere::new(Vector3::zeros(), 1.0).unwrap(),
            Sphere::new(Vector3::new(4.0, 0.0, 0.0), 1.0).unwrap(),
        ],
        constants,
    )
    .unwrap();
    let capacitance = reslab::capacitance::capacitance_matrix(&system, 1).unwrap();
    let volumes = system.volumes();
    let m0 = DMatrix::from_fn(2, 2, |i, j| {
        0.05 * capacitance.entries[(i, j)] / volumes[i]
    });
    let mut expected: Vec<f64> = static_spectrum(&m0)
        .unwrap()
        .iter()
        .map(|w| w.rem_euclid(1.0))
        .collect();
    expected.sort_by(f64::total_cmp);

    for (row, want) in rows.iter().take(4).zip(&expected) {
        // columns: epsilon, index, re_omega, im_omega, mu_abs, det, defective
        assert_eq!(row[0], 0.0);
        assert!((row[2] - want).abs() < 1e-6, "folded value {} vs {want}", row[2]);
        assert!(row[3].abs() < 1e-6);
        assert!((row[5] - 1.0).abs() < 1e-8, "determinant column {}", row[5]);
    }
    for row in rows.iter().skip(4) {
        assert_eq!(row[0], 0.01);
        assert!((row[5] - 1.0).abs() < 1e-8);
    }
}

#[test]
fn hamiltonian_sweep_reports_quadratic_slope_and_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"spheres": [{"center": [0, 0, 0], "radius": 1.0}]},
            "materials": {"delta": 0.05, "kappa_r": 1.0, "rho_r": 1.0},
            "modulation": {"omega": 1.0, "epsilon": 0.01,
                "rho_inv": [[]],
                "kappa_inv": [[[1, 0.5, 0.0]]]},
            "numerics": {"refinement": 1, "tol": 1e-10, "grid": 512}
        }"#,
    );
    let out = dir.path().join("out");
    let result = run(&[
        "hamiltonian",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    for name in ["h0.csv", "t1_trajectory.csv", "h_trajectory.csv"] {
        assert!(out.join(name).exists(), "{name} missing");
    }

    let sweep = std::fs::read_to_string(out.join("hermitianity_sweep.csv")).unwrap();
    let slope: f64 = sweep
        .lines()
        .find_map(|l| l.strip_prefix("# slope="))
        .expect("slope footer")
        .parse()
        .unwrap();
    assert!((slope - 2.0).abs() < 0.3, "sweep slope {slope}");

    let residuals = csv_rows(&out.join("one_resonator_residuals.csv"));
    assert_eq!(residuals.len(), 513);
    let max = residuals
        .iter()
        .flat_map(|r| r[1..].iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    assert!(max < 1e-6, "closed-system residual {max} from the CLI path");
}

#[test]
fn static_only_hamiltonian_has_block_structure() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "config.json", TWO_SPHERES);
    let out = dir.path().join("out");
    let result = run(&[
        "hamiltonian",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--static-only",
    ]);
    assert!(result.status.success());
    let rows = csv_rows(&out.join("h0.csv"));
    assert_eq!(rows.len(), 4);
    // Diagonal blocks vanish, off-diagonal blocks are symmetric positive.
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(rows[i][j], 0.0);
            assert_eq!(rows[2 + i][2 + j], 0.0);
            assert!((rows[i][2 + j] - rows[2 + j][i]).abs() < 1e-15);
        }
        assert!(rows[i][2 + i] > 0.0);
    }
    assert!(!out.join("t1_trajectory.csv").exists());
}

#[test]
fn tightbinding_two_resonators_match_first_order_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"dilute": {"base_radius": 1.0, "eta": 0.1,
                "centers": [[0, 0, 0], [1, 0, 0]]}},
            "materials": {"delta": 0.05, "kappa_r": 1.0, "rho_r": 1.0},
            "numerics": {"refinement": 1, "tol": 1e-9, "grid": 64}
        }"#,
    );
    let out = dir.path().join("out");
    let result = run(&[
        "tightbinding",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    // Expected four eigenvalues: +-lambda0 (1 -+ eta A12 / 2) with the
    // matched single-sphere capacitance.
    let capb = cap_b_bem(1.0, 1).unwrap();
    let volume = 4.0 / 3.0 * std::f64::consts::PI;
    let lambda0 = (0.05 * capb / volume).sqrt();
    let a12 = capb / (4.0 * std::f64::consts::PI);
    let eta = 0.1;
    let mut expected = vec![
        lambda0 * (1.0 - eta * a12 / 2.0),
        lambda0 * (1.0 + eta * a12 / 2.0),
        -lambda0 * (1.0 - eta * a12 / 2.0),
        -lambda0 * (1.0 + eta * a12 / 2.0),
    ];
    expected.sort_by(f64::total_cmp);

    let rows = csv_rows(&out.join("tb_spectra.csv"));
    assert_eq!(rows.len(), 4);
    for (row, want) in rows.iter().zip(&expected) {
        // columns: eta, lambda_index, tb_value, full_value, mismatch
        assert!((row[2] - want).abs() < 1e-12, "tb value {} vs {want}", row[2]);
        assert!(row[4] < 5e-3, "mismatch column too large: {}", row[4]);
    }

    // Two resonators: nearest-neighbour truncation is exact.
    let nn = csv_rows(&out.join("nearest_neighbour.csv"));
    assert_eq!(nn[0][2], 0.0, "two-resonator truncation ratio must be exactly zero");
}

#[test]
fn tightbinding_three_chain_ratio_is_eta_independent() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"dilute": {"base_radius": 1.0, "eta": 0.1,
                "centers": [[0, 0, 0], [1, 0, 0], [2, 0, 0]]}},
            "materials": {"delta": 0.05, "kappa_r": 1.0, "rho_r": 1.0},
            "numerics": {"refinement": 1, "tol": 1e-9, "grid": 64},
            "tightbinding": {"adjacency": [[0, 1], [1, 2]]}
        }"#,
    );
    let out = dir.path().join("out");
    let result = run(&[
        "tightbinding",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--eta-sweep",
        "0.2,0.1,0.05",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    let rows = csv_rows(&out.join("nearest_neighbour.csv"));
    assert_eq!(rows.len(), 3);
    let ratios: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    for &r in &ratios {
        assert!(r > 0.0, "truncation ratio must be positive");
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        - ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 0.1 * ratios[0], "ratio spread {spread} exceeds 10%");

    let spectra = std::fs::read_to_string(out.join("tb_spectra.csv")).unwrap();
    let slope: f64 = spectra
        .lines()
        .find_map(|l| l.strip_prefix("# slope="))
        .expect("slope footer")
        .parse()
        .unwrap();
    assert!((1.5..2.5).contains(&slope), "eta-sweep mismatch slope {slope}");
}

#[test]
fn plot_script_flag_emits_template() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"spheres": [{"center": [0, 0, 0], "radius": 1.0}]},
            "materials": {"delta": 1e-3, "kappa_r": 1.0, "rho_r": 1.0},
            "numerics": {"refinement": 0, "tol": 1e-9, "grid": 64}
        }"#,
    );
    let out = dir.path().join("out");
    let result = run(&[
        "capmat",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--plot-script",
    ]);
    assert!(result.status.success());
    let script = std::fs::read_to_string(out.join("plot_template.py")).unwrap();
    assert!(script.starts_with("#!/usr/bin/env python3"));
}

#[test]
fn unknown_key_in_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "geometry": {"spheres": [{"center": [0, 0, 0], "radius": 1.0}]},
            "materials": {"delta": 1e-3, "kappa_r": 1.0, "rho_r": 1.0},
            "extra_key": true
        }"#,
    );
    let result = run(&["capmat", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}
