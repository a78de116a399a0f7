//! Capacitance matrices from the single-layer potential.
//!
//! The boundary operator is discretised by collocation with
//! piecewise-constant panel densities: entry `(p, q)` is the potential that a
//! unit density on panel `q` induces at the centroid of panel `p`, with the
//! kernel `-1/(4 pi |x - y|)`. Off-panel integrals use a 3-point Gauss rule;
//! the singular self term is the exact potential of a constant density on a
//! planar triangle evaluated at its centroid.

use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{mesh_sphere, mesh_system, ResonatorSystem, Sphere, TriangleMesh};

/// Condition-estimate ceiling for the dense solve.
pub const MAX_CONDITION: f64 = 1e12;

/// Collocation discretisation of the single-layer operator on a mesh.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub entries: DMatrix<f64>,
}

/// Piecewise-constant boundary density supported on the whole mesh,
/// solving `S psi = indicator(resonator i)` at the collocation points.
#[derive(Debug, Clone)]
pub struct Density {
    pub panel_values: DVector<f64>,
    pub resonator_index: usize,
    pub residual: f64,
}

/// Dense symmetric capacitance matrix with provenance diagnostics.
#[derive(Debug, Clone)]
pub struct CapacitanceMatrix {
    pub entries: DMatrix<f64>,
    pub refinement: u32,
    /// Max collocation residual across the density solves.
    pub residual: f64,
}

/// Symmetry tolerance of the assembled matrix, relative to `max |C|`.
const SYMMETRY_TOL: f64 = 1e-6;

impl CapacitanceMatrix {
    /// Wraps a raw matrix: checks near-symmetry, the conductor sign pattern
    /// and positive row sums, then symmetrises exactly.
    pub fn new(raw: DMatrix<f64>, refinement: u32, residual: f64) -> Result<Self> {
        let n = raw.nrows();
        if n == 0 || raw.ncols() != n {
            return Err(Error::Numerical("capacitance matrix must be square and non-empty".into()));
        }
        let scale = raw.amax();
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (raw[(i, j)] - raw[(j, i)]).abs();
                if gap > SYMMETRY_TOL * scale {
                    return Err(Error::Numerical(format!(
                        "capacitance asymmetry |C[{i},{j}] - C[{j},{i}]| = {gap:.3e} exceeds {:.3e}",
                        SYMMETRY_TOL * scale
                    )));
                }
            }
        }
        let entries = (&raw + raw.transpose()) * 0.5;
        for i in 0..n {
            if entries[(i, i)] <= 0.0 {
                return Err(Error::Numerical(format!("C[{i},{i}] = {} not positive", entries[(i, i)])));
            }
            let row_sum: f64 = entries.row(i).iter().sum();
            if row_sum <= 0.0 {
                return Err(Error::Numerical(format!("row {i} sums to {row_sum}, expected > 0")));
            }
            for j in 0..n {
                if i != j && entries[(i, j)] >= 0.0 {
                    return Err(Error::Numerical(format!(
                        "C[{i},{j}] = {} not negative",
                        entries[(i, j)]
                    )));
                }
            }
        }
        Ok(Self { entries, refinement, residual })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Writes the matrix row-major as CSV under the fixed header
    /// `# capacitance N=<N> refinement=<r>`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "# capacitance N={} refinement={}", self.size(), self.refinement)?;
        for i in 0..self.size() {
            let row: Vec<String> = (0..self.size())
                .map(|j| format!("{:.16e}", self.entries[(i, j)]))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads a matrix written by [`CapacitanceMatrix::write_csv`].
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut lines = std::io::BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty capacitance CSV".into()))??;
        let refinement = header
            .split_whitespace()
            .find_map(|tok| tok.strip_prefix("refinement=").and_then(|v| v.parse().ok()))
            .ok_or_else(|| Error::Config(format!("missing refinement in header: {header}")))?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("bad CSV number {tok:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config("capacitance CSV is not a square matrix".into()));
        }
        let raw = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(raw, refinement, 0.0)
    }
}

/// Exact in-plane potential `int_T |p - y|^-1 dA` of a unit density on a
/// planar triangle, for a field point `p` inside the triangle's plane.
///
/// Per-edge wedge decomposition: each edge at signed distance `d` contributes
/// `d * ln((r2 + s2)/(r1 + s1))` with `s`, `r` the tangential projections and
/// vertex distances.
fn planar_triangle_potential(p: &Vector3<f64>, v: &[Vector3<f64>; 3]) -> f64 {
    let normal = (v[1] - v[0]).cross(&(v[2] - v[0])).normalize();
    let mut total = 0.0;
    for e in 0..3 {
        let a = v[e];
        let b = v[(e + 1) % 3];
        let len = (b - a).norm();
        let tangent = (b - a) / len;
        let outward = tangent.cross(&normal);
        let d = (a - p).dot(&outward);
        let s1 = (a - p).dot(&tangent);
        let s2 = (b - p).dot(&tangent);
        let r1 = (a - p).norm();
        let r2 = (b - p).norm();
        // Edges collinear with p contribute nothing.
        if d.abs() < 1e-300 || (r1 + s1) <= 0.0 || (r2 + s2) <= 0.0 {
            continue;
        }
        total += d * ((r2 + s2) / (r1 + s1)).ln();
    }
    total
}

// Degree-2 Gauss rule on the triangle: barycentric (2/3, 1/6, 1/6) cyclic,
// equal weights.
fn gauss3_points(v: &[Vector3<f64>; 3]) -> [Vector3<f64>; 3] {
    let w = |a: f64, b: f64, c: f64| v[0] * a + v[1] * b + v[2] * c;
    [
        w(2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0),
        w(1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0),
        w(1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0),
    ]
}

/// Assembles the collocation matrix of the single-layer operator.
pub fn assemble_single_layer(mesh: &TriangleMesh) -> Result<DenseOperator> {
    let n = mesh.panel_count();
    let centroids: Vec<Vector3<f64>> = (0..n).map(|p| mesh.panel_centroid(p)).collect();
    let areas: Vec<f64> = (0..n).map(|p| mesh.panel_area(p)).collect();
    if let Some(p) = areas.iter().position(|&a| !(a > 0.0)) {
        return Err(Error::Geometry(format!("panel {p} is degenerate")));
    }
    let verts: Vec<[Vector3<f64>; 3]> = (0..n).map(|p| mesh.panel_vertices(p)).collect();
    let quad: Vec<[Vector3<f64>; 3]> = verts.iter().map(gauss3_points).collect();

    let inv4pi = 1.0 / (4.0 * std::f64::consts::PI);
    let verts_ref = &verts;
    let areas_ref = &areas;
    let quad_ref = &quad;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(move |p| {
            let x = centroids[p];
            (0..n).map(move |q| {
                if p == q {
                    -inv4pi * planar_triangle_potential(&x, &verts_ref[q])
                } else {
                    let w = areas_ref[q] / 3.0;
                    let sum: f64 = quad_ref[q].iter().map(|y| 1.0 / (x - y).norm()).sum();
                    -inv4pi * w * sum
                }
            })
        })
        .collect();
    Ok(DenseOperator {
        entries: DMatrix::from_row_slice(n, n, &rows),
    })
}

struct FactorizedOperator {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl FactorizedOperator {
    fn new(op: &DenseOperator) -> Result<Self> {
        let lu = op.entries.clone().lu();
        let diag = lu.u().diagonal();
        let max = diag.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let min = diag.iter().fold(f64::INFINITY, |m, &v| m.min(v.abs()));
        if min == 0.0 || max / min > MAX_CONDITION {
            return Err(Error::Numerical(format!(
                "single-layer system ill-conditioned: estimate {:.3e} exceeds {MAX_CONDITION:.0e}",
                if min == 0.0 { f64::INFINITY } else { max / min }
            )));
        }
        Ok(Self { lu })
    }

    fn solve(&self, op: &DenseOperator, mesh: &TriangleMesh, i: usize) -> Result<Density> {
        let n = mesh.panel_count();
        let rhs = DVector::from_fn(n, |p, _| {
            if mesh.panel_resonator[p] == i {
                1.0
            } else {
                0.0
            }
        });
        let psi = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("single-layer system singular".into()))?;
        let residual = (&op.entries * &psi - &rhs).amax();
        Ok(Density {
            panel_values: psi,
            resonator_index: i,
            residual,
        })
    }
}

/// Solves `S psi = indicator(resonator i)` by pivoted LU.
pub fn solve_density(op: &DenseOperator, mesh: &TriangleMesh, i: usize) -> Result<Density> {
    if i >= mesh.resonator_count() {
        return Err(Error::Config(format!("resonator index {i} out of range")));
    }
    FactorizedOperator::new(op)?.solve(op, mesh, i)
}

/// Boundary-element capacitance matrix of a resonator system:
/// `C[i][j] = -int_{boundary i} psi_j`.
pub fn capacitance_matrix(system: &ResonatorSystem, refinement: u32) -> Result<CapacitanceMatrix> {
    let mesh = mesh_system(system, refinement)?;
    let op = assemble_single_layer(&mesh)?;
    let fac = FactorizedOperator::new(&op)?;
    let n = system.len();
    let densities: Vec<Density> = (0..n)
        .map(|i| fac.solve(&op, &mesh, i))
        .collect::<Result<Vec<_>>>()?;

    let areas: Vec<f64> = (0..mesh.panel_count()).map(|p| mesh.panel_area(p)).collect();
    let mut raw = DMatrix::zeros(n, n);
    for (j, density) in densities.iter().enumerate() {
        for p in 0..mesh.panel_count() {
            let i = mesh.panel_resonator[p];
            raw[(i, j)] -= density.panel_values[p] * areas[p];
        }
    }
    let residual = densities.iter().map(|d| d.residual).fold(0.0, f64::max);
    CapacitanceMatrix::new(raw, refinement, residual)
}

/// Capacitance of a single sphere: `4 pi R`.
pub fn cap_b(radius: f64) -> f64 {
    4.0 * std::f64::consts::PI * radius
}

/// Boundary-element value of the single-sphere capacitance, used to validate
/// [`cap_b`] and to compare like with like in dilute studies.
pub fn cap_b_bem(radius: f64, refinement: u32) -> Result<f64> {
    let sphere = Sphere::new(Vector3::zeros(), radius)?;
    let mesh = mesh_sphere(&sphere, refinement);
    let op = assemble_single_layer(&mesh)?;
    let density = solve_density(&op, &mesh, 0)?;
    let total: f64 = (0..mesh.panel_count())
        .map(|p| density.panel_values[p] * mesh.panel_area(p))
        .sum();
    Ok(-total)
}

/// Leading-order capacitance matrix of a dilute system of identical
/// resonators: `C[i][i] = cap_b`, `C[i][j] = -eta cap_b^2 / (4 pi |z_i - z_j|)`.
pub fn dilute_capacitance(
    rescaled_centers: &[Vector3<f64>],
    eta: f64,
    cap_b: f64,
) -> Result<CapacitanceMatrix> {
    let n = rescaled_centers.len();
    if n == 0 {
        return Err(Error::Config("dilute capacitance needs at least one center".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Config(format!("eta must lie in (0, 1), got {eta}")));
    }
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        entries[(i, i)] = cap_b;
        for j in 0..n {
            if i == j {
                continue;
            }
            let gap = (rescaled_centers[i] - rescaled_centers[j]).norm();
            if gap == 0.0 {
                return Err(Error::Config(format!("centers {i} and {j} coincide")));
            }
            entries[(i, j)] = -eta * cap_b * cap_b / (4.0 * std::f64::consts::PI * gap);
        }
    }
    CapacitanceMatrix::new(entries, 0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MaterialConstants;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn constants() -> MaterialConstants {
        MaterialConstants::new(1e-3, 1.0, 1.0).unwrap()
    }

    fn unit_sphere_at(x: f64) -> Sphere {
        Sphere::new(Vector3::new(x, 0.0, 0.0), 1.0).unwrap()
    }

    /// Independent oracle for the singular self integral: the Duffy-style
    /// reduction around the field point turns `int_T 1/|p - y| dA` into
    /// `sum_wedges 2 area(p, a, b) int_0^1 dv / |(1-v)(a-p) + v(b-p)|`,
    /// a smooth 1D integral evaluated by composite Gauss-Legendre.
    fn self_potential_oracle(p: &Vector3<f64>, v: &[Vector3<f64>; 3]) -> f64 {
        // 4-point Gauss-Legendre nodes/weights on [0, 1].
        let nodes = [
            0.069431844202973712,
            0.330009478207571868,
            0.669990521792428132,
            0.930568155797026288,
        ];
        let weights = [
            0.173927422568726929,
            0.326072577431273071,
            0.326072577431273071,
            0.173927422568726929,
        ];
        let mut total = 0.0;
        for e in 0..3 {
            let a = v[e] - p;
            let b = v[(e + 1) % 3] - p;
            let area2 = a.cross(&b).norm();
            let panels = 64;
            let mut inner = 0.0;
            for k in 0..panels {
                let lo = k as f64 / panels as f64;
                let width = 1.0 / panels as f64;
                for (t, w) in nodes.iter().zip(weights) {
                    let s = lo + t * width;
                    inner += w * width / (a * (1.0 - s) + b * s).norm();
                }
            }
            total += area2 * inner;
        }
        total
    }

    #[test]
    fn self_term_matches_duffy_oracle() {
        let tris = [
            [
                Vector3::new(0.0, 0.0, 0.0),
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(0.0, 1.0, 0.0),
            ],
            [
                Vector3::new(0.3, -0.2, 1.0),
                Vector3::new(1.4, 0.1, 1.3),
                Vector3::new(0.2, 0.9, 0.4),
            ],
        ];
        for v in tris {
            let p = (v[0] + v[1] + v[2]) / 3.0;
            let expected = self_potential_oracle(&p, &v);
            let got = planar_triangle_potential(&p, &v);
            assert_relative_eq!(got, expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn assembled_self_entry_is_negative_closed_form() {
        // One flat right triangle with legs 1, collocated at its own centroid.
        let mesh = TriangleMesh {
            vertices: vec![
                Vector3::new(0.0, 0.0, 0.0),
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(0.0, 1.0, 0.0),
            ],
            triangles: vec![[0, 1, 2]],
            panel_resonator: vec![0],
        };
        let op = assemble_single_layer(&mesh).unwrap();
        let v = mesh.panel_vertices(0);
        let p = mesh.panel_centroid(0);
        let expected = -self_potential_oracle(&p, &v) / (4.0 * PI);
        assert!(op.entries[(0, 0)] < 0.0);
        assert_relative_eq!(op.entries[(0, 0)], expected, max_relative = 1e-10);
    }

    #[test]
    fn distant_panels_see_point_masses() {
        // Panels separated by much more than their diameters: the entry
        // approaches -area / (4 pi d).
        let mesh = TriangleMesh {
            vertices: vec![
                Vector3::new(0.0, 0.0, 0.0),
                Vector3::new(0.1, 0.0, 0.0),
                Vector3::new(0.0, 0.1, 0.0),
                Vector3::new(10.0, 0.0, 0.0),
                Vector3::new(10.1, 0.0, 0.0),
                Vector3::new(10.0, 0.1, 0.0),
            ],
            triangles: vec![[0, 1, 2], [3, 4, 5]],
            panel_resonator: vec![0, 1],
        };
        let op = assemble_single_layer(&mesh).unwrap();
        let d = (mesh.panel_centroid(0) - mesh.panel_centroid(1)).norm();
        let expected = -mesh.panel_area(1) / (4.0 * PI * d);
        assert_relative_eq!(op.entries[(0, 1)], expected, max_relative = 0.01);
    }

    #[test]
    fn constant_density_reproduces_sphere_potential() {
        // S[-1] on the unit sphere equals +R = 1 at every boundary point.
        let mesh = mesh_sphere(&unit_sphere_at(0.0), 2);
        let op = assemble_single_layer(&mesh).unwrap();
        let minus_one = DVector::from_element(mesh.panel_count(), -1.0);
        let values = &op.entries * minus_one;
        for v in values.iter() {
            assert!((v - 1.0).abs() < 0.02, "potential {v} not within 2% of 1");
        }
    }

    #[test]
    fn unit_sphere_density_is_minus_one_over_radius() {
        for (radius, expected) in [(1.0, -1.0), (2.0, -0.5)] {
            let sphere = Sphere::new(Vector3::zeros(), radius).unwrap();
            let mesh = mesh_sphere(&sphere, 2);
            let op = assemble_single_layer(&mesh).unwrap();
            let density = solve_density(&op, &mesh, 0).unwrap();
            for v in density.panel_values.iter() {
                assert!(
                    (v - expected).abs() < 0.03 * expected.abs(),
                    "density {v} not near {expected}"
                );
            }
        }
    }

    #[test]
    fn density_deviation_shrinks_under_refinement() {
        let dev = |refinement: u32| {
            let mesh = mesh_sphere(&unit_sphere_at(0.0), refinement);
            let op = assemble_single_layer(&mesh).unwrap();
            let density = solve_density(&op, &mesh, 0).unwrap();
            density
                .panel_values
                .iter()
                .map(|v| (v + 1.0).abs())
                .fold(0.0f64, f64::max)
        };
        let coarse = dev(1);
        let fine = dev(2);
        assert!(fine < coarse, "max deviation grew under refinement: {coarse} -> {fine}");
    }

    #[test]
    fn two_sphere_density_balances_other_boundary() {
        // psi_0 is supported on the whole boundary; S psi_0 vanishes on the
        // second resonator and equals one on the first.
        let system = ResonatorSystem::new(
            vec![unit_sphere_at(0.0), unit_sphere_at(4.0)],
            constants(),
        )
        .unwrap();
        let mesh = mesh_system(&system, 1).unwrap();
        let op = assemble_single_layer(&mesh).unwrap();
        let density = solve_density(&op, &mesh, 0).unwrap();
        let values = &op.entries * &density.panel_values;
        for p in 0..mesh.panel_count() {
            let target = if mesh.panel_resonator[p] == 0 { 1.0 } else { 0.0 };
            assert!((values[p] - target).abs() < 1e-8, "collocation residual at panel {p}");
        }
        let off_support: f64 = (0..mesh.panel_count())
            .filter(|&p| mesh.panel_resonator[p] == 1)
            .map(|p| density.panel_values[p].abs())
            .fold(0.0, f64::max);
        assert!(off_support > 1e-4, "psi_0 should not vanish on the second boundary");
    }

    #[test]
    fn unit_sphere_capacitance_converges_to_4pi() {
        let system = ResonatorSystem::new(vec![unit_sphere_at(0.0)], constants()).unwrap();
        let mut previous = f64::INFINITY;
        for refinement in 0..=2 {
            let c = capacitance_matrix(&system, refinement).unwrap();
            let err = (c.entries[(0, 0)] - 4.0 * PI).abs();
            assert!(err < previous, "capacitance error not decreasing at refinement {refinement}");
            previous = err;
        }
        assert!(previous / (4.0 * PI) < 0.02);
    }

    /// Bispherical image-charge series for two equal spheres of radius `r`
    /// at center distance `d`: the classical capacitance coefficients.
    fn two_sphere_coefficients_oracle(r: f64, d: f64) -> (f64, f64) {
        let u = (d / (2.0 * r)).acosh();
        let mut c11 = 0.0;
        let mut c12 = 0.0;
        for n in 1..200 {
            c11 += 1.0 / ((2 * n - 1) as f64 * u).sinh();
            c12 += 1.0 / ((2 * n) as f64 * u).sinh();
        }
        let scale = 4.0 * PI * r * u.sinh();
        (scale * c11, -scale * c12)
    }

    #[test]
    fn two_distant_spheres_match_dilute_and_image_charges() {
        let system = ResonatorSystem::new(
            vec![unit_sphere_at(0.0), unit_sphere_at(10.0)],
            constants(),
        )
        .unwrap();
        let c = capacitance_matrix(&system, 2).unwrap();
        let dilute = -(4.0 * PI) / 10.0;
        assert!(
            (c.entries[(0, 1)] - dilute).abs() / dilute.abs() < 0.05,
            "C12 = {} not within 5% of {dilute}",
            c.entries[(0, 1)]
        );
        let (c11, c12) = two_sphere_coefficients_oracle(1.0, 10.0);
        assert_relative_eq!(c.entries[(0, 0)], c11, max_relative = 0.02);
        assert_relative_eq!(c.entries[(0, 1)], c12, max_relative = 0.03);
    }

    #[test]
    fn permuting_resonators_permutes_the_matrix() {
        let a = unit_sphere_at(0.0);
        let b = Sphere::new(Vector3::new(0.0, 5.0, 1.0), 1.0).unwrap();
        let sys_ab = ResonatorSystem::new(vec![a, b], constants()).unwrap();
        let sys_ba = ResonatorSystem::new(vec![b, a], constants()).unwrap();
        let c_ab = capacitance_matrix(&sys_ab, 1).unwrap();
        let c_ba = capacitance_matrix(&sys_ba, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(
                    c_ab.entries[(i, j)],
                    c_ba.entries[(1 - i, 1 - j)],
                    max_relative = 1e-8
                );
            }
        }
    }

    #[test]
    fn raw_asymmetry_is_small_before_symmetrisation() {
        let system = ResonatorSystem::new(
            vec![unit_sphere_at(0.0), unit_sphere_at(5.0)],
            constants(),
        )
        .unwrap();
        let c = capacitance_matrix(&system, 2).unwrap();
        // Construction already verified asymmetry <= 1e-6 * max|C|; here we
        // only confirm the sign pattern survived for a non-trivial system.
        assert!(c.entries[(0, 0)] > 0.0 && c.entries[(0, 1)] < 0.0);
        assert!(c.entries.row(0).iter().sum::<f64>() > 0.0);
    }

    #[test]
    fn cap_b_analytic_and_bem_agree() {
        assert_relative_eq!(cap_b(1.0), 4.0 * PI);
        assert_relative_eq!(cap_b(2.0), 8.0 * PI);
        let bem = cap_b_bem(1.0, 2).unwrap();
        assert_relative_eq!(bem, 4.0 * PI, max_relative = 0.02);
    }

    #[test]
    fn dilute_capacitance_values() {
        let single = dilute_capacitance(&[Vector3::zeros()], 0.1, cap_b(1.0)).unwrap();
        assert_eq!(single.size(), 1);
        assert_relative_eq!(single.entries[(0, 0)], 4.0 * PI);

        let z = [Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)];
        let pair = dilute_capacitance(&z, 0.1, cap_b(1.0)).unwrap();
        assert_relative_eq!(pair.entries[(0, 1)], -0.4 * PI, epsilon = 1e-12);

        // eta -> 0 decouples the system.
        let tiny = dilute_capacitance(&z, 1e-9, cap_b(1.0)).unwrap();
        assert!(tiny.entries[(0, 1)].abs() < 1e-7);
        assert_relative_eq!(tiny.entries[(0, 0)], 4.0 * PI);
    }

    #[test]
    fn dilute_capacitance_rejects_coincident_centers() {
        let z = [Vector3::zeros(), Vector3::zeros()];
        assert!(dilute_capacitance(&z, 0.1, cap_b(1.0)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let z = [Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)];
        let c = dilute_capacitance(&z, 0.1, cap_b(1.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cap.csv");
        c.write_csv(&path).unwrap();
        let back = CapacitanceMatrix::read_csv(&path).unwrap();
        assert_eq!(back.size(), 2);
        assert_relative_eq!(back.entries[(0, 1)], c.entries[(0, 1)]);
    }
}
