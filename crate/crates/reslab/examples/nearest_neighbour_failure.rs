//! Why nearest-neighbour truncation fails for resonator chains and rings:
//! dropping the long-range hopping perturbs the spectrum at the same order
//! as the hopping itself. The diagnostic ratio
//! `R = (spectral error of truncation) / (eta lambda0)` stays bounded away
//! from zero as the system becomes more dilute.
//!
//! Run with `cargo run --release -p reslab --example nearest_neighbour_failure`.

use nalgebra::Vector3;
use reslab::capacitance::cap_b;
use reslab::geometry::MaterialConstants;
use reslab::tightbinding::{build_model, nearest_neighbour_pairs, nearest_neighbour_truncation};

fn main() -> reslab::Result<()> {
    let constants = MaterialConstants::new(0.05, 1.0, 1.0)?;
    let volume_b = 4.0 / 3.0 * std::f64::consts::PI;

    let chain: Vec<Vector3<f64>> = (0..3).map(|k| Vector3::new(k as f64, 0.0, 0.0)).collect();
    let ring = vec![
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.0, 1.0, 0.0),
        Vector3::new(-1.0, 0.0, 0.0),
        Vector3::new(0.0, -1.0, 0.0),
    ];

    for (name, centers) in [("3-chain", chain), ("4-ring", ring)] {
        let adjacency = nearest_neighbour_pairs(&centers);
        let pairs: Vec<String> = adjacency.iter().map(|(i, j)| format!("{i}-{j}")).collect();
        println!("{name}: nearest-neighbour pairs {{{}}}", pairs.join(", "));
        println!("  eta    spectral error   R = error / (eta lambda0)");
        for &eta in &[0.2, 0.1, 0.05] {
            let model = build_model(&constants, volume_b, cap_b(1.0), &centers, eta)?;
            let (_, report) = nearest_neighbour_truncation(&model, &adjacency)?;
            println!(
                "  {eta:<5}  {:<15.6e}  {:.6}",
                report.spectral_error, report.ratio
            );
        }
        println!();
    }

    println!("R is eta-independent: the truncation error never becomes negligible");
    println!("relative to the hopping it tries to approximate.");

    // Two resonators are the degenerate case: there is nothing beyond the
    // nearest neighbour, so the truncation is exact.
    let pair = [Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)];
    let model = build_model(&constants, volume_b, cap_b(1.0), &pair, 0.1)?;
    let (_, report) = nearest_neighbour_truncation(&model, &[(0, 1)])?;
    println!();
    println!("two resonators: R = {} exactly", report.ratio);
    Ok(())
}
