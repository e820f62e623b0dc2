//! Uniform random atom positions in a cubic box and the resulting pair
//! geometry: separations, orientations and the strongest pair phase rate.
//!
//! `cargo run --example ensemble_sampling`

use ryddephase::ensemble::{sample_positions, EnsembleSpec};

fn main() -> ryddephase::Result<()> {
    let spec = EnsembleSpec::new(100, 60.0, 1)?;
    let geometry = sample_positions(&spec)?;

    let mut separations = Vec::new();
    let mut cos2 = 0.0;
    for (a, b) in geometry.pairs() {
        let pair = geometry.pair_geometry(a, b)?;
        separations.push(pair.separation);
        cos2 += pair.polar_angle.cos().powi(2);
    }
    separations.sort_by(f64::total_cmp);
    let count = separations.len();
    println!("{} atoms, {count} pairs in a {} um box", geometry.len(), spec.box_side);
    println!(
        "separation min {:.2} / median {:.2} / max {:.2} um",
        separations[0],
        separations[count / 2],
        separations[count - 1]
    );
    println!("<cos^2 theta> = {:.4} (isotropic 1/3)", cos2 / count as f64);
    let c3 = 3.63e5;
    println!("fastest pair phase rate 2 C3 / R^3 = {:.1} rad/us at C3 = {c3:.3e}", 2.0 * c3 / separations[0].powi(3));

    println!("\nfirst rows of the position table:");
    let mut csv = Vec::new();
    geometry.write_csv(&mut csv)?;
    for line in String::from_utf8_lossy(&csv).lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
