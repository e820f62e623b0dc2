//! Spin-wave grating periods for a four-photon scheme, collinear and with
//! tilted beams, and the motional coherence time of a two-photon scheme.
//!
//! `cargo run --example phase_matching`

use ryddephase::phasematch::{collinear, solve_offaxis, BeamSign, PhaseMatchResult};

fn main() -> ryddephase::Result<()> {
    use BeamSign::{Minus, Plus};
    let speed = 0.1;
    let wavelengths = [795.0, 1475.0, 2294.0, 1005.0];
    let signs = [Plus, Minus, Plus, Minus];

    let straight = PhaseMatchResult::from_beams(&collinear(&wavelengths, &signs)?, &[0.0; 4], speed)?;
    println!("four-photon, collinear:\n{}", serde_json::to_string_pretty(&straight.to_json()).unwrap());

    let tilted = solve_offaxis(wavelengths, signs)?;
    let off = PhaseMatchResult::from_beams(&tilted.beams, &tilted.angles, speed)?;
    println!("four-photon, off-axis (residual {:.1e}):\n{}", tilted.residual, serde_json::to_string_pretty(&off.to_json()).unwrap());

    let two = PhaseMatchResult::from_beams(&collinear(&[780.0, 480.0], &[Plus, Minus])?, &[0.0; 2], speed)?;
    println!("two-photon, collinear:\n{}", serde_json::to_string_pretty(&two.to_json()).unwrap());

    match solve_offaxis(wavelengths, [Plus; 4]) {
        Ok(g) => println!("all-plus unexpectedly matched: {:?}", g.angles),
        Err(e) => println!("all-plus: {e}"),
    }
    Ok(())
}
