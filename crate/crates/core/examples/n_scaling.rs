//! Position of the `g2` minimum for several principal quantum numbers. With
//! `C3 ~ n^4` and the same atom positions, the curves are exact time
//! rescalings of one another.
//!
//! `cargo run --release --example n_scaling`

use ryddephase::angular::HalfInt;
use ryddephase::atomdata::{c3_of, InteractionModel, MicrowaveSpec, Polarization, PulseModel, RydbergChannel, POPULATED_M};
use ryddephase::correlation::g2_trace;
use ryddephase::ensemble::EnsembleSpec;
use ryddephase::pairdyn::{CycleSpec, Mode};
use ryddephase::protocol::make_schedule;

fn main() -> ryddephase::Result<()> {
    let ensemble = EnsembleSpec::new(100, 60.0, 1)?;
    let model = InteractionModel::new(47_000.0, 60, 4.0)?;
    let mw = MicrowaveSpec::from_rabi_per_second(1e7, Polarization::Pi, PulseModel::Instantaneous)?;
    let grid: Vec<f64> = (1..=400).map(|k| 0.05 * f64::from(k)).collect();

    let mut reference = None;
    println!("{:>4} {:>12} {:>10} {:>9} {:>12}", "n", "C3", "t_min_us", "g2_min", "(n/60)^4");
    for n in [60, 79, 100] {
        let c3 = c3_of(n, &model);
        let channel = RydbergChannel::dressed(n, n, HalfInt::HALF, POPULATED_M, Polarization::Pi, c3)?;
        let schedule = make_schedule(vec![CycleSpec::new(channel, 0.0, mw)?])?;
        let trace = g2_trace(&ensemble, &schedule, &grid, Mode::Analytic, 10)?;
        let k = trace.argmin();
        let t_min = grid[k];
        let base = *reference.get_or_insert(t_min);
        println!(
            "{n:>4} {c3:>12.4e} {t_min:>10.2} {:>9.4} {:>12.3}  (observed {:.3})",
            trace.summary[k].g2_mean,
            (f64::from(n) / 60.0).powi(4),
            base / t_min
        );
    }
    Ok(())
}
