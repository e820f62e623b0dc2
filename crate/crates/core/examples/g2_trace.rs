//! Configuration-averaged `g2` after one Ramsey cycle versus the free
//! interval: the e/4 start, the transient dip and the relaxation towards
//! the dephased asymptote.
//!
//! `cargo run --release --example g2_trace`

use ryddephase::angular::HalfInt;
use ryddephase::atomdata::{c3_of, InteractionModel, MicrowaveSpec, Polarization, PulseModel, RydbergChannel, POPULATED_M};
use ryddephase::correlation::{g2_asymptote, g2_trace, g2_zero};
use ryddephase::ensemble::EnsembleSpec;
use ryddephase::pairdyn::{CycleSpec, Mode};
use ryddephase::protocol::make_schedule;

fn main() -> ryddephase::Result<()> {
    let ensemble = EnsembleSpec::new(100, 60.0, 1)?;
    let c3 = c3_of(100, &InteractionModel::new(47_000.0, 60, 4.0)?);
    let channel = RydbergChannel::dressed(100, 100, HalfInt::HALF, POPULATED_M, Polarization::Pi, c3)?;
    let mw = MicrowaveSpec::from_rabi_per_second(1e7, Polarization::Pi, PulseModel::Instantaneous)?;
    let schedule = make_schedule(vec![CycleSpec::new(channel, 0.0, mw)?])?;

    let grid: Vec<f64> = (0..=40).map(|k| 0.1 * f64::from(k)).collect();
    let trace = g2_trace(&ensemble, &schedule, &grid, Mode::Analytic, 20)?;

    println!("C3 = {c3:.4e} rad um^3/us, N = 100, L = 60 um, 20 realizations");
    println!("{:>6} {:>9} {:>9}", "dt_us", "g2", "stderr");
    for s in &trace.summary {
        println!("{:>6.2} {:>9.5} {:>9.5}", s.time, s.g2_mean, s.g2_stderr);
    }
    let k = trace.argmin();
    println!("\ng2(0) limit {:.5}, dephased limit {:.5}", g2_zero(), g2_asymptote());
    println!("minimum {:.5} at dt = {:.2} us", trace.summary[k].g2_mean, grid[k]);
    Ok(())
}
