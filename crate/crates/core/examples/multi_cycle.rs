//! Repeated Ramsey cycles through four different p-levels. Each cycle draws
//! fresh pair phases, so `g2` keeps falling, roughly exponentially in the
//! elapsed time.
//!
//! `cargo run --release --example multi_cycle`

use ryddephase::angular::HalfInt;
use ryddephase::atomdata::{c3_of, InteractionModel, MicrowaveSpec, Polarization, PulseModel, RydbergChannel, POPULATED_M};
use ryddephase::correlation::multi_cycle_trace;
use ryddephase::ensemble::EnsembleSpec;
use ryddephase::pairdyn::{CycleSpec, Mode};
use ryddephase::protocol::{decay_reference, make_schedule, single_excitation_amplitude};

fn main() -> ryddephase::Result<()> {
    let ensemble = EnsembleSpec::new(100, 60.0, 1)?;
    let c3 = c3_of(100, &InteractionModel::new(47_000.0, 60, 4.0)?);
    let mw = MicrowaveSpec::from_rabi_per_second(1e7, Polarization::Pi, PulseModel::Instantaneous)?;
    let cycles = [(100, HalfInt::HALF), (99, HalfInt::HALF), (100, HalfInt::THREE_HALVES), (99, HalfInt::THREE_HALVES)]
        .into_iter()
        .map(|(p, j)| CycleSpec::new(RydbergChannel::dressed(100, p, j, POPULATED_M, Polarization::Pi, c3)?, 1.0, mw))
        .collect::<ryddephase::Result<Vec<_>>>()?;
    let schedule = make_schedule(cycles)?;
    let tau = schedule.cycles()[0].duration();

    let trace = multi_cycle_trace(&ensemble, &schedule, Mode::Analytic, 50)?;
    let g0 = trace.summary[0].g2_mean;
    println!("{:>6} {:>8} {:>10} {:>14}", "cycle", "T_us", "g2", "g2(0)e^-T/tau");
    for (q, s) in trace.summary.iter().enumerate() {
        println!("{q:>6} {:>8.3} {:>10.5} {:>14.5}", s.time, s.g2_mean, g0 * decay_reference(tau, s.time));
    }
    let lone = single_excitation_amplitude(&schedule)?;
    println!("\nlone excitation after all cycles: {lone:.3e}");
    Ok(())
}
