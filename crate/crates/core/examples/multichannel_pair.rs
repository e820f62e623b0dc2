//! One atom pair through a single Ramsey cycle: scalar toy model versus the
//! full 16- and 36-state pair Hamiltonians, instantaneous and finite pulses.
//!
//! `cargo run --example multichannel_pair`

use ryddephase::angular::HalfInt;
use ryddephase::atomdata::{pair_dimension, MicrowaveSpec, Polarization, PulseModel, RydbergChannel, POPULATED_M};
use ryddephase::ensemble::PairGeometry;
use ryddephase::pairdyn::{cycle_kernel, CycleSpec, Mode};

fn main() -> ryddephase::Result<()> {
    let c3 = 3.6e5;
    let geom = PairGeometry::new(25.0, 0.7, 0.3)?;
    println!("R = 25 um, theta = 0.7 rad, C3 = {c3} rad um^3/us");

    for j in [HalfInt::HALF, HalfInt::THREE_HALVES] {
        let channel = RydbergChannel::dressed(100, 100, j, POPULATED_M, Polarization::Pi, c3)?;
        println!("\np_{j}: pair space dimension {}", pair_dimension(&channel));
        println!("{:>6} {:>22} {:>22} {:>22}", "dt_us", "analytic", "multi/instant", "multi/finite");
        let instant = MicrowaveSpec::from_rabi_per_second(1e9, Polarization::Pi, PulseModel::Instantaneous)?;
        let finite = instant.with_pulse_model(PulseModel::FiniteDuration);
        let kernels = [
            cycle_kernel(&geom, &CycleSpec::new(channel, 0.0, instant)?, Mode::Analytic, POPULATED_M)?,
            cycle_kernel(&geom, &CycleSpec::new(channel, 0.0, instant)?, Mode::Multichannel, POPULATED_M)?,
            cycle_kernel(&geom, &CycleSpec::new(channel, 0.0, finite)?, Mode::Multichannel, POPULATED_M)?,
        ];
        for k in 0..=10 {
            let dt = 0.2 * f64::from(k);
            let cells: Vec<String> = kernels
                .iter()
                .map(|kern| {
                    let a = kern.amplitude(dt);
                    format!("{:+.4}{:+.4}i |{:.3}|", a.re, a.im, a.norm())
                })
                .collect();
            println!("{dt:>6.1} {:>22} {:>22} {:>22}", cells[0], cells[1], cells[2]);
        }
    }
    Ok(())
}
