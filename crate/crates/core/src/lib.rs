//! Microwave-induced dephasing of doubly excited Rydberg spin waves.
//!
//! A Ramsey 2π cycle (π/2 pulse, free interval, 3π/2 pulse) returns any lone
//! excitation to its initial state, while atom pairs pick up a
//! separation-dependent dipole-dipole phase. Averaged over a random frozen
//! gas, the pair phases wash out the two-excitation component of a stored
//! spin wave and drive `g2` of the retrieved light below its initial value.
//!
//! Units throughout: μm, μs, rad/μs with ħ = 1. `C3` is in rad·μm³/μs.
//!
//! ```
//! use ryddephase::correlation::{g2_from_amplitudes, AmplitudeSet};
//! use num_complex::Complex64;
//!
//! let amps = AmplitudeSet::from_fn(50, |_, _| Complex64::new(1.0, 0.0));
//! let p = g2_from_amplitudes(&amps);
//! assert!((p.g2 - std::f64::consts::E / 4.0).abs() < 0.02);
//! ```
//!
//! ## Examples
//!
//! One per capability, `cargo run --release --example <name>`:
//!
//! - **`ensemble_sampling`** - random positions and pair geometry
//! - **`multichannel_pair`** - one pair: toy model vs 16/36-state Hamiltonians
//! - **`g2_trace`** - averaged `g2` versus free interval
//! - **`n_scaling`** - minimum position under `C3 ~ n^4`
//! - **`multi_cycle`** - four-cycle decay against `exp(-T/tau)`
//! - **`oracle_check`** - large-N assembly vs the exact small-N sum
//! - **`entanglement`** - two-spin-wave fidelity versus interval
//! - **`phase_matching`** - grating periods and motional coherence

pub mod angular;
pub mod atomdata;
pub mod cli;
pub mod correlation;
pub mod ensemble;
pub mod error;
pub mod pairdyn;
pub mod phasematch;
pub mod protocol;
pub mod summation;

pub use error::{Error, Result};
