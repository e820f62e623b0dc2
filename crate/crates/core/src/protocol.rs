//! Ramsey cycle schedules, the exponential reference decay, and the
//! two-spin-wave entanglement observables.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::atomdata::Level;
use crate::correlation::validate_grid;
use crate::ensemble::{sample_realization, EnsembleGeometry, EnsembleSpec};
use crate::error::{Error, Result};
use crate::pairdyn::{single_atom_cycle_amplitude, single_channel_phase, CycleSpec};
use crate::summation::{ComplexSum, NeumaierSum};

/// A validated sequence of Ramsey cycles on one target s-level, each
/// dressing a different p fine-structure level.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleSchedule {
    cycles: Vec<CycleSpec>,
}

impl CycleSchedule {
    pub fn cycles(&self) -> &[CycleSpec] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn target(&self) -> Level {
        self.cycles[0].channel().s_level()
    }

    /// `sum_q (delta_t_q + 2pi / rabi_q)`, in us.
    pub fn total_time(&self) -> f64 {
        self.cycles.iter().map(CycleSpec::duration).sum()
    }

    /// End time of each cycle.
    pub fn cycle_end_times(&self) -> Vec<f64> {
        self.cycles
            .iter()
            .scan(0.0, |t, c| {
                *t += c.duration();
                Some(*t)
            })
            .collect()
    }

    /// Same schedule with every free interval set to `delta_t`.
    pub fn with_delta_t(&self, delta_t: f64) -> Result<Self> {
        let cycles = self.cycles.iter().map(|c| c.with_delta_t(delta_t)).collect::<Result<_>>()?;
        Ok(CycleSchedule { cycles })
    }

    /// Leading `count` cycles.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        make_schedule(self.cycles[..count.min(self.cycles.len())].to_vec())
    }
}

pub fn make_schedule(cycles: Vec<CycleSpec>) -> Result<CycleSchedule> {
    let Some(first) = cycles.first() else {
        return Err(Error::InvalidParameter { name: "schedule", reason: "no cycles".into() });
    };
    let target = first.channel().s_level();
    for (index, cycle) in cycles.iter().enumerate() {
        let s = cycle.channel().s_level();
        if s != target {
            return Err(Error::MixedTarget { index, expected: target.to_string(), found: s.to_string() });
        }
    }
    for (second, later) in cycles.iter().enumerate() {
        let lp = later.channel().p_level();
        if let Some(first) = cycles[..second].iter().position(|earlier| {
            let ep = earlier.channel().p_level();
            ep.n() == lp.n() && ep.j() == lp.j()
        }) {
            return Err(Error::DuplicatePLevel {
                first,
                second,
                level: format!("{}p_{}", lp.n(), lp.j()),
            });
        }
    }
    Ok(CycleSchedule { cycles })
}

/// `exp(-t / tau)`.
pub fn decay_reference(tau: f64, t: f64) -> f64 {
    assert!(tau > 0.0, "decay constant must be positive");
    (-t / tau).exp()
}

/// Survival amplitude of a lone excitation through every cycle of the
/// schedule, frame phase removed.
pub fn single_excitation_amplitude(schedule: &CycleSchedule) -> Result<Complex64> {
    schedule
        .cycles()
        .iter()
        .try_fold(Complex64::new(1.0, 0.0), |acc, c| Ok(acc * single_atom_cycle_amplitude(c)?))
}

/// Two spin waves in `(n+1)s` and `ns`, dressed to `np_1/2` and `np_3/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntangleSpec {
    pub n: u32,
    /// `C3'` of `(n+1)s <-> np_1/2`.
    pub c3_upper: f64,
    /// `C3''` of `ns <-> np_3/2`.
    pub c3_lower: f64,
    pub delta_t: f64,
}

impl EntangleSpec {
    pub fn new(n: u32, c3_upper: f64, c3_lower: f64, delta_t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter { name: "n", reason: format!("need n >= 2, got {n}") });
        }
        for (name, value) in [("c3_upper", c3_upper), ("c3_lower", c3_lower)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, reason: format!("must be positive, got {value}") });
            }
        }
        if !(delta_t.is_finite() && delta_t >= 0.0) {
            return Err(Error::InvalidParameter { name: "delta_t", reason: format!("must be >= 0, got {delta_t}") });
        }
        Ok(EntangleSpec { n, c3_upper, c3_lower, delta_t })
    }

    pub fn with_delta_t(self, delta_t: f64) -> Result<Self> {
        EntangleSpec::new(self.n, self.c3_upper, self.c3_lower, delta_t)
    }
}

/// Per-pair phases `(phi', phi)` accumulated during the interval, in
/// ascending pair order.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglePhases {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

pub fn entangle_amplitudes(geometry: &EnsembleGeometry, spec: &EntangleSpec) -> Result<EntanglePhases> {
    let pairs: Vec<(usize, usize)> = geometry.pairs().collect();
    let phases: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(mu, nu)| {
            let r = geometry.pair_geometry(mu, nu)?.separation;
            Ok((
                single_channel_phase(spec.c3_upper, r, spec.delta_t),
                single_channel_phase(spec.c3_lower, r, spec.delta_t),
            ))
        })
        .collect::<Result<_>>()?;
    let (upper, lower) = phases.into_iter().unzip();
    Ok(EntanglePhases { upper, lower })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntangleFidelity {
    pub fidelity: f64,
    pub abs_m1: f64,
    pub abs_m2: f64,
}

/// Projection of the phase-matched two-excitation state onto
/// `(S+_{n+1} S+_n - P+_{1/2} P+_{3/2})|0> / sqrt 2`, where the exchange
/// terms survive only through the mean coherences `m = <e^{i phi}>`:
/// `F = 2 / (2 + |m1|^2 + |m2|^2)`.
pub fn entangle_fidelity(phases: &EntanglePhases) -> Result<EntangleFidelity> {
    if phases.upper.is_empty() || phases.upper.len() != phases.lower.len() {
        return Err(Error::InvalidParameter {
            name: "phases",
            reason: format!("need equal, nonempty pair sets ({} vs {})", phases.upper.len(), phases.lower.len()),
        });
    }
    let mean_coherence = |values: &[f64]| {
        let sum: ComplexSum = values.iter().map(|&phi| Complex64::from_polar(1.0, phi)).collect();
        sum.value() / values.len() as f64
    };
    let m1 = mean_coherence(&phases.upper).norm();
    let m2 = mean_coherence(&phases.lower).norm();
    Ok(EntangleFidelity { fidelity: 2.0 / (2.0 + m1 * m1 + m2 * m2), abs_m1: m1, abs_m2: m2 })
}

/// Configuration-averaged fidelity and coherence magnitudes at one interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntanglePoint {
    pub time: f64,
    pub fidelity: f64,
    pub abs_m1: f64,
    pub abs_m2: f64,
}

/// Entanglement observables versus interval, averaged over realizations
/// drawn as in the `g2` traces.
pub fn entangle_trace(
    ensemble: &EnsembleSpec,
    spec: &EntangleSpec,
    grid: &[f64],
    realizations: usize,
) -> Result<Vec<EntanglePoint>> {
    validate_grid(grid)?;
    if realizations == 0 {
        return Err(Error::InvalidParameter { name: "realizations", reason: "need at least one".into() });
    }
    let per_realization = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let geometry = sample_realization(ensemble, r as u64)?;
            grid.iter()
                .map(|&dt| entangle_fidelity(&entangle_amplitudes(&geometry, &spec.with_delta_t(dt)?)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(grid
        .iter()
        .enumerate()
        .map(|(t, &time)| {
            let mean = |pick: fn(&EntangleFidelity) -> f64| {
                per_realization.iter().map(|r| pick(&r[t])).collect::<NeumaierSum>().value() / realizations as f64
            };
            EntanglePoint { time, fidelity: mean(|f| f.fidelity), abs_m1: mean(|f| f.abs_m1), abs_m2: mean(|f| f.abs_m2) }
        })
        .collect())
}

pub fn write_entangle_csv<W: std::io::Write>(points: &[EntanglePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t_us,F,abs_m1,abs_m2")?;
    for p in points {
        writeln!(out, "{},{},{},{}", p.time, p.fidelity, p.abs_m1, p.abs_m2)?;
    }
    Ok(())
}
