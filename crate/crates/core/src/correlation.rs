//! Second-order correlation of the phase-matched spin wave.
//!
//! The initial state is the unit-mean coherent spin-wave state truncated at
//! two excitations, `c_a = 1/sqrt(e a!)` for `a <= 2`. After the Ramsey
//! schedule each doubly excited pair `(mu, nu)` keeps a survival amplitude
//! `A_mu_nu`, and
//!
//! ```text
//! f = |N^-2 sum_mu sum_{nu != mu} A|^2
//! h = N^-3 sum_mu |sum_{nu != mu} A|^2
//! g2 = 4 g2(0) f / (1 + h)^2,   g2(0) = e/4
//! ```
//!
//! [`brute_force_g2`] evaluates the same correlator directly on the explicit
//! state vector without the large-N simplification.

use std::collections::HashMap;
use std::f64::consts::E;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{sample_realization, EnsembleGeometry, EnsembleSpec, Point};
use crate::error::{Error, Result};
use crate::pairdyn::{cycle_kernel, CycleKernel, Mode};
use crate::protocol::CycleSchedule;
use crate::summation::{mean_stderr, ComplexSum, NeumaierSum};

/// Largest ensemble accepted by [`brute_force_g2`].
pub const BRUTE_FORCE_MAX_ATOMS: usize = 10;

/// Truncated coherent-state amplitude `c_alpha`.
pub fn coherent_amplitude(alpha: u32) -> f64 {
    match alpha {
        0 | 1 => (1.0 / E).sqrt(),
        2 => (1.0 / (2.0 * E)).sqrt(),
        _ => 0.0,
    }
}

/// `g2` of the truncated coherent state, `e/4`.
pub fn g2_zero() -> f64 {
    E / 4.0
}

/// Random-phase limit `g2(0) * 16/25`.
pub fn g2_asymptote() -> f64 {
    g2_zero() * 16.0 / 25.0
}

/// Symmetric pair amplitudes `A_mu_nu = A_nu_mu`, stored for `mu < nu`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeSet {
    n_atoms: usize,
    upper: Vec<Complex64>,
}

fn pair_index(n: usize, mu: usize, nu: usize) -> usize {
    debug_assert!(mu < nu && nu < n);
    mu * n - mu * (mu + 1) / 2 + (nu - mu - 1)
}

impl AmplitudeSet {
    /// `f(mu, nu)` is called once per unordered pair with `mu < nu`.
    pub fn from_fn(n_atoms: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut upper = Vec::with_capacity(n_atoms * n_atoms.saturating_sub(1) / 2);
        for mu in 0..n_atoms {
            for nu in mu + 1..n_atoms {
                upper.push(f(mu, nu));
            }
        }
        AmplitudeSet { n_atoms, upper }
    }

    /// Amplitudes in ascending `(mu, nu)` order with `mu < nu`.
    pub fn from_upper(n_atoms: usize, upper: Vec<Complex64>) -> Result<Self> {
        let expected = n_atoms * n_atoms.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                reason: format!("expected {expected} pair amplitudes, got {}", upper.len()),
            });
        }
        Ok(AmplitudeSet { n_atoms, upper })
    }

    /// Builds from an arbitrary list of ordered-pair entries. Every unordered
    /// pair must appear at least once and repeated entries must agree.
    pub fn from_entries(n_atoms: usize, entries: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut slots: Vec<Option<Complex64>> = vec![None; n_atoms * n_atoms.saturating_sub(1) / 2];
        for &(a, b, value) in entries {
            if a == b || a >= n_atoms || b >= n_atoms {
                return Err(Error::InvalidParameter {
                    name: "amplitudes",
                    reason: format!("invalid pair ({a}, {b}) for {n_atoms} atoms"),
                });
            }
            let (mu, nu) = (a.min(b), a.max(b));
            let slot = &mut slots[pair_index(n_atoms, mu, nu)];
            match slot {
                Some(existing) if (*existing - value).norm() > 1e-12 => {
                    return Err(Error::AsymmetricPair(mu, nu));
                }
                _ => *slot = Some(value),
            }
        }
        let mut upper = Vec::with_capacity(slots.len());
        let mut k = 0;
        for mu in 0..n_atoms {
            for nu in mu + 1..n_atoms {
                upper.push(slots[k].ok_or(Error::MissingPair(mu, nu))?);
                k += 1;
            }
        }
        Ok(AmplitudeSet { n_atoms, upper })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn get(&self, mu: usize, nu: usize) -> Complex64 {
        assert_ne!(mu, nu, "no self-pair amplitude");
        let (a, b) = (mu.min(nu), mu.max(nu));
        self.upper[pair_index(self.n_atoms, a, b)]
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    /// Writes `mu,nu,R_um,theta_rad,re_A,im_A` rows.
    pub fn write_csv<W: Write>(&self, geometry: &EnsembleGeometry, mut out: W) -> Result<()> {
        writeln!(out, "mu,nu,R_um,theta_rad,re_A,im_A")?;
        for (mu, nu) in geometry.pairs() {
            let g = geometry.pair_geometry(mu, nu)?;
            let a = self.get(mu, nu);
            writeln!(out, "{mu},{nu},{},{},{},{}", g.separation, g.polar_angle, a.re, a.im)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct G2Point {
    pub time: f64,
    pub g2: f64,
    pub f: f64,
    pub h: f64,
}

impl G2Point {
    pub fn from_f_h(time: f64, f: f64, h: f64) -> Self {
        G2Point { time, g2: 4.0 * g2_zero() * f / (1.0 + h).powi(2), f, h }
    }
}

/// Rows of `sum_{nu != mu} A_mu_nu`. One pass over the upper triangle feeds
/// every row its terms in ascending `nu`.
fn row_sums(amps: &AmplitudeSet) -> Vec<Complex64> {
    let n = amps.n_atoms;
    let mut rows = vec![ComplexSum::default(); n];
    let mut values = amps.upper.iter();
    for mu in 0..n {
        for nu in mu + 1..n {
            let a = *values.next().expect("upper triangle has n(n-1)/2 entries");
            rows[mu].add(a);
            rows[nu].add(a);
        }
    }
    rows.iter().map(ComplexSum::value).collect()
}

pub fn g2_from_amplitudes(amps: &AmplitudeSet) -> G2Point {
    let n = amps.n_atoms as f64;
    let rows = row_sums(amps);
    let total = rows.iter().copied().collect::<ComplexSum>().value();
    let f = (total / (n * n)).norm_sqr();
    let h = rows.iter().map(|r| r.norm_sqr()).collect::<NeumaierSum>().value() / (n * n * n);
    G2Point::from_f_h(0.0, f, h)
}

/// Default spin-wave vector for the brute-force oracle (rad/um along z).
pub const ORACLE_WAVEVECTOR: [f64; 3] = [0.0, 0.0, std::f64::consts::TAU / 50.0];

pub fn brute_force_g2(geometry: &EnsembleGeometry, amps: &AmplitudeSet) -> Result<f64> {
    brute_force_g2_with_wavevector(geometry, amps, ORACLE_WAVEVECTOR)
}

/// State truncated at two excitations: vacuum, one atom in `s`, or an
/// `s`-excited pair. `p` components are annihilated by the spin-wave
/// operator and never enter the correlator.
#[derive(Clone, Debug)]
struct TwoExcitationState {
    vacuum: Complex64,
    singles: Vec<Complex64>,
    doubles: HashMap<(usize, usize), Complex64>,
}

impl TwoExcitationState {
    fn zero(n: usize) -> Self {
        TwoExcitationState { vacuum: Complex64::new(0.0, 0.0), singles: vec![Complex64::new(0.0, 0.0); n], doubles: HashMap::new() }
    }

    fn norm_sqr(&self) -> f64 {
        self.vacuum.norm_sqr()
            + self.singles.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + self.doubles.values().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Applies `S = N^{-1/2} sum_mu e^{-i k.r_mu} |g><s|_mu`.
    fn lower(&self, phases: &[Complex64]) -> Self {
        let n = self.singles.len();
        let scale = 1.0 / (n as f64).sqrt();
        let mut out = TwoExcitationState::zero(n);
        for (mu, c) in self.singles.iter().enumerate() {
            out.vacuum += c * phases[mu].conj() * scale;
        }
        for (&(mu, nu), c) in &self.doubles {
            out.singles[nu] += c * phases[mu].conj() * scale;
            out.singles[mu] += c * phases[nu].conj() * scale;
        }
        out
    }
}

fn dot(a: &Point, b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Direct evaluation of `<S+ S+ S S> / <S+ S>^2` on the explicit state.
pub fn brute_force_g2_with_wavevector(geometry: &EnsembleGeometry, amps: &AmplitudeSet, k0: [f64; 3]) -> Result<f64> {
    let n = geometry.len();
    if n > BRUTE_FORCE_MAX_ATOMS {
        return Err(Error::TooManyAtoms { got: n, max: BRUTE_FORCE_MAX_ATOMS });
    }
    if amps.n_atoms() != n {
        return Err(Error::InvalidParameter {
            name: "amplitudes",
            reason: format!("{} atoms in amplitude set, {n} in geometry", amps.n_atoms()),
        });
    }
    let phases: Vec<Complex64> =
        geometry.positions().iter().map(|r| Complex64::from_polar(1.0, dot(r, &k0))).collect();
    let n_pairs = (n * (n - 1) / 2) as f64;

    let mut psi = TwoExcitationState::zero(n);
    psi.vacuum = Complex64::new(coherent_amplitude(0), 0.0);
    for (mu, phase) in phases.iter().enumerate() {
        psi.singles[mu] = phase * (coherent_amplitude(1) / (n as f64).sqrt());
    }
    for (mu, nu) in geometry.pairs() {
        let value = phases[mu] * phases[nu] * amps.get(mu, nu) * (coherent_amplitude(2) / n_pairs.sqrt());
        psi.doubles.insert((mu, nu), value);
    }

    let once = psi.lower(&phases);
    let twice = once.lower(&phases);
    let occupation = once.norm_sqr();
    Ok(twice.norm_sqr() / (occupation * occupation))
}

/// Random amplitudes with `|A| <= 1`, uniform over the unit disk.
pub fn random_amplitudes<R: Rng>(n_atoms: usize, rng: &mut R) -> AmplitudeSet {
    AmplitudeSet::from_fn(n_atoms, |_, _| {
        let r = rng.gen::<f64>().sqrt();
        Complex64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
    })
}

/// Interval-independent description of every pair for a fixed schedule.
pub struct PairKernels {
    n_atoms: usize,
    kernels: Vec<Vec<CycleKernel>>,
}

impl PairKernels {
    pub fn new(geometry: &EnsembleGeometry, schedule: &CycleSchedule, mode: Mode, realization: usize) -> Result<Self> {
        let initial_m = schedule.target().m();
        let pairs: Vec<(usize, usize)> = geometry.pairs().collect();
        let kernels = pairs
            .par_iter()
            .map(|&(mu, nu)| {
                let wrap = |source: Error| Error::PairFailure { realization, mu, nu, source: Box::new(source) };
                let geom = geometry.pair_geometry(mu, nu).map_err(wrap)?;
                schedule
                    .cycles()
                    .iter()
                    .map(|cycle| cycle_kernel(&geom, cycle, mode, initial_m).map_err(wrap))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PairKernels { n_atoms: geometry.len(), kernels })
    }

    /// Amplitudes after the first `delta_ts.len()` cycles, cycle `q` lasting `delta_ts[q]`.
    pub fn amplitudes(&self, delta_ts: &[f64]) -> AmplitudeSet {
        let upper = self
            .kernels
            .iter()
            .map(|pair| {
                pair.iter()
                    .zip(delta_ts)
                    .fold(Complex64::new(1.0, 0.0), |acc, (kernel, &dt)| acc * kernel.amplitude(dt))
            })
            .collect();
        AmplitudeSet { n_atoms: self.n_atoms, upper }
    }
}

/// All pair amplitudes of one configuration after the full schedule.
pub fn schedule_amplitudes(geometry: &EnsembleGeometry, schedule: &CycleSchedule, mode: Mode) -> Result<AmplitudeSet> {
    let kernels = PairKernels::new(geometry, schedule, mode, 0)?;
    let delta_ts: Vec<f64> = schedule.cycles().iter().map(|c| c.delta_t()).collect();
    Ok(kernels.amplitudes(&delta_ts))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct G2Summary {
    pub time: f64,
    pub g2_mean: f64,
    pub g2_stderr: f64,
    pub f_mean: f64,
    pub h_mean: f64,
    pub n_realizations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct G2Trace {
    pub grid: Vec<f64>,
    /// `points[r][t]` for realization `r` and grid index `t`.
    pub points: Vec<Vec<G2Point>>,
    pub summary: Vec<G2Summary>,
}

impl G2Trace {
    pub fn from_points(grid: Vec<f64>, points: Vec<Vec<G2Point>>) -> Self {
        let summary = grid
            .iter()
            .enumerate()
            .map(|(t, &time)| {
                let column = |pick: fn(&G2Point) -> f64| points.iter().map(|r| pick(&r[t])).collect::<Vec<_>>();
                let (g2_mean, g2_stderr) = mean_stderr(&column(|p| p.g2));
                let (f_mean, _) = mean_stderr(&column(|p| p.f));
                let (h_mean, _) = mean_stderr(&column(|p| p.h));
                G2Summary { time, g2_mean, g2_stderr, f_mean, h_mean, n_realizations: points.len() }
            })
            .collect();
        G2Trace { grid, points, summary }
    }

    /// Grid index of the smallest mean `g2`.
    pub fn argmin(&self) -> usize {
        self.summary
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.g2_mean.total_cmp(&b.1.g2_mean))
            .map(|(i, _)| i)
            .expect("trace has at least one grid point")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t_us,g2_mean,g2_stderr,f_mean,h_mean,n_realizations")?;
        for s in &self.summary {
            writeln!(out, "{},{},{},{},{},{}", s.time, s.g2_mean, s.g2_stderr, s.f_mean, s.h_mean, s.n_realizations)?;
        }
        Ok(())
    }

    /// Summary columns plus per-realization arrays (`g2[r][t]`, ...).
    pub fn to_json(&self) -> serde_json::Value {
        let per = |pick: fn(&G2Point) -> f64| -> Vec<Vec<f64>> {
            self.points.iter().map(|r| r.iter().map(pick).collect()).collect()
        };
        serde_json::json!({
            "t_us": self.grid,
            "g2_mean": self.summary.iter().map(|s| s.g2_mean).collect::<Vec<_>>(),
            "g2_stderr": self.summary.iter().map(|s| s.g2_stderr).collect::<Vec<_>>(),
            "f_mean": self.summary.iter().map(|s| s.f_mean).collect::<Vec<_>>(),
            "h_mean": self.summary.iter().map(|s| s.h_mean).collect::<Vec<_>>(),
            "n_realizations": self.points.len(),
            "realizations": {
                "g2": per(|p| p.g2),
                "f": per(|p| p.f),
                "h": per(|p| p.h),
            },
        })
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter { name: "grid", reason: "no grid points".into() });
    }
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParameter { name: "grid", reason: "times must be finite and >= 0".into() });
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter { name: "grid", reason: "times must be strictly increasing".into() });
    }
    Ok(())
}

/// `g2` versus free interval for one configuration; every cycle of the
/// schedule uses the grid interval.
pub fn g2_points_for_geometry(
    geometry: &EnsembleGeometry,
    schedule: &CycleSchedule,
    grid: &[f64],
    mode: Mode,
    realization: usize,
) -> Result<Vec<G2Point>> {
    validate_grid(grid)?;
    let kernels = PairKernels::new(geometry, schedule, mode, realization)?;
    let cycles = schedule.len();
    Ok(grid
        .par_iter()
        .map(|&dt| {
            let point = g2_from_amplitudes(&kernels.amplitudes(&vec![dt; cycles]));
            G2Point { time: dt, ..point }
        })
        .collect())
}

/// Configuration-averaged `g2` versus free interval. Realization `r` samples
/// its positions from stream `r` of the ensemble seed.
pub fn g2_trace(
    ensemble: &EnsembleSpec,
    schedule: &CycleSchedule,
    grid: &[f64],
    mode: Mode,
    realizations: usize,
) -> Result<G2Trace> {
    validate_grid(grid)?;
    check_realizations(realizations)?;
    let points = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let geometry = sample_realization(ensemble, r as u64)?;
            g2_points_for_geometry(&geometry, schedule, grid, mode, r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(G2Trace::from_points(grid.to_vec(), points))
}

/// `g2` at the end of each cycle of the schedule, with `t = 0` before the
/// first cycle. Grid times are cumulative wall-clock times.
pub fn multi_cycle_trace(
    ensemble: &EnsembleSpec,
    schedule: &CycleSchedule,
    mode: Mode,
    realizations: usize,
) -> Result<G2Trace> {
    check_realizations(realizations)?;
    let mut grid = vec![0.0];
    grid.extend(schedule.cycle_end_times());
    let delta_ts: Vec<f64> = schedule.cycles().iter().map(|c| c.delta_t()).collect();
    let points = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let geometry = sample_realization(ensemble, r as u64)?;
            let kernels = PairKernels::new(&geometry, schedule, mode, r)?;
            Ok((0..=schedule.len())
                .map(|q| G2Point { time: grid[q], ..g2_from_amplitudes(&kernels.amplitudes(&delta_ts[..q])) })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(G2Trace::from_points(grid, points))
}

/// Large-N assembly checked against [`brute_force_g2`] over random amplitude sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleCase {
    pub n_atoms: usize,
    pub amplitude_sets: usize,
    pub max_rel_dev: f64,
    pub mean_rel_dev: f64,
    /// Allowed relative deviation, `3/N`.
    pub bound: f64,
}

impl OracleCase {
    pub fn passed(&self) -> bool {
        self.max_rel_dev <= self.bound
    }
}

/// Set `k` draws its positions and amplitudes from stream `k` of `seed`.
pub fn oracle_case(n_atoms: usize, amplitude_sets: usize, seed: u64, box_side: f64) -> Result<OracleCase> {
    if amplitude_sets == 0 {
        return Err(Error::InvalidParameter { name: "amplitude_sets", reason: "need at least one".into() });
    }
    let spec = EnsembleSpec::new(n_atoms, box_side, seed)?;
    let deviations = (0..amplitude_sets)
        .map(|k| {
            let mut rng = crate::ensemble::realization_rng(seed, k as u64);
            let geometry = crate::ensemble::sample_with(&spec, &mut rng)?;
            let amps = random_amplitudes(n_atoms, &mut rng);
            let exact = brute_force_g2(&geometry, &amps)?;
            let approx = g2_from_amplitudes(&amps).g2;
            Ok(((approx - exact) / exact).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean_rel_dev, _) = mean_stderr(&deviations);
    Ok(OracleCase {
        n_atoms,
        amplitude_sets,
        max_rel_dev: deviations.iter().copied().fold(0.0, f64::max),
        mean_rel_dev,
        bound: 3.0 / n_atoms as f64,
    })
}

fn check_realizations(realizations: usize) -> Result<()> {
    if realizations == 0 {
        return Err(Error::InvalidParameter { name: "realizations", reason: "need at least one".into() });
    }
    Ok(())
}
