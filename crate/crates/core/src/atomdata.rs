//! Rydberg level bookkeeping, interaction strengths and microwave coupling.
//!
//! Units throughout the crate: lengths in um, times in us, angular
//! frequencies in rad/us and hbar = 1, so `C3` carries rad/us * um^3.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angular::{clebsch_gordan, HalfInt};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orbital {
    S,
    P,
}

impl Orbital {
    pub fn l(self) -> i32 {
        match self {
            Orbital::S => 0,
            Orbital::P => 1,
        }
    }
}

/// A single Rydberg sublevel `|n l_j m>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Level {
    n: u32,
    l: Orbital,
    j: HalfInt,
    m: HalfInt,
}

impl Level {
    pub fn new(n: u32, l: Orbital, j: HalfInt, m: HalfInt) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLevel("n must be >= 1".into()));
        }
        if n as i32 <= l.l() {
            return Err(Error::InvalidLevel(format!("n = {n} cannot host l = {}", l.l())));
        }
        if !j.is_half_odd() || !m.is_half_odd() {
            return Err(Error::InvalidLevel(format!("j = {j}, m = {m} must be half-odd")));
        }
        let allowed_j = match l {
            Orbital::S => j == HalfInt::HALF,
            Orbital::P => j == HalfInt::HALF || j == HalfInt::THREE_HALVES,
        };
        if !allowed_j {
            return Err(Error::InvalidLevel(format!("j = {j} not allowed for {l:?}")));
        }
        if m.doubled().abs() > j.doubled() {
            return Err(Error::InvalidLevel(format!("|m| = {m} exceeds j = {j}")));
        }
        Ok(Level { n, l, j, m })
    }

    /// `|n s_1/2 m>`.
    pub fn s(n: u32, m: HalfInt) -> Result<Self> {
        Level::new(n, Orbital::S, HalfInt::HALF, m)
    }

    /// `|n p_j m>`.
    pub fn p(n: u32, j: HalfInt, m: HalfInt) -> Result<Self> {
        Level::new(n, Orbital::P, j, m)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> Orbital {
        self.l
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    /// Same fine-structure level, different projection.
    pub fn with_m(&self, m: HalfInt) -> Result<Self> {
        Level::new(self.n, self.l, self.j, m)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = match self.l {
            Orbital::S => 's',
            Orbital::P => 'p',
        };
        write!(f, "{}{}_{} m={}", self.n, l, self.j, self.m)
    }
}

/// A target s-level dressed towards one p fine-structure level.
///
/// `s_level.m` is the laser-populated Zeeman state and `p_level.m` the
/// sublevel it is microwave-coupled to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RydbergChannel {
    s_level: Level,
    p_level: Level,
    c3: f64,
}

impl RydbergChannel {
    pub fn new(s_level: Level, p_level: Level, c3: f64) -> Result<Self> {
        if s_level.l() != Orbital::S || p_level.l() != Orbital::P {
            return Err(Error::InvalidChannel(format!(
                "expected an s and a p level, got {s_level} and {p_level}"
            )));
        }
        if !(c3.is_finite() && c3 > 0.0) {
            return Err(Error::InvalidChannel(format!("C3 must be positive, got {c3}")));
        }
        Ok(RydbergChannel { s_level, p_level, c3 })
    }

    /// Channel `ns_1/2(m0) <-> n'p_j(m0 + dm)` for a given polarization.
    pub fn dressed(
        n: u32,
        p_n: u32,
        j: HalfInt,
        m0: HalfInt,
        polarization: Polarization,
        c3: f64,
    ) -> Result<Self> {
        let s = Level::s(n, m0)?;
        let p = Level::p(p_n, j, m0 + HalfInt::from(polarization.delta_m()))?;
        RydbergChannel::new(s, p, c3)
    }

    pub fn s_level(&self) -> Level {
        self.s_level
    }

    pub fn p_level(&self) -> Level {
        self.p_level
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    /// Number of single-atom states: two s sublevels plus `2j + 1` p sublevels.
    pub fn single_atom_dimension(&self) -> usize {
        2 + self.p_level.j().multiplicity()
    }
}

/// Number of two-atom product states spanned by a channel.
pub fn pair_dimension(channel: &RydbergChannel) -> usize {
    let d = channel.single_atom_dimension();
    d * d
}

/// Power-law dependence of the resonant coupling on the principal quantum number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionModel {
    reference_c3: f64,
    reference_n: u32,
    #[serde(default = "default_exponent")]
    scaling_exponent: f64,
}

fn default_exponent() -> f64 {
    4.0
}

impl InteractionModel {
    pub fn new(reference_c3: f64, reference_n: u32, scaling_exponent: f64) -> Result<Self> {
        if !(reference_c3.is_finite() && reference_c3 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "reference_c3",
                reason: format!("must be positive, got {reference_c3}"),
            });
        }
        if reference_n == 0 {
            return Err(Error::InvalidParameter {
                name: "reference_n",
                reason: "must be >= 1".into(),
            });
        }
        if !scaling_exponent.is_finite() {
            return Err(Error::InvalidParameter {
                name: "scaling_exponent",
                reason: "must be finite".into(),
            });
        }
        Ok(InteractionModel { reference_c3, reference_n, scaling_exponent })
    }

    /// Re-runs constructor validation, for values obtained through serde.
    pub fn validated(self) -> Result<Self> {
        InteractionModel::new(self.reference_c3, self.reference_n, self.scaling_exponent)
    }

    pub fn reference_c3(&self) -> f64 {
        self.reference_c3
    }

    pub fn reference_n(&self) -> u32 {
        self.reference_n
    }

    pub fn scaling_exponent(&self) -> f64 {
        self.scaling_exponent
    }
}

/// `C3(n) = C3_ref * (n / n_ref)^k`.
pub fn c3_of(n: u32, model: &InteractionModel) -> f64 {
    assert!(n >= 1, "principal quantum number must be >= 1");
    if n == model.reference_n {
        return model.reference_c3;
    }
    let ratio = f64::from(n) / f64::from(model.reference_n);
    model.reference_c3 * ratio.powf(model.scaling_exponent)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    #[default]
    Pi,
    SigmaPlus,
    SigmaMinus,
}

impl Polarization {
    pub fn delta_m(self) -> i32 {
        match self {
            Polarization::Pi => 0,
            Polarization::SigmaPlus => 1,
            Polarization::SigmaMinus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseModel {
    /// Ideal rotations; interactions are switched off during the pulses.
    #[default]
    Instantaneous,
    /// Pulses of duration `area / rabi` with interactions acting throughout.
    FiniteDuration,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MicrowaveSpec {
    rabi: f64,
    polarization: Polarization,
    pulse_model: PulseModel,
}

impl MicrowaveSpec {
    /// `rabi` in rad/us.
    pub fn new(rabi: f64, polarization: Polarization, pulse_model: PulseModel) -> Result<Self> {
        if !(rabi.is_finite() && rabi > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rabi",
                reason: format!("must be positive, got {rabi}"),
            });
        }
        Ok(MicrowaveSpec { rabi, polarization, pulse_model })
    }

    /// Convenience constructor taking the Rabi frequency in rad/s.
    pub fn from_rabi_per_second(
        rabi_per_s: f64,
        polarization: Polarization,
        pulse_model: PulseModel,
    ) -> Result<Self> {
        MicrowaveSpec::new(rabi_per_s * 1e-6, polarization, pulse_model)
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn pulse_model(&self) -> PulseModel {
        self.pulse_model
    }

    pub fn with_pulse_model(mut self, pulse_model: PulseModel) -> Self {
        self.pulse_model = pulse_model;
        self
    }

    pub fn with_rabi(self, rabi: f64) -> Result<Self> {
        MicrowaveSpec::new(rabi, self.polarization, self.pulse_model)
    }

    /// Duration of a full single-atom 2pi rotation, in us.
    pub fn two_pi_time(&self) -> f64 {
        std::f64::consts::TAU / self.rabi
    }
}

/// Default laser-populated Zeeman state.
pub const POPULATED_M: HalfInt = HalfInt::HALF;

/// Microwave coupling weight of `s -> p` for the given polarization,
/// normalized so the transition out of `m0 = +1/2` has weight 1.
pub fn coupling_weight(s: &Level, p: &Level, polarization: Polarization) -> f64 {
    coupling_weight_from(s, p, polarization, POPULATED_M)
}

/// As [`coupling_weight`] with an explicit populated projection `m0`.
/// Returns 0 for forbidden transitions and when the reference transition
/// itself is forbidden.
pub fn coupling_weight_from(s: &Level, p: &Level, polarization: Polarization, m0: HalfInt) -> f64 {
    if s.l() != Orbital::S || p.l() != Orbital::P {
        return 0.0;
    }
    let q = HalfInt::from(polarization.delta_m());
    if p.m() - s.m() != q {
        return 0.0;
    }
    let reference = dipole_cg(p.j(), m0, q);
    if reference == 0.0 {
        return 0.0;
    }
    dipole_cg(p.j(), s.m(), q) / reference
}

/// `<1/2 m; 1 q | j m+q>`, the angular part of an `s_1/2 -> p_j` dipole element.
pub(crate) fn dipole_cg(j: HalfInt, m: HalfInt, q: HalfInt) -> f64 {
    clebsch_gordan(HalfInt::HALF, m, HalfInt::from(1), q, j, m + q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c3_identity_and_scaling() {
        let model = InteractionModel::new(3.5, 60, 4.0).unwrap();
        assert_eq!(c3_of(60, &model), 3.5);
        let ratio = c3_of(100, &model) / 3.5;
        assert!((ratio - 7.716_049_382_716_05).abs() < 1e-12);
        let flat = InteractionModel::new(3.5, 60, 0.0).unwrap();
        assert_eq!(c3_of(17, &flat), 3.5);
    }

    #[test]
    fn c3_homogeneity() {
        let model = InteractionModel::new(1.25, 10, 4.0).unwrap();
        for n in 1..40u32 {
            for k in 2..5u32 {
                let lhs = c3_of(k * n, &model);
                let rhs = f64::from(k).powi(4) * c3_of(n, &model);
                assert!(((lhs - rhs) / rhs).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn interaction_model_rejects_bad_inputs() {
        assert!(InteractionModel::new(0.0, 60, 4.0).is_err());
        assert!(InteractionModel::new(-1.0, 60, 4.0).is_err());
        assert!(InteractionModel::new(1.0, 0, 4.0).is_err());
    }

    #[test]
    fn pair_dimensions_match_channel_counts() {
        let half = RydbergChannel::dressed(100, 100, HalfInt::HALF, POPULATED_M, Polarization::Pi, 1.0)
            .unwrap();
        let three = RydbergChannel::dressed(100, 99, HalfInt::THREE_HALVES, POPULATED_M, Polarization::Pi, 1.0)
            .unwrap();
        assert_eq!(pair_dimension(&half), 16);
        assert_eq!(pair_dimension(&three), 36);
        // j = 5/2 is not a p level, but the counting rule extends to it
        let d = 2 + HalfInt::from_doubled(5).multiplicity();
        assert_eq!(d * d, 64);
    }

    #[test]
    fn level_invariants() {
        assert!(Level::s(60, HalfInt::HALF).is_ok());
        assert!(Level::new(60, Orbital::S, HalfInt::THREE_HALVES, HalfInt::HALF).is_err());
        assert!(Level::p(60, HalfInt::HALF, HalfInt::from_doubled(3)).is_err());
        assert!(Level::p(60, HalfInt::THREE_HALVES, HalfInt::from(1)).is_err());
        assert!(Level::s(0, HalfInt::HALF).is_err());
        assert!(RydbergChannel::new(
            Level::s(60, HalfInt::HALF).unwrap(),
            Level::p(60, HalfInt::HALF, HalfInt::HALF).unwrap(),
            0.0
        )
        .is_err());
    }

    #[test]
    fn microwave_units() {
        let mw = MicrowaveSpec::from_rabi_per_second(1e7, Polarization::Pi, PulseModel::Instantaneous)
            .unwrap();
        assert!((mw.rabi() - 10.0).abs() < 1e-12);
        assert!((mw.two_pi_time() - 0.628_318_530_717_958_6).abs() < 1e-12);
        assert!(MicrowaveSpec::new(0.0, Polarization::Pi, PulseModel::Instantaneous).is_err());
    }

    #[test]
    fn populated_transition_has_unit_weight() {
        for pol in [Polarization::Pi, Polarization::SigmaPlus, Polarization::SigmaMinus] {
            let s = Level::s(80, POPULATED_M).unwrap();
            let p = Level::p(80, HalfInt::THREE_HALVES, POPULATED_M + HalfInt::from(pol.delta_m()))
                .unwrap();
            assert!((coupling_weight(&s, &p, pol) - 1.0).abs() < 1e-14, "{pol:?}");
        }
    }

    #[test]
    fn selection_rule_exhaustive() {
        let pols = [Polarization::Pi, Polarization::SigmaPlus, Polarization::SigmaMinus];
        for j in [HalfInt::HALF, HalfInt::THREE_HALVES] {
            for ms in HalfInt::HALF.projections() {
                for mp in j.projections() {
                    let s = Level::s(70, ms).unwrap();
                    let p = Level::p(70, j, mp).unwrap();
                    for pol in pols {
                        if (mp - ms).doubled() != 2 * pol.delta_m() {
                            assert_eq!(coupling_weight(&s, &p, pol), 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn stretched_vs_inner_sigma_weights() {
        // sigma+ into p_3/2: |1/2,-1/2> -> |3/2,1/2> relative to |1/2,1/2> -> |3/2,3/2>
        // is CG ratio sqrt(1/3) / 1.
        let pol = Polarization::SigmaPlus;
        let s_lo = Level::s(90, HalfInt::from_doubled(-1)).unwrap();
        let p_lo = Level::p(90, HalfInt::THREE_HALVES, HalfInt::HALF).unwrap();
        assert!((coupling_weight(&s_lo, &p_lo, pol) - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn forbidden_reference_transition_yields_zero() {
        // sigma+ from m0 = +1/2 into p_1/2 would need m = 3/2
        let s = Level::s(90, HalfInt::from_doubled(-1)).unwrap();
        let p = Level::p(90, HalfInt::HALF, HalfInt::HALF).unwrap();
        assert_eq!(coupling_weight(&s, &p, Polarization::SigmaPlus), 0.0);
    }
}
