//! Survival amplitude of a doubly excited pair `|s s>` through Ramsey
//! 2pi cycles (pi/2 pulse, free interval, 3pi/2 pulse).
//!
//! Two routes are provided. The analytic route uses a scalar isotropic
//! coupling `C3 / R^3` and the closed form `e^{i phi/2} cos(phi/2)`. The
//! multichannel route builds the full pair Hamiltonian (16 or 36 states)
//! and propagates it exactly.
//!
//! Amplitudes are reported in the frame where a non-interacting pair returns
//! to `+1` after a cycle. A lone atom picks up `-1` per cycle from the 2pi
//! rotation; [`single_atom_cycle_amplitude`] removes that frame phase.

pub mod hamiltonian;
pub mod propagate;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::atomdata::{coupling_weight_from, MicrowaveSpec, PulseModel, RydbergChannel};
use crate::ensemble::PairGeometry;
use crate::error::{Error, Result};
use crate::protocol::CycleSchedule;
use hamiltonian::{build_pair_hamiltonian, single_atom_dressing, CMatrix, PairHamiltonian};
use propagate::{check_unitary, Spectral};

pub use hamiltonian::SingleAtomBasis;

const OPENING_AREA: f64 = FRAC_PI_2;
const CLOSING_AREA: f64 = 3.0 * FRAC_PI_2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Analytic,
    Multichannel,
}

/// One Ramsey cycle: dressing channel, free interval and microwave settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleSpec {
    channel: RydbergChannel,
    delta_t: f64,
    microwave: MicrowaveSpec,
}

impl CycleSpec {
    pub fn new(channel: RydbergChannel, delta_t: f64, microwave: MicrowaveSpec) -> Result<Self> {
        if !(delta_t.is_finite() && delta_t >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta_t",
                reason: format!("must be >= 0, got {delta_t}"),
            });
        }
        let s = channel.s_level();
        let p = channel.p_level();
        if (p.m() - s.m()).doubled() != 2 * microwave.polarization().delta_m() {
            return Err(Error::InvalidChannel(format!(
                "{:?} polarization cannot drive {s} -> {p}",
                microwave.polarization()
            )));
        }
        if coupling_weight_from(&s, &p, microwave.polarization(), s.m()) == 0.0 {
            return Err(Error::InvalidChannel(format!("transition {s} -> {p} is dipole forbidden")));
        }
        Ok(CycleSpec { channel, delta_t, microwave })
    }

    pub fn channel(&self) -> &RydbergChannel {
        &self.channel
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn microwave(&self) -> &MicrowaveSpec {
        &self.microwave
    }

    pub fn with_delta_t(mut self, delta_t: f64) -> Result<Self> {
        if !(delta_t.is_finite() && delta_t >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta_t",
                reason: format!("must be >= 0, got {delta_t}"),
            });
        }
        self.delta_t = delta_t;
        Ok(self)
    }

    /// Wall-clock duration `delta_t + 2pi / rabi`.
    pub fn duration(&self) -> f64 {
        self.delta_t + self.microwave.two_pi_time()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairAmplitude {
    pub mu: usize,
    pub nu: usize,
    pub value: Complex64,
}

/// Phase `C3 * delta_t / R^3` of the scalar single-channel model.
pub fn single_channel_phase(c3: f64, separation: f64, delta_t: f64) -> f64 {
    c3 / separation.powi(3) * delta_t
}

/// `e^{i phi/2} cos(phi/2)`, evaluated as `(1 + e^{i phi}) / 2`.
pub fn analytic_cycle_amplitude(phi: f64) -> Complex64 {
    (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, phi)) * 0.5
}

/// Precomputed dependence of one cycle's amplitude on its free interval:
/// `A(dt) = sum_k c_k exp(-i E_k dt)` for the multichannel route.
#[derive(Clone, Debug)]
pub enum CycleKernel {
    Analytic { rate: f64 },
    Spectral { coefficients: Vec<Complex64>, energies: Vec<f64> },
}

impl CycleKernel {
    pub fn amplitude(&self, delta_t: f64) -> Complex64 {
        match self {
            CycleKernel::Analytic { rate } => analytic_cycle_amplitude(rate * delta_t),
            CycleKernel::Spectral { coefficients, energies } => coefficients
                .iter()
                .zip(energies)
                .map(|(c, e)| c * Complex64::from_polar(1.0, -e * delta_t))
                .sum(),
        }
    }
}

pub fn cycle_kernel(geom: &PairGeometry, cycle: &CycleSpec, mode: Mode, initial_m: HalfInt) -> Result<CycleKernel> {
    match mode {
        Mode::Analytic => Ok(CycleKernel::Analytic {
            rate: single_channel_phase(cycle.channel.c3(), geom.separation, 1.0),
        }),
        Mode::Multichannel => {
            let h = build_pair_hamiltonian(geom, &cycle.channel, true, &cycle.microwave)?;
            let s = cycle.channel.s_level().with_m(initial_m)?;
            let start = h
                .index_of(&s, &s)
                .ok_or_else(|| Error::InvalidChannel(format!("{s} is not in the channel basis")))?;
            spectral_kernel(&h, start, &cycle.microwave)
        }
    }
}

fn spectral_kernel(h: &PairHamiltonian, start: usize, microwave: &MicrowaveSpec) -> Result<CycleKernel> {
    let rabi = microwave.rabi();
    let pulse_generator = match microwave.pulse_model() {
        PulseModel::Instantaneous => h.dressing_part().clone(),
        PulseModel::FiniteDuration => h.total(),
    };
    let pulses = Spectral::of(&pulse_generator);
    let opening = pulses.evolve(OPENING_AREA / rabi);
    let closing = pulses.evolve(CLOSING_AREA / rabi);
    check_unitary(&opening)?;
    check_unitary(&closing)?;

    let free = Spectral::of(h.interaction_part());
    check_unitary(free.vectors())?;
    let vectors = free.vectors();

    // left_k = <ss| closing V e_k, right_k = e_k^dagger V^dagger opening |ss>
    let left = closing.row(start) * vectors;
    let right = vectors.adjoint() * opening.column(start);
    let coefficients = left.iter().zip(right.iter()).map(|(l, r)| l * r).collect();
    Ok(CycleKernel::Spectral { coefficients, energies: free.values().iter().copied().collect() })
}

/// `<s m0, s m0| U_cycle |s m0, s m0>` from the full pair Hamiltonian.
pub fn cycle_amplitude_numeric(geom: &PairGeometry, cycle: &CycleSpec, initial_m: HalfInt) -> Result<Complex64> {
    let kernel = cycle_kernel(geom, cycle, Mode::Multichannel, initial_m)?;
    Ok(kernel.amplitude(cycle.delta_t))
}

/// Same cycle restricted to the frozen-Zeeman two-level model per atom.
pub fn reduced_cycle_amplitude(geom: &PairGeometry, cycle: &CycleSpec) -> Result<Complex64> {
    let full = build_pair_hamiltonian(geom, &cycle.channel, true, &cycle.microwave)?;
    let reduced = full.reduced(&cycle.channel);
    let s = cycle.channel.s_level();
    let start = reduced.index_of(&s, &s).expect("reduced basis keeps |s s>");
    Ok(spectral_kernel(&reduced, start, &cycle.microwave)?.amplitude(cycle.delta_t))
}

/// Phase accumulation rate of the symmetric `|s p> + |p s>` state in the
/// frozen-Zeeman model, `-<p s| V |s p>`. The analytic amplitude evaluated
/// at `rate * delta_t` is the strong-dressing limit of
/// [`reduced_cycle_amplitude`].
pub fn reduced_phase_rate(geom: &PairGeometry, channel: &RydbergChannel, microwave: &MicrowaveSpec) -> Result<f64> {
    let h = build_pair_hamiltonian(geom, channel, false, microwave)?;
    let (s, p) = (channel.s_level(), channel.p_level());
    let sp = h.index_of(&s, &p).expect("basis contains |s p>");
    let ps = h.index_of(&p, &s).expect("basis contains |p s>");
    Ok(-h.interaction_part()[(ps, sp)].re)
}

/// Product of per-cycle amplitudes; each cycle dresses a fresh p-level.
pub fn multi_cycle_amplitude(geom: &PairGeometry, schedule: &CycleSchedule, mode: Mode) -> Result<Complex64> {
    let initial_m = schedule.target().m();
    schedule.cycles().iter().try_fold(Complex64::new(1.0, 0.0), |acc, cycle| {
        let kernel = cycle_kernel(geom, cycle, mode, initial_m)?;
        Ok(acc * kernel.amplitude(cycle.delta_t))
    })
}

/// `<s m0| U_cycle |s m0>` for a lone atom, frame phase removed.
pub fn single_atom_cycle_amplitude(cycle: &CycleSpec) -> Result<Complex64> {
    let h = single_atom_dressing(&cycle.channel, &cycle.microwave);
    let basis = SingleAtomBasis::for_channel(&cycle.channel);
    let start = basis.index_of(&cycle.channel.s_level()).expect("s level in basis");
    let pulses = Spectral::of(&h);
    let rabi = cycle.microwave.rabi();
    // Microwave off and no partner during the free interval: identity.
    let u: CMatrix = pulses.evolve(CLOSING_AREA / rabi) * pulses.evolve(OPENING_AREA / rabi);
    check_unitary(&u)?;
    Ok(-u[(start, start)])
}

/// Global phase a lone atom acquires per 2pi cycle in the rotating frame.
pub fn single_atom_frame_phase() -> Complex64 {
    Complex64::from_polar(1.0, PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::{Polarization, POPULATED_M};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn channel(j: HalfInt, c3: f64) -> RydbergChannel {
        RydbergChannel::dressed(100, 100, j, POPULATED_M, Polarization::Pi, c3).unwrap()
    }

    fn cycle(j: HalfInt, c3: f64, dt: f64, rabi: f64, model: PulseModel) -> CycleSpec {
        let mw = MicrowaveSpec::new(rabi, Polarization::Pi, model).unwrap();
        CycleSpec::new(channel(j, c3), dt, mw).unwrap()
    }

    #[test]
    fn phase_arithmetic() {
        assert_eq!(single_channel_phase(1.0, 2.0, 0.0), 0.0);
        assert_eq!(single_channel_phase(1.0, 2.0, 8.0), 1.0);
        let near = single_channel_phase(3.0, 1.5, 2.0);
        let far = single_channel_phase(3.0, 3.0, 2.0);
        assert!((near / far - 8.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_amplitude_values() {
        assert_eq!(analytic_cycle_amplitude(0.0), Complex64::new(1.0, 0.0));
        assert!(analytic_cycle_amplitude(PI).norm() < 1e-15);
        let quarter = analytic_cycle_amplitude(FRAC_PI_2);
        assert!(close(quarter, Complex64::new(0.5, 0.5), 1e-15));
        assert!(close(quarter, Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4), 1e-15));
        for k in 0..50 {
            let phi = 0.37 * f64::from(k);
            let closed = Complex64::from_polar((phi / 2.0).cos(), phi / 2.0);
            assert!(close(analytic_cycle_amplitude(phi), closed, 1e-14));
        }
    }

    #[test]
    fn zero_interval_full_rotation_returns_pair() {
        let geom = PairGeometry::new(3.0, 0.8, 1.0).unwrap();
        for j in [HalfInt::HALF, HalfInt::THREE_HALVES] {
            let a = cycle_amplitude_numeric(&geom, &cycle(j, 50.0, 0.0, 10.0, PulseModel::Instantaneous), POPULATED_M)
                .unwrap();
            assert!(close(a, Complex64::new(1.0, 0.0), 1e-12), "{a}");
        }
    }

    #[test]
    fn reduced_instantaneous_matches_closed_form() {
        let geom = PairGeometry::new(4.0, 0.0, 0.0).unwrap();
        let c = cycle(HalfInt::HALF, 64.0, 0.0, 10.0, PulseModel::Instantaneous);
        let rate = reduced_phase_rate(&geom, c.channel(), c.microwave()).unwrap();
        // axis along z: 1 - 3 cos^2 = -2, so the symmetric state phase rate is +2 C3/R^3
        assert!((rate - 2.0).abs() < 1e-12);
        for k in 0..50 {
            let phi = 4.0 * PI * f64::from(k) / 49.0;
            let dt = phi / rate;
            let a = reduced_cycle_amplitude(&geom, &c.with_delta_t(dt).unwrap()).unwrap();
            assert!(close(a, analytic_cycle_amplitude(phi), 1e-12), "phi={phi}");
        }
    }

    #[test]
    fn blockade_regime_stays_bounded() {
        let geom = PairGeometry::new(1.0, 1.0, 0.5).unwrap();
        for j in [HalfInt::HALF, HalfInt::THREE_HALVES] {
            for dt in [0.0, 0.01, 0.3, 2.0] {
                let c = cycle(j, 1000.0, dt, 5.0, PulseModel::FiniteDuration);
                let a = cycle_amplitude_numeric(&geom, &c, POPULATED_M).unwrap();
                assert!(a.norm() <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn exchange_symmetry_of_amplitude() {
        let geom = PairGeometry::new(2.5, 0.9, 2.0).unwrap();
        for model in [PulseModel::Instantaneous, PulseModel::FiniteDuration] {
            let c = cycle(HalfInt::THREE_HALVES, 40.0, 0.7, 20.0, model);
            let a = cycle_amplitude_numeric(&geom, &c, POPULATED_M).unwrap();
            let b = cycle_amplitude_numeric(&geom.inverted(), &c, POPULATED_M).unwrap();
            assert!(close(a, b, 1e-12));
        }
    }

    #[test]
    fn multi_cycle_examples() {
        use crate::protocol::make_schedule;
        let geom = PairGeometry::new(2.0, 1.2, 0.0).unwrap();
        let mw = MicrowaveSpec::new(10.0, Polarization::Pi, PulseModel::Instantaneous).unwrap();
        // phi = C3 dt / R^3 = pi/2 for each cycle
        let c3 = 8.0 * FRAC_PI_2;
        let a = CycleSpec::new(channel(HalfInt::HALF, c3), 1.0, mw).unwrap();
        let b_ch = RydbergChannel::dressed(100, 99, HalfInt::HALF, POPULATED_M, Polarization::Pi, c3).unwrap();
        let b = CycleSpec::new(b_ch, 1.0, mw).unwrap();

        let one = make_schedule(vec![a]).unwrap();
        let single = multi_cycle_amplitude(&geom, &one, Mode::Analytic).unwrap();
        assert!(close(single, analytic_cycle_amplitude(FRAC_PI_2), 1e-15));

        let two = make_schedule(vec![a, b]).unwrap();
        let product = multi_cycle_amplitude(&geom, &two, Mode::Analytic).unwrap();
        assert!(close(product, Complex64::new(0.0, 0.5), 1e-15));

        let still = make_schedule(vec![a.with_delta_t(0.0).unwrap(), b.with_delta_t(0.0).unwrap()]).unwrap();
        assert_eq!(multi_cycle_amplitude(&geom, &still, Mode::Analytic).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn lone_atom_returns_after_each_cycle() {
        for j in [HalfInt::HALF, HalfInt::THREE_HALVES] {
            for model in [PulseModel::Instantaneous, PulseModel::FiniteDuration] {
                let c = cycle(j, 10.0, 0.8, 7.0, model);
                let a = single_atom_cycle_amplitude(&c).unwrap();
                assert!((1.0 - a.norm_sqr()).abs() < 1e-10);
                assert!(close(a, Complex64::new(1.0, 0.0), 1e-10));
            }
        }
        assert!(close(single_atom_frame_phase(), Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn cycle_validation() {
        let mw = MicrowaveSpec::new(10.0, Polarization::SigmaPlus, PulseModel::Instantaneous).unwrap();
        // p-level projection does not match sigma+
        assert!(CycleSpec::new(channel(HalfInt::HALF, 1.0), 1.0, mw).is_err());
        let sigma = RydbergChannel::dressed(100, 100, HalfInt::THREE_HALVES, POPULATED_M, Polarization::SigmaPlus, 1.0)
            .unwrap();
        assert!(CycleSpec::new(sigma, 1.0, mw).is_ok());
        assert!(CycleSpec::new(sigma, -1.0, mw).is_err());
        assert!((CycleSpec::new(sigma, 1.0, mw).unwrap().duration() - (1.0 + TAU / 10.0)).abs() < 1e-15);
    }
}
