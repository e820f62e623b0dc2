//! Two-atom Hamiltonian in the rotating frame of a resonant microwave field.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::angular::{clebsch_gordan, HalfInt};
use crate::atomdata::{coupling_weight_from, dipole_cg, Level, MicrowaveSpec, RydbergChannel};
use crate::ensemble::PairGeometry;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Single-atom states of a channel: `s_1/2 (m = -1/2, +1/2)` followed by
/// `p_j (m = -j..j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleAtomBasis {
    levels: Vec<Level>,
}

impl SingleAtomBasis {
    pub fn for_channel(channel: &RydbergChannel) -> Self {
        let s = channel.s_level();
        let p = channel.p_level();
        let levels = HalfInt::HALF
            .projections()
            .map(|m| s.with_m(m).expect("s projections are valid"))
            .chain(p.j().projections().map(|m| p.with_m(m).expect("p projections are valid")))
            .collect();
        SingleAtomBasis { levels }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn index_of(&self, level: &Level) -> Option<usize> {
        self.levels.iter().position(|l| l == level)
    }

    fn is_p(&self, index: usize) -> bool {
        index >= 2
    }
}

/// Spherical component `d_q` of the dipole operator on one atom, in units
/// where the pi component of the populated transition `s m0 -> p_j m0` is 1.
/// Elements obey `d_q^dagger = (-1)^q d_{-q}`.
pub fn dipole_component(channel: &RydbergChannel, q: i32) -> CMatrix {
    let basis = SingleAtomBasis::for_channel(channel);
    let j = channel.p_level().j();
    let norm = dipole_cg(j, channel.s_level().m(), HalfInt::from(0));
    let dim = basis.dim();
    let mut d = CMatrix::zeros(dim, dim);
    let qh = HalfInt::from(q);
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    for (si, s) in basis.levels()[..2].iter().enumerate() {
        for (pi, p) in basis.levels().iter().enumerate().skip(2) {
            // <p m'| d_q |s m> with m' = m + q
            if p.m() == s.m() + qh {
                d[(pi, si)] = Complex64::new(dipole_cg(j, s.m(), qh) / norm, 0.0);
            }
            // <s m| d_q |p m'> = (-1)^q <p m'| d_{-q} |s m>, m' = m - q
            if p.m() == s.m() - qh {
                d[(si, pi)] = Complex64::new(sign * dipole_cg(j, s.m(), -qh) / norm, 0.0);
            }
        }
    }
    d
}

/// Modified spherical harmonic `C^2_mu(theta, phi)`.
pub fn rank2_harmonic(mu: i32, polar: f64, azimuth: f64) -> Complex64 {
    let (st, ct) = polar.sin_cos();
    let phase = Complex64::from_polar(1.0, f64::from(mu) * azimuth);
    let magnitude = match mu {
        0 => (3.0 * ct * ct - 1.0) / 2.0,
        1 => -(1.5f64).sqrt() * st * ct,
        -1 => (1.5f64).sqrt() * st * ct,
        2 | -2 => (0.375f64).sqrt() * st * st,
        _ => 0.0,
    };
    phase * magnitude
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Angular part of the resonant dipole-dipole operator:
/// `-sqrt(6) sum_mu (-1)^mu C^2_{-mu}(axis) [d1 x d2]^2_mu`, restricted to
/// excitation-exchange matrix elements. Multiply by `C3 / R^3` for energies.
pub fn exchange_operator(channel: &RydbergChannel, polar: f64, azimuth: f64) -> CMatrix {
    let basis = SingleAtomBasis::for_channel(channel);
    let dim = basis.dim();
    let d: Vec<CMatrix> = (-1..=1).map(|q| dipole_component(channel, q)).collect();
    let one = HalfInt::from(1);
    let two = HalfInt::from(2);

    let mut v = CMatrix::zeros(dim * dim, dim * dim);
    for mu in -2..=2i32 {
        let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
        let coefficient = rank2_harmonic(-mu, polar, azimuth) * (-(6f64.sqrt()) * sign);
        if coefficient == ZERO {
            continue;
        }
        for q1 in -1..=1i32 {
            let q2 = mu - q1;
            if q2.abs() > 1 {
                continue;
            }
            let cg = clebsch_gordan(one, HalfInt::from(q1), one, HalfInt::from(q2), two, HalfInt::from(mu));
            if cg == 0.0 {
                continue;
            }
            let term = kron(&d[(q1 + 1) as usize], &d[(q2 + 1) as usize]);
            v += term * (coefficient * cg);
        }
    }
    retain_exchange(&mut v, &basis);
    v
}

/// Zeroes matrix elements that change the number of p excitations.
fn retain_exchange(v: &mut CMatrix, basis: &SingleAtomBasis) {
    let dim = basis.dim();
    let p_count = |index: usize| {
        usize::from(basis.is_p(index / dim)) + usize::from(basis.is_p(index % dim))
    };
    for row in 0..dim * dim {
        for col in 0..dim * dim {
            if p_count(row) != p_count(col) {
                v[(row, col)] = ZERO;
            }
        }
    }
}

/// Microwave term on one atom. Its propagator for a time `area / rabi` is
/// `exp(i area sigma_x / 2)` on the populated transition, so a pi/2 pulse
/// takes `|s> -> (|s> + i|p>) / sqrt(2)`.
pub fn single_atom_dressing(channel: &RydbergChannel, microwave: &MicrowaveSpec) -> CMatrix {
    let basis = SingleAtomBasis::for_channel(channel);
    let dim = basis.dim();
    let m0 = channel.s_level().m();
    let mut h = CMatrix::zeros(dim, dim);
    for (si, s) in basis.levels()[..2].iter().enumerate() {
        for (pi, p) in basis.levels().iter().enumerate().skip(2) {
            let w = coupling_weight_from(s, p, microwave.polarization(), m0);
            if w != 0.0 {
                let element = Complex64::new(-0.5 * microwave.rabi() * w, 0.0);
                h[(pi, si)] = element;
                h[(si, pi)] = element;
            }
        }
    }
    h
}

#[derive(Clone, Debug)]
pub struct PairHamiltonian {
    dimension: usize,
    dressing_part: CMatrix,
    interaction_part: CMatrix,
    basis: Vec<(Level, Level)>,
}

impl PairHamiltonian {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn dressing_part(&self) -> &CMatrix {
        &self.dressing_part
    }

    pub fn interaction_part(&self) -> &CMatrix {
        &self.interaction_part
    }

    pub fn basis(&self) -> &[(Level, Level)] {
        &self.basis
    }

    pub fn total(&self) -> CMatrix {
        &self.dressing_part + &self.interaction_part
    }

    pub fn index_of(&self, a: &Level, b: &Level) -> Option<usize> {
        self.basis.iter().position(|(x, y)| x == a && y == b)
    }

    /// Restricts to the product space of `{s m0, p m0 + dm}` on each atom,
    /// i.e. the single-channel two-level model.
    pub fn reduced(&self, channel: &RydbergChannel) -> PairHamiltonian {
        let keep_levels = [channel.s_level(), channel.p_level()];
        let keep: Vec<usize> = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| keep_levels.contains(a) && keep_levels.contains(b))
            .map(|(i, _)| i)
            .collect();
        let pick = |m: &CMatrix| CMatrix::from_fn(keep.len(), keep.len(), |r, c| m[(keep[r], keep[c])]);
        PairHamiltonian {
            dimension: keep.len(),
            dressing_part: pick(&self.dressing_part),
            interaction_part: pick(&self.interaction_part),
            basis: keep.iter().map(|&i| self.basis[i]).collect(),
        }
    }

    /// Largest element of `H - H^dagger` over both parts.
    pub fn hermiticity_deviation(&self) -> f64 {
        [&self.dressing_part, &self.interaction_part]
            .iter()
            .map(|m| (*m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

pub fn build_pair_hamiltonian(
    geom: &PairGeometry,
    channel: &RydbergChannel,
    microwave_on: bool,
    microwave: &MicrowaveSpec,
) -> Result<PairHamiltonian> {
    let single = SingleAtomBasis::for_channel(channel);
    let dim = single.dim();
    if dim != channel.single_atom_dimension() || !(dim == 4 || dim == 6) {
        return Err(Error::InvalidChannel(format!("unsupported single-atom dimension {dim}")));
    }
    if geom.separation <= 0.0 {
        return Err(Error::CoincidentAtoms(geom.separation));
    }
    let scale = channel.c3() / geom.separation.powi(3);
    let interaction_part = exchange_operator(channel, geom.polar_angle, geom.azimuth) * Complex64::new(scale, 0.0);
    let dressing_part = if microwave_on {
        let h1 = single_atom_dressing(channel, microwave);
        let id = CMatrix::identity(dim, dim);
        kron(&h1, &id) + kron(&id, &h1)
    } else {
        CMatrix::zeros(dim * dim, dim * dim)
    };
    let basis = single
        .levels()
        .iter()
        .flat_map(|a| single.levels().iter().map(move |b| (*a, *b)))
        .collect();
    Ok(PairHamiltonian { dimension: dim * dim, dressing_part, interaction_part, basis })
}
