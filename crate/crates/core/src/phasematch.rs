//! Wavevector bookkeeping for multi-photon excitation and retrieval.
//!
//! Wavelengths in nm, wavevectors in rad/um, speeds in m/s, times in us.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mismatch below which the spin-wave period is reported as infinite.
pub const EPS_K: f64 = 1e-9;

pub type Vec3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BeamSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl BeamSign {
    pub fn factor(self) -> f64 {
        match self {
            BeamSign::Plus => 1.0,
            BeamSign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beam {
    wavelength_nm: f64,
    sign: BeamSign,
    direction: Vec3,
}

impl Beam {
    pub fn new(wavelength_nm: f64, sign: BeamSign, direction: Vec3) -> Result<Self> {
        if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
            return Err(Error::InvalidParameter { name: "wavelength_nm", reason: format!("must be positive, got {wavelength_nm}") });
        }
        let norm = norm(&direction);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter { name: "direction", reason: format!("must be a unit vector, |d| = {norm}") });
        }
        Ok(Beam { wavelength_nm, sign, direction })
    }

    /// Beam in the x-z plane tilted by `angle` (rad) from +z.
    pub fn in_plane(wavelength_nm: f64, sign: BeamSign, angle: f64) -> Result<Self> {
        Beam::new(wavelength_nm, sign, [angle.sin(), 0.0, angle.cos()])
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    pub fn sign(&self) -> BeamSign {
        self.sign
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    /// `|k| = 2 pi / lambda` in rad/um.
    pub fn wavenumber(&self) -> f64 {
        TAU / (self.wavelength_nm * 1e-3)
    }
}

fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `sum_i sign_i k_i d_i`.
pub fn wavevector_mismatch(beams: &[Beam]) -> Result<Vec3> {
    if beams.is_empty() {
        return Err(Error::InvalidParameter { name: "beams", reason: "no beams".into() });
    }
    let mut dk = [0.0; 3];
    for beam in beams {
        let k = beam.sign.factor() * beam.wavenumber();
        for (out, d) in dk.iter_mut().zip(beam.direction) {
            *out += k * d;
        }
    }
    Ok(dk)
}

/// A length or time that may be unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extent {
    Finite(f64),
    Infinite,
}

impl Extent {
    pub fn value(self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extent::Infinite)
    }

    pub fn to_json(self) -> serde_json::Value {
        match self {
            Extent::Finite(v) => serde_json::json!(v),
            Extent::Infinite => serde_json::json!("inf"),
        }
    }
}

pub fn spinwave_period(mismatch: &Vec3) -> Extent {
    let dk = norm(mismatch);
    if dk > EPS_K {
        Extent::Finite(TAU / dk)
    } else {
        Extent::Infinite
    }
}

/// `Lambda / (2 pi v)`: um divided by m/s is already us.
pub fn motional_coherence_time(period: Extent, speed: f64) -> Result<Extent> {
    if !(speed.is_finite() && speed > 0.0) {
        return Err(Error::InvalidParameter { name: "speed", reason: format!("must be positive, got {speed}") });
    }
    match period {
        Extent::Infinite => Ok(Extent::Infinite),
        Extent::Finite(p) if p > 0.0 && p.is_finite() => Ok(Extent::Finite(p / (TAU * speed))),
        Extent::Finite(p) => Err(Error::InvalidParameter { name: "period", reason: format!("must be positive, got {p}") }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMatchResult {
    pub mismatch: Vec3,
    pub period: Extent,
    pub coherence_time: Extent,
    /// In-plane tilt of every beam from +z, degrees.
    pub angles_deg: Vec<f64>,
}

impl PhaseMatchResult {
    pub fn from_beams(beams: &[Beam], angles: &[f64], speed: f64) -> Result<Self> {
        let mismatch = wavevector_mismatch(beams)?;
        let period = spinwave_period(&mismatch);
        Ok(PhaseMatchResult {
            mismatch,
            period,
            coherence_time: motional_coherence_time(period, speed)?,
            angles_deg: angles.iter().map(|a| a.to_degrees()).collect(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dk_rad_per_um": self.mismatch,
            "period_um": self.period.to_json(),
            "coherence_time_us": self.coherence_time.to_json(),
            "angles_deg": self.angles_deg,
        })
    }
}

/// All beams along +z.
pub fn collinear(wavelengths: &[f64], signs: &[BeamSign]) -> Result<Vec<Beam>> {
    if wavelengths.len() != signs.len() {
        return Err(Error::InvalidParameter { name: "signs", reason: "one sign per wavelength".into() });
    }
    wavelengths.iter().zip(signs).map(|(&w, &s)| Beam::in_plane(w, s, 0.0)).collect()
}

/// Off-axis solution: beam directions and their tilt angles (rad).
#[derive(Clone, Debug, PartialEq)]
pub struct OffAxisGeometry {
    pub beams: Vec<Beam>,
    pub angles: Vec<f64>,
    pub residual: f64,
}

/// Planar zero-mismatch geometry for four beams. Beam 0 stays on +z; the
/// remaining three tilt angles minimise `|dk|^2` by Nelder-Mead from a set
/// of deterministic starts. The winning geometry is re-checked through
/// [`wavevector_mismatch`].
///
/// Every beam propagates into the forward half-space (tilt in (-90°, 90°));
/// the sign alone decides whether a wavevector adds or subtracts. Without
/// that restriction a sign flip is just a reversed beam and any set of four
/// wavelengths obeying the polygon inequality would close.
pub fn solve_offaxis(wavelengths: [f64; 4], signs: [BeamSign; 4]) -> Result<OffAxisGeometry> {
    let beams_at = |t: &[f64]| -> Result<Vec<Beam>> {
        let angles = [0.0, tilt(t[0]), tilt(t[1]), tilt(t[2])];
        (0..4).map(|i| Beam::in_plane(wavelengths[i], signs[i], angles[i])).collect()
    };
    for (i, &w) in wavelengths.iter().enumerate() {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter { name: "wavelength_nm", reason: format!("beam {i}: must be positive, got {w}") });
        }
    }
    let objective = |t: &[f64]| -> f64 {
        let beams = beams_at(t).expect("wavelengths validated");
        let dk = wavevector_mismatch(&beams).expect("four beams");
        dk.iter().map(|x| x * x).sum()
    };

    // Starts: collinear, then a coarse lattice of tilts.
    let mut starts = vec![[0.0; 3]];
    let lattice: [f64; 4] = [-1.2, -0.4, 0.4, 1.2];
    for &a in &lattice {
        for &b in &lattice {
            for &c in &lattice {
                starts.push([a.tan(), (b + 0.1).tan(), (c - 0.1).tan()]);
            }
        }
    }

    let mut best: Option<([f64; 3], f64)> = None;
    for start in starts {
        let (x, fx) = nelder_mead(&objective, start, 0.4, 1e-30, 4000);
        // polish with restarts at shrinking simplex size
        let (x, fx) = (0..6).fold((x, fx), |(x, fx), k| {
            let (y, fy) = nelder_mead(&objective, x, 0.05 / 4f64.powi(k), 1e-34, 4000);
            if fy < fx { (y, fy) } else { (x, fx) }
        });
        if best.is_none_or(|(_, b)| fx < b) {
            best = Some((x, fx));
        }
        if fx.sqrt() <= 0.1 * EPS_K {
            break;
        }
    }
    let (x, _) = best.expect("at least one start");
    let beams = beams_at(&x)?;
    let residual = norm(&wavevector_mismatch(&beams)?);
    if residual > EPS_K {
        return Err(Error::Infeasible { residual });
    }
    let angles = vec![0.0, tilt(x[0]), tilt(x[1]), tilt(x[2])];
    Ok(OffAxisGeometry { beams, angles, residual })
}

/// Unconstrained optimizer coordinate to a forward tilt in (-pi/2, pi/2).
fn tilt(u: f64) -> f64 {
    u.atan()
}

/// Minimal Nelder-Mead (standard coefficients) on `R^3`.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: [f64; 3], step: f64, ftol: f64, max_iter: usize) -> ([f64; 3], f64) {
    const D: usize = 3;
    let mut simplex: Vec<([f64; D], f64)> = (0..=D)
        .map(|i| {
            let mut p = start;
            if i > 0 {
                p[i - 1] += step;
            }
            (p, f(&p))
        })
        .collect();
    let lerp = |a: &[f64; D], b: &[f64; D], t: f64| -> [f64; D] { std::array::from_fn(|k| a[k] + t * (b[k] - a[k])) };

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[D].1 - simplex[0].1 <= ftol {
            break;
        }
        let centroid: [f64; D] = std::array::from_fn(|k| simplex[..D].iter().map(|(p, _)| p[k]).sum::<f64>() / D as f64);
        let worst = simplex[D];
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            simplex[D] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[D - 1].1 {
            simplex[D] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 { lerp(&centroid, &reflected, 0.5) } else { lerp(&centroid, &worst.0, 0.5) };
            let fc = f(&contracted);
            if fc < fr.min(worst.1) {
                simplex[D] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for vertex in simplex.iter_mut().skip(1) {
                    let p = lerp(&best, &vertex.0, 0.5);
                    *vertex = (p, f(&p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}
