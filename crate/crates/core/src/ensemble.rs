//! Frozen atomic configurations and pair geometry.
//!
//! Positions are drawn from ChaCha8 (`rand_chacha`), whose output stream is
//! fixed by the algorithm, so a given `(seed, stream)` reproduces the same
//! geometry on every platform. Realization `r` of a run uses stream `r`.

use std::f64::consts::{PI, TAU};
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MIN_SEPARATION: f64 = 0.1;
const MAX_ATTEMPTS_PER_ATOM: usize = 100_000;

pub type Point = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub n_atoms: usize,
    #[serde(rename = "box_side_um")]
    pub box_side: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "min_separation_um", default = "default_min_separation")]
    pub min_separation: f64,
}

fn default_min_separation() -> f64 {
    DEFAULT_MIN_SEPARATION
}

impl EnsembleSpec {
    pub fn new(n_atoms: usize, box_side: f64, seed: u64) -> Result<Self> {
        EnsembleSpec { n_atoms, box_side, seed, min_separation: DEFAULT_MIN_SEPARATION }.validated()
    }

    pub fn with_min_separation(mut self, min_separation: f64) -> Result<Self> {
        self.min_separation = min_separation;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.n_atoms < 2 {
            return Err(Error::InvalidParameter {
                name: "n_atoms",
                reason: format!("need at least 2 atoms, got {}", self.n_atoms),
            });
        }
        if !(self.box_side.is_finite() && self.box_side > 0.0) {
            return Err(Error::InvalidParameter {
                name: "box_side_um",
                reason: format!("must be positive, got {}", self.box_side),
            });
        }
        if !(self.min_separation.is_finite() && self.min_separation > 0.0) {
            return Err(Error::InvalidParameter {
                name: "min_separation_um",
                reason: format!("must be positive, got {}", self.min_separation),
            });
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleGeometry {
    positions: Vec<Point>,
}

impl EnsembleGeometry {
    pub fn from_positions(positions: Vec<Point>) -> Self {
        EnsembleGeometry { positions }
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Pairs `(mu, nu)` with `mu < nu`, in ascending order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |mu| (mu + 1..n).map(move |nu| (mu, nu)))
    }

    pub fn pair_geometry(&self, mu: usize, nu: usize) -> Result<PairGeometry> {
        pair_geometry(&self.positions[mu], &self.positions[nu])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "atom_index,x_um,y_um,z_um")?;
        for (i, [x, y, z]) in self.positions.iter().enumerate() {
            writeln!(out, "{i},{x},{y},{z}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "atom_index,x_um,y_um,z_um" {
            return Err(Error::Config {
                path: "geometry.csv:1".into(),
                message: format!("unexpected header `{header}`"),
            });
        }
        let mut positions = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Config { path: format!("geometry.csv:{}", row + 2), message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(bad(format!("expected 4 columns, got {}", fields.len())));
            }
            let index: usize = fields[0].parse().map_err(|e| bad(format!("{e}")))?;
            if index != positions.len() {
                return Err(bad(format!("atom_index {index} out of sequence")));
            }
            let mut point = [0.0; 3];
            for (slot, text) in point.iter_mut().zip(&fields[1..]) {
                *slot = text.parse().map_err(|e| bad(format!("{e}")))?;
            }
            positions.push(point);
        }
        Ok(EnsembleGeometry { positions })
    }
}

/// Generator for one realization of an ensemble.
pub fn realization_rng(seed: u64, realization: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// Uniform positions in `[0, L]^3`, rejection-resampled to respect the
/// minimum separation.
pub fn sample_positions(spec: &EnsembleSpec) -> Result<EnsembleGeometry> {
    sample_realization(spec, 0)
}

pub fn sample_realization(spec: &EnsembleSpec, realization: u64) -> Result<EnsembleGeometry> {
    let spec = spec.validated()?;
    let mut rng = realization_rng(spec.seed, realization);
    sample_with(&spec, &mut rng)
}

pub fn sample_with<R: Rng>(spec: &EnsembleSpec, rng: &mut R) -> Result<EnsembleGeometry> {
    let min_sq = spec.min_separation * spec.min_separation;
    let mut positions: Vec<Point> = Vec::with_capacity(spec.n_atoms);
    while positions.len() < spec.n_atoms {
        let mut attempts = 0;
        loop {
            if attempts == MAX_ATTEMPTS_PER_ATOM {
                return Err(Error::Sampling {
                    placed: positions.len(),
                    requested: spec.n_atoms,
                    attempts,
                    min_separation: spec.min_separation,
                    box_side: spec.box_side,
                });
            }
            attempts += 1;
            let candidate = [
                rng.gen::<f64>() * spec.box_side,
                rng.gen::<f64>() * spec.box_side,
                rng.gen::<f64>() * spec.box_side,
            ];
            if positions.iter().all(|p| distance_sq(p, &candidate) >= min_sq) {
                positions.push(candidate);
                break;
            }
        }
    }
    Ok(EnsembleGeometry { positions })
}

fn distance_sq(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// Interatomic axis in spherical coordinates about the quantization axis z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairGeometry {
    pub separation: f64,
    pub polar_angle: f64,
    pub azimuth: f64,
}

impl PairGeometry {
    pub fn new(separation: f64, polar_angle: f64, azimuth: f64) -> Result<Self> {
        if !(separation.is_finite() && separation > 0.0) {
            return Err(Error::CoincidentAtoms(separation));
        }
        Ok(PairGeometry { separation, polar_angle, azimuth: azimuth.rem_euclid(TAU) })
    }

    /// Unit vector along the axis.
    pub fn axis(&self) -> Point {
        let (st, ct) = self.polar_angle.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// The same pair seen from the other atom.
    pub fn inverted(&self) -> Self {
        PairGeometry {
            separation: self.separation,
            polar_angle: PI - self.polar_angle,
            azimuth: (self.azimuth + PI).rem_euclid(TAU),
        }
    }
}

/// Geometry of the vector `a - b`.
pub fn pair_geometry(a: &Point, b: &Point) -> Result<PairGeometry> {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if r == 0.0 {
        return Err(Error::CoincidentAtoms(r));
    }
    let polar = (d[2] / r).clamp(-1.0, 1.0).acos();
    let azimuth = d[1].atan2(d[0]).rem_euclid(TAU);
    PairGeometry::new(r, polar, azimuth)
}
