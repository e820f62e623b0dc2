use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid level: {0}")]
    InvalidLevel(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cycles {first} and {second} both dress p-level {level}")]
    DuplicatePLevel {
        first: usize,
        second: usize,
        level: String,
    },

    #[error("cycle {index} targets s-level {found}, schedule target is {expected}")]
    MixedTarget {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("could not place atom {placed} of {requested} after {attempts} attempts (min separation {min_separation} um in a {box_side} um box)")]
    Sampling {
        placed: usize,
        requested: usize,
        attempts: usize,
        min_separation: f64,
        box_side: f64,
    },

    #[error("coincident atoms: separation {0} um")]
    CoincidentAtoms(f64),

    #[error("missing amplitude for pair ({0}, {1})")]
    MissingPair(usize, usize),

    #[error("amplitudes for pair ({0}, {1}) are not symmetric")]
    AsymmetricPair(usize, usize),

    #[error("brute-force correlator limited to {max} atoms, got {got}")]
    TooManyAtoms { got: usize, max: usize },

    #[error("propagator lost unitarity: deviation {deviation:e} exceeds {tolerance:e}")]
    Unitarity { deviation: f64, tolerance: f64 },

    #[error("realization {realization}, pair ({mu}, {nu}): {source}")]
    PairFailure {
        realization: usize,
        mu: usize,
        nu: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no zero-mismatch geometry: best |dk| = {residual:e} rad/um")]
    Infeasible { residual: f64 },

    #[error("oracle mismatch at N = {n_atoms}: relative deviation {deviation:e} exceeds {bound:e}")]
    OracleMismatch { n_atoms: usize, deviation: f64, bound: f64 },

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("refusing to overwrite {0} (pass --force)")]
    OutputExists(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end: 1 for configuration
    /// and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Sampling { .. }
            | Error::CoincidentAtoms(_)
            | Error::Unitarity { .. }
            | Error::PairFailure { .. }
            | Error::Infeasible { .. }
            | Error::OracleMismatch { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
