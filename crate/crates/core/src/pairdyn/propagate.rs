//! Exact propagators for piecewise-constant Hermitian generators.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::CMatrix;
use crate::error::{Error, Result};

pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Eigendecomposition `H = V diag(E) V^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectral {
    values: DVector<f64>,
    vectors: CMatrix,
}

impl Spectral {
    pub fn of(h: &CMatrix) -> Self {
        let eigen = SymmetricEigen::new(h.clone());
        Spectral { values: eigen.eigenvalues, vectors: eigen.eigenvectors }
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `exp(-i H t)`.
    pub fn evolve(&self, t: f64) -> CMatrix {
        let phases = self.values.map(|e| Complex64::from_polar(1.0, -e * t));
        let mut scaled = self.vectors.clone();
        for (mut column, phase) in scaled.column_iter_mut().zip(phases.iter()) {
            column *= *phase;
        }
        scaled * self.vectors.adjoint()
    }
}

/// Largest element of `U^dagger U - 1`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let product = u.adjoint() * u;
    (product - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn check_unitary(u: &CMatrix) -> Result<()> {
    let deviation = unitarity_deviation(u);
    if deviation > UNITARITY_TOLERANCE || deviation.is_nan() {
        return Err(Error::Unitarity { deviation, tolerance: UNITARITY_TOLERANCE });
    }
    Ok(())
}

/// Time-ordered product `exp(-i H_K t_K) ... exp(-i H_1 t_1)` of segments
/// listed in chronological order. `dim` sizes the identity returned for an
/// empty sequence.
pub fn propagate(segments: &[(&CMatrix, f64)], dim: usize) -> Result<CMatrix> {
    let mut u = CMatrix::identity(dim, dim);
    for (index, (h, duration)) in segments.iter().enumerate() {
        if !(duration.is_finite() && *duration >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: format!("segment {index} has duration {duration}"),
            });
        }
        if h.nrows() != dim || h.ncols() != dim {
            return Err(Error::InvalidParameter {
                name: "hamiltonian",
                reason: format!("segment {index} is {}x{}, expected {dim}x{dim}", h.nrows(), h.ncols()),
            });
        }
        u = Spectral::of(h).evolve(*duration) * u;
    }
    check_unitary(&u)?;
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * c(0.5, 0.0)
    }

    #[test]
    fn empty_and_zero_generators_give_identity() {
        let id = CMatrix::identity(4, 4);
        assert_eq!(propagate(&[], 4).unwrap(), id);
        let zero = CMatrix::zeros(4, 4);
        let u = propagate(&[(&zero, 3.7)], 4).unwrap();
        assert!(max_abs(&(u - id)) < 1e-15);
    }

    #[test]
    fn commuting_segments_add() {
        let h = random_hermitian(6, 1);
        let h2 = &h * c(2.0, 0.0);
        let split = propagate(&[(&h, 0.3), (&h2, 0.45)], 6).unwrap();
        let joined = propagate(&[(&h, 0.3 + 0.9)], 6).unwrap();
        assert!(max_abs(&(split - joined)) < 1e-10);
    }

    #[test]
    fn matches_power_series_for_small_step() {
        let h = random_hermitian(5, 2);
        let t = 0.05;
        let u = Spectral::of(&h).evolve(t);
        // Taylor series to high order as an independent route
        let a = &h * c(0.0, -t);
        let mut term = CMatrix::identity(5, 5);
        let mut sum = term.clone();
        for k in 1..25 {
            term = &term * &a * c(1.0 / f64::from(k), 0.0);
            sum += &term;
        }
        assert!(max_abs(&(u - sum)) < 1e-13);
    }

    #[test]
    fn unitary_for_large_generators() {
        for seed in 0..5 {
            let h = random_hermitian(36, seed) * c(1e3, 0.0);
            let u = propagate(&[(&h, 17.0)], 36).unwrap();
            assert!(unitarity_deviation(&u) <= UNITARITY_TOLERANCE);
        }
    }

    #[test]
    fn rejects_negative_durations_and_bad_shapes() {
        let h = random_hermitian(3, 9);
        assert!(propagate(&[(&h, -1.0)], 3).is_err());
        assert!(propagate(&[(&h, 1.0)], 4).is_err());
        let not_unitary = CMatrix::identity(3, 3) * c(1.1, 0.0);
        assert!(matches!(check_unitary(&not_unitary), Err(Error::Unitarity { .. })));
    }
}
