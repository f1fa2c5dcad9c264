use num_complex::Complex64 as C64;

use super::{ComplexMatrix, MAX_DIM, NORM_TOL};
use crate::error::{Error, Result};

/// Dense state vector.
///
/// Normalized states carry the invariant ‖ψ‖ = 1 within 1e-10. Correction
/// terms and other non-physical vectors are built with
/// [`StateVector::unnormalized`] and carry no norm guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::unnormalized(amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            normalized: true,
            ..state
        })
    }

    pub fn unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            amplitudes,
            normalized: false,
        })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Re-asserts normalization after an operation known to preserve it.
    pub fn assert_normalized(self) -> Result<Self> {
        Self::new(self.amplitudes)
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self {
            amplitudes,
            normalized: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amplitudes: vec![C64::new(0.0, 0.0); dim],
            normalized: false,
        }
    }

    /// Tensor product of factors, first factor most significant.
    pub fn product(factors: &[StateVector]) -> Result<Self> {
        let mut amplitudes = vec![C64::new(1.0, 0.0)];
        for f in factors {
            let dim = amplitudes.len().saturating_mul(f.dim());
            if dim > MAX_DIM {
                return Err(Error::DimensionTooLarge {
                    requested: dim,
                    max: MAX_DIM,
                });
            }
            amplitudes = amplitudes
                .iter()
                .flat_map(|a| f.amplitudes.iter().map(move |b| a * b))
                .collect();
        }
        let normalized = factors.iter().all(|f| f.normalized);
        Ok(Self {
            amplitudes,
            normalized,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_dim(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// ‖self − other‖.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            normalized: self.normalized && (factor.norm() - 1.0).abs() <= NORM_TOL,
        }
    }

    /// Sum of two states; the result is flagged unnormalized.
    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
            normalized: false,
        })
    }

    /// |ψ⟩⟨ψ|.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_checks_norm() {
        let s = 0.5_f64.sqrt();
        assert!(StateVector::new(vec![C64::new(s, 0.0), C64::new(0.0, s)]).is_ok());
        let err = StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap_err();
        assert_eq!(err.name(), "NotNormalized");
        assert!(StateVector::unnormalized(vec![C64::new(2.0, 0.0)]).is_ok());
    }

    #[test]
    fn product_orders_first_factor_most_significant() {
        let up = StateVector::basis(2, 0);
        let down = StateVector::basis(2, 1);
        let p = StateVector::product(&[up, down]).unwrap();
        assert_eq!(p, StateVector::basis(4, 1));
        assert!(p.is_normalized());
    }

    #[test]
    fn normalize_zero_fails() {
        assert!(StateVector::zeros(3).normalize().is_err());
    }
}
