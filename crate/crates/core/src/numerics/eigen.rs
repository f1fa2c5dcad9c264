use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::{ComplexMatrix, StateVector};
use crate::error::{Error, Result};

/// Eigendecomposition H = V diag(λ) V† of a Hermitian matrix.
///
/// Real symmetric input takes the real solver, which is several times faster
/// and covers every Hamiltonian built in this crate.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    values: Vec<f64>,
    /// Eigenvectors as columns, row-major.
    vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        h.ensure_hermitian()?;
        let n = h.rows();
        if h.is_real() {
            let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)].re + h[(j, i)].re));
            let eig = SymmetricEigen::new(m);
            let vectors = ComplexMatrix::new(
                n,
                n,
                (0..n * n)
                    .map(|k| C64::new(eig.eigenvectors[(k / n, k % n)], 0.0))
                    .collect(),
            )?;
            Ok(Self {
                values: eig.eigenvalues.iter().copied().collect(),
                vectors,
            })
        } else {
            let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
            let eig = SymmetricEigen::new(m);
            let vectors = ComplexMatrix::new(
                n,
                n,
                (0..n * n)
                    .map(|k| eig.eigenvectors[(k / n, k % n)])
                    .collect(),
            )?;
            Ok(Self {
                values: eig.eigenvalues.iter().copied().collect(),
                vectors,
            })
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Time-evolution operator exp(−iHt) for a fixed Hermitian H, evaluated at
/// any t from a single factorization.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigen: HermitianEigen,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            eigen: HermitianEigen::new(h)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// U(t) = V diag(e^{−iλt}) V†.
    pub fn matrix(&self, t: f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigen.vectors;
        let phases: Vec<C64> = self
            .eigen
            .values
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let vik = v[(i, k)] * phases[k];
                if vik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// U(t)|ψ⟩ in O(n²) without forming U(t).
    pub fn apply_slice(&self, psi: &[C64], t: f64) -> Result<Vec<C64>> {
        let n = self.dim();
        if psi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: psi.len(),
            });
        }
        let v = &self.eigen.vectors;
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for (i, p) in psi.iter().enumerate() {
            if *p == C64::new(0.0, 0.0) {
                continue;
            }
            for (k, c) in coeffs.iter_mut().enumerate() {
                *c += v[(i, k)].conj() * p;
            }
        }
        for (c, &l) in coeffs.iter_mut().zip(&self.eigen.values) {
            *c *= C64::from_polar(1.0, -l * t);
        }
        Ok((0..n)
            .map(|i| (0..n).map(|k| v[(i, k)] * coeffs[k]).sum())
            .collect())
    }

    /// U(t)|ψ⟩, keeping the normalization flag of the input.
    pub fn apply(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        let out = StateVector::unnormalized(self.apply_slice(psi.amplitudes(), t)?)?;
        if psi.is_normalized() {
            out.assert_normalized()
        } else {
            Ok(out)
        }
    }
}

/// exp(−iHt) for Hermitian H.
pub fn matexp_hermitian_prop(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(h)?.matrix(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ops::{pauli_x, pauli_y, pauli_z};
    use std::f64::consts::FRAC_PI_2;

    fn unitarity_defect(u: &ComplexMatrix) -> f64 {
        let prod = u.dagger().matmul(u).unwrap();
        prod.max_abs_diff(&ComplexMatrix::identity(u.rows()))
            .unwrap()
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = matexp_hermitian_prop(&ComplexMatrix::zeros(3, 3), 4.2).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn sigma_z_quarter_period() {
        let u = matexp_hermitian_prop(&pauli_z(), FRAC_PI_2).unwrap();
        let expected = ComplexMatrix::from_diag(&[
            C64::from_polar(1.0, -FRAC_PI_2),
            C64::from_polar(1.0, FRAC_PI_2),
        ]);
        assert!(u.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn complex_hermitian_path() {
        // σ_y is purely imaginary, so this takes the complex solver.
        let h = pauli_y();
        let t = 0.37;
        let u = matexp_hermitian_prop(&h, t).unwrap();
        let expected = &(&ComplexMatrix::identity(2) * t.cos()) - &(&h * C64::new(0.0, t.sin()));
        assert!(u.max_abs_diff(&expected).unwrap() < 1e-14);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = &pauli_x() * C64::new(0.0, 1.0);
        assert_eq!(Propagator::new(&h).unwrap_err().name(), "NotHermitian");
    }

    #[test]
    fn apply_matches_matrix() {
        let h = &pauli_x() + &(&pauli_z() * 0.3);
        let p = Propagator::new(&h).unwrap();
        let psi = StateVector::basis(2, 1);
        let a = p.apply(&psi, 1.3).unwrap();
        let b = p.matrix(1.3).apply(&psi).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-14);
        assert!(a.is_normalized());
    }
}
