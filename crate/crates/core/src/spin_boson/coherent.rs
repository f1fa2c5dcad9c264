use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::model::check_leakage;
use crate::error::Result;
use crate::numerics::ops::{annihilation, creation};
use crate::numerics::{matexp_hermitian_prop, ComplexMatrix, StateVector};

/// |α⟩ truncated to `fock_dim` levels: e^{−|α|²/2} αⁿ/√n!.
///
/// Fails with `TruncationLeakage` when the discarded tail plus the
/// population of the top decile exceeds the leakage tolerance.
pub fn coherent_state(alpha: C64, fock_dim: usize) -> Result<StateVector> {
    let mut amps = Vec::with_capacity(fock_dim);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..fock_dim {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        amps.push(c);
    }
    let state = StateVector::unnormalized(amps)?;
    let first = fock_dim - fock_dim.div_ceil(10);
    let top: f64 = state.amplitudes()[first..]
        .iter()
        .map(|a| a.norm_sqr())
        .sum();
    let tail = (1.0 - state.norm().powi(2)).max(0.0);
    check_leakage(top + tail, fock_dim)?;
    state.normalize()
}

/// D(β) = exp(βa† − β*a) on the truncated space, via the Hermitian
/// generator i(βa† − β*a). Accurate for states well below the cutoff.
pub fn displacement_operator(beta: C64, fock_dim: usize) -> Result<ComplexMatrix> {
    let gen = &(&creation(fock_dim) * beta) - &(&annihilation(fock_dim) * beta.conj());
    let hermitian = &gen * C64::new(0.0, 1.0);
    matexp_hermitian_prop(&hermitian, 1.0)
}

/// Photon statistics of a field density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldDiagnostics {
    pub mean_a: C64,
    pub mean_n: f64,
    pub variance_n: f64,
    /// (Var n − ⟨n⟩)/⟨n⟩; `None` when ⟨n⟩ is too small for the ratio to
    /// mean anything (the state is then the vacuum to working precision).
    pub mandel_q: Option<f64>,
    /// Population of the top decile of Fock levels.
    pub leakage: f64,
}

const MANDEL_MIN_MEAN: f64 = 1e-9;

pub fn field_diagnostics(rho: &ComplexMatrix) -> FieldDiagnostics {
    let m = rho.rows();
    let mut mean_a = C64::new(0.0, 0.0);
    let (mut n1, mut n2) = (0.0, 0.0);
    for n in 0..m {
        let p = rho[(n, n)].re;
        n1 += n as f64 * p;
        n2 += (n * n) as f64 * p;
        if n > 0 {
            mean_a += rho[(n, n - 1)] * (n as f64).sqrt();
        }
    }
    let variance_n = n2 - n1 * n1;
    let first = m - m.div_ceil(10);
    let leakage = (first..m).map(|n| rho[(n, n)].re).sum();
    FieldDiagnostics {
        mean_a,
        mean_n: n1,
        variance_n,
        mandel_q: (n1 > MANDEL_MIN_MEAN).then(|| (variance_n - n1) / n1),
        leakage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_state_statistics() {
        let alpha = C64::new(1.5, -0.7);
        let psi = coherent_state(alpha, 40).unwrap();
        let d = field_diagnostics(&psi.density());
        assert!((d.mean_a - alpha).norm() < 1e-12);
        assert!((d.mean_n - alpha.norm_sqr()).abs() < 1e-12);
        assert!(d.mandel_q.unwrap().abs() < 1e-10);
    }

    #[test]
    fn vacuum_has_no_mandel_ratio() {
        let d = field_diagnostics(&coherent_state(C64::new(0.0, 0.0), 5).unwrap().density());
        assert_eq!(d.mandel_q, None);
        assert_eq!(d.mean_n, 0.0);
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let beta = C64::new(0.8, 0.4);
        let d = displacement_operator(beta, 40).unwrap();
        let out = d.apply(&StateVector::basis(40, 0)).unwrap();
        let expected = coherent_state(beta, 40).unwrap();
        assert!(out.distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn truncation_too_small_leaks() {
        assert_eq!(
            coherent_state(C64::new(3.0, 0.0), 8).unwrap_err().name(),
            "TruncationLeakage"
        );
    }
}
