use num_complex::Complex64 as C64;

use super::{ComplexMatrix, StateVector};
use crate::error::{Error, Result};

/// Reduced density matrix of `state` over the factors in `keep`.
///
/// Kept factors appear in ascending order in the result.
pub fn partial_trace(
    state: &StateVector,
    factor_dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    partial_trace_outer(state.amplitudes(), state.amplitudes(), factor_dims, keep)
}

/// Tr_rest |a⟩⟨b| over the factors not in `keep`.
pub fn partial_trace_outer(
    a: &[C64],
    b: &[C64],
    factor_dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = factor_dims.iter().product();
    for v in [a, b] {
        if v.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                actual: v.len(),
            });
        }
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= factor_dims.len()) {
        return Err(Error::InvalidParameter(format!(
            "keep index out of range for {} factors",
            factor_dims.len()
        )));
    }
    let kept_dim: usize = keep.iter().map(|&k| factor_dims[k]).product();
    let env_dim = total / kept_dim;

    // Reshape each vector into (kept, env) blocks.
    let reshape = |v: &[C64]| {
        let mut m = vec![C64::new(0.0, 0.0); total];
        for (idx, amp) in v.iter().enumerate() {
            let (mut kept, mut env) = (0usize, 0usize);
            let mut rem = idx;
            let mut digits = vec![0usize; factor_dims.len()];
            for f in (0..factor_dims.len()).rev() {
                digits[f] = rem % factor_dims[f];
                rem /= factor_dims[f];
            }
            for (f, &d) in digits.iter().enumerate() {
                if keep.binary_search(&f).is_ok() {
                    kept = kept * factor_dims[f] + d;
                } else {
                    env = env * factor_dims[f] + d;
                }
            }
            m[kept * env_dim + env] = *amp;
        }
        m
    };
    let ra = reshape(a);
    let rb = reshape(b);

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for i in 0..kept_dim {
        let row_a = &ra[i * env_dim..(i + 1) * env_dim];
        for j in 0..kept_dim {
            let row_b = &rb[j * env_dim..(j + 1) * env_dim];
            out[(i, j)] = row_a.iter().zip(row_b).map(|(x, y)| x * y.conj()).sum();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_state_factorizes() {
        let s = 0.6_f64;
        let a = StateVector::new(vec![C64::new(s, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let b = StateVector::new(vec![
            C64::new(0.0, 0.0),
            C64::new(1.0 / 2f64.sqrt(), 0.0),
            C64::new(0.0, 1.0 / 2f64.sqrt()),
        ])
        .unwrap();
        let ab = StateVector::product(&[a.clone(), b.clone()]).unwrap();
        let ra = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(ra.max_abs_diff(&a.density()).unwrap() < 1e-15);
        let rb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(rb.max_abs_diff(&b.density()).unwrap() < 1e-15);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let bell = StateVector::new(vec![C64::new(s, 0.0), z, z, C64::new(s, 0.0)]).unwrap();
        let half = ComplexMatrix::from_diag(&[C64::new(0.5, 0.0); 2]);
        for keep in [0, 1] {
            let r = partial_trace(&bell, &[2, 2], &[keep]).unwrap();
            assert!(r.max_abs_diff(&half).unwrap() < 1e-15);
        }
    }

    #[test]
    fn dim_mismatch() {
        let s = StateVector::basis(4, 0);
        assert_eq!(
            partial_trace(&s, &[2, 3], &[0]).unwrap_err().name(),
            "DimensionMismatch"
        );
    }
}
