//! Standard operators and local (few-site) operator application.
//!
//! Spin basis convention: index 0 is |↑⟩ (σ_z = +1), index 1 is |↓⟩.

use num_complex::Complex64 as C64;

use super::{kron, ComplexMatrix, StateVector};
use crate::error::{Error, Result};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[c(1., 0.), c(-1., 0.)])
}

/// Truncated annihilation operator on Fock levels 0..dim.
pub fn annihilation(dim: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.);
    }
    a
}

pub fn creation(dim: usize) -> ComplexMatrix {
    annihilation(dim).dagger()
}

pub fn number(dim: usize) -> ComplexMatrix {
    let diag: Vec<C64> = (0..dim).map(|n| c(n as f64, 0.)).collect();
    ComplexMatrix::from_diag(&diag)
}

/// σ_x eigenstates: |+1⟩_x = (|↑⟩+|↓⟩)/√2, |−1⟩_x = (|↑⟩−|↓⟩)/√2.
pub fn x_eigenstate(plus: bool) -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if plus { 1.0 } else { -1.0 };
    StateVector::new(vec![c(s, 0.), c(sign * s, 0.)]).unwrap()
}

/// `op` acting on factor `site` of a tensor product with the given factor
/// dimensions, built as a chain of Kronecker products.
pub fn embed(op: &ComplexMatrix, site: usize, factor_dims: &[usize]) -> Result<ComplexMatrix> {
    if site >= factor_dims.len() || op.rows() != factor_dims[site] {
        return Err(Error::DimensionMismatch {
            expected: factor_dims.get(site).copied().unwrap_or(0),
            actual: op.rows(),
        });
    }
    let mut out = ComplexMatrix::identity(1);
    for (k, &d) in factor_dims.iter().enumerate() {
        let factor = if k == site {
            op.clone()
        } else {
            ComplexMatrix::identity(d)
        };
        out = kron(&out, &factor)?;
    }
    Ok(out)
}

/// Σ_i op_i over `n` spin-½ sites.
pub fn collective(op: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let dims = vec![2; n];
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for site in 0..n {
        out = out.try_add(&embed(op, site, &dims)?)?;
    }
    Ok(out)
}

/// Applies `op` to the listed factors of a tensor-product state.
///
/// `op` acts on the factors in `sites` in the order given (first listed is
/// most significant), tensored with the identity elsewhere. Costs
/// O(dim · d_local) instead of building the full operator.
pub fn apply_local(
    amplitudes: &[C64],
    factor_dims: &[usize],
    sites: &[usize],
    op: &ComplexMatrix,
) -> Result<Vec<C64>> {
    let total: usize = factor_dims.iter().product();
    if total != amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: total,
            actual: amplitudes.len(),
        });
    }
    let local_dim: usize = sites.iter().map(|&s| factor_dims[s]).product();
    if op.rows() != local_dim || op.cols() != local_dim {
        return Err(Error::DimensionMismatch {
            expected: local_dim,
            actual: op.rows(),
        });
    }
    for (k, s) in sites.iter().enumerate() {
        if *s >= factor_dims.len() || sites[..k].contains(s) {
            return Err(Error::InvalidParameter(format!("bad site list {sites:?}")));
        }
    }

    let mut strides = vec![1usize; factor_dims.len()];
    for k in (0..factor_dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * factor_dims[k + 1];
    }
    // Offset of each local basis state relative to a base index.
    let offsets: Vec<usize> = (0..local_dim)
        .map(|mut l| {
            let mut off = 0;
            for &s in sites.iter().rev() {
                off += (l % factor_dims[s]) * strides[s];
                l /= factor_dims[s];
            }
            off
        })
        .collect();

    let mut out = vec![C64::new(0.0, 0.0); total];
    let mut gathered = vec![C64::new(0.0, 0.0); local_dim];
    for base in 0..total {
        if sites
            .iter()
            .any(|&s| !(base / strides[s]).is_multiple_of(factor_dims[s]))
        {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amplitudes[base + off];
        }
        let applied = op.apply_slice(&gathered)?;
        for (a, off) in applied.into_iter().zip(&offsets) {
            out[base + off] = a;
        }
    }
    Ok(out)
}
