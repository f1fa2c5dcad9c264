use num_complex::Complex64 as C64;

use super::{SpinBosonConfig, LEAKAGE_TOL};
use crate::error::{Error, Result};
use crate::numerics::ops::x_eigenstate;
use crate::numerics::{partial_trace, ComplexMatrix, Propagator, StateVector};

/// Hamiltonian on the truncated space, assembled entry by entry.
pub fn build_hamiltonian(cfg: &SpinBosonConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let n = cfg.n_spins;
    let m = cfg.fock_dim;
    let spin_dim = 1usize << n;
    let dim = cfg.total_dim()?;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for level in 0..m {
        for bits in 0..spin_dim {
            let row = level * spin_dim + bits;
            // Bit set means |↓⟩ (σ_z = −1).
            let down = bits.count_ones() as f64;
            let sz = n as f64 - 2.0 * down;
            h[(row, row)] = C64::new(cfg.delta * sz + cfg.omega * level as f64, 0.0);
            if level + 1 < m {
                let amp = cfg.g * ((level + 1) as f64).sqrt();
                for site in 0..n {
                    let flipped = bits ^ (1 << (n - 1 - site));
                    let col = (level + 1) * spin_dim + flipped;
                    h[(row, col)] += C64::new(amp, 0.0);
                    h[(col, row)] += C64::new(amp, 0.0);
                }
            }
        }
    }
    Ok(h)
}

/// Π_i |−1⟩_x on the N bath spins.
pub fn initial_bath_state(n_spins: usize) -> Result<StateVector> {
    StateVector::product(&vec![x_eigenstate(false); n_spins])
}

/// |0⟩ ⊗ Π_i |−1⟩_x.
pub fn initial_state(cfg: &SpinBosonConfig) -> Result<StateVector> {
    StateVector::product(&[
        StateVector::basis(cfg.fock_dim, 0),
        initial_bath_state(cfg.n_spins)?,
    ])
}

/// Population of the top ⌈M/10⌉ Fock levels of a joint state.
pub fn top_decile_population(state: &StateVector, cfg: &SpinBosonConfig) -> f64 {
    let spin_dim = cfg.spin_dim();
    let m = cfg.fock_dim;
    let first = m - m.div_ceil(10);
    state.amplitudes()[first * spin_dim..]
        .iter()
        .map(|a| a.norm_sqr())
        .sum()
}

pub(crate) fn check_leakage(leakage: f64, fock_dim: usize) -> Result<()> {
    if leakage > LEAKAGE_TOL {
        return Err(Error::TruncationLeakage {
            leakage,
            tolerance: LEAKAGE_TOL,
            fock_dim,
        });
    }
    Ok(())
}

/// Hamiltonian and its eigendecomposition, built once per configuration and
/// reused for every time point.
#[derive(Debug, Clone)]
pub struct SpinBosonSystem {
    cfg: SpinBosonConfig,
    propagator: Propagator,
}

impl SpinBosonSystem {
    pub fn new(cfg: SpinBosonConfig) -> Result<Self> {
        let h = build_hamiltonian(&cfg)?;
        Ok(Self {
            cfg,
            propagator: Propagator::new(&h)?,
        })
    }

    pub fn config(&self) -> &SpinBosonConfig {
        &self.cfg
    }

    /// exp(−iHt)|initial⟩, failing if the result leaks into the top Fock
    /// levels.
    pub fn evolve(&self, initial: &StateVector, t: f64) -> Result<StateVector> {
        if !initial.is_normalized() {
            return Err(Error::NotNormalized {
                norm: initial.norm(),
            });
        }
        let out = self.propagator.apply(initial, t)?;
        check_leakage(top_decile_population(&out, &self.cfg), self.cfg.fock_dim)?;
        Ok(out)
    }
}

/// One-shot exact evolution. Prefer [`SpinBosonSystem`] for time grids.
pub fn exact_evolve(cfg: &SpinBosonConfig, initial: &StateVector, t: f64) -> Result<StateVector> {
    SpinBosonSystem::new(*cfg)?.evolve(initial, t)
}

/// Reduced density matrix of the field.
pub fn field_density(state: &StateVector, cfg: &SpinBosonConfig) -> Result<ComplexMatrix> {
    partial_trace(state, &cfg.factor_dims(), &[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ops::{annihilation, collective, creation, number, pauli_x, pauli_z};
    use crate::numerics::{kron, StateVector};

    /// Kronecker-sum construction, independent of the entry-wise builder.
    fn kron_hamiltonian(cfg: &SpinBosonConfig) -> ComplexMatrix {
        let m = cfg.fock_dim;
        let n = cfg.n_spins;
        let id_f = ComplexMatrix::identity(m);
        let id_s = ComplexMatrix::identity(1 << n);
        let sz = collective(&pauli_z(), n).unwrap();
        let sx = collective(&pauli_x(), n).unwrap();
        let field = &annihilation(m) + &creation(m);
        let h1 = &kron(&id_f, &sz).unwrap() * cfg.delta;
        let h2 = &kron(&number(m), &id_s).unwrap() * cfg.omega;
        let h3 = &kron(&field, &sx).unwrap() * cfg.g;
        &(&h1 + &h2) + &h3
    }

    #[test]
    fn two_constructions_agree() {
        let cfg = SpinBosonConfig::new(2, 0.37, 1.1, 0.6, 40).unwrap();
        let a = build_hamiltonian(&cfg).unwrap();
        let b = kron_hamiltonian(&cfg);
        assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
        assert!(a.hermiticity_deviation() <= 1e-12);
    }

    #[test]
    fn free_field_is_diagonal() {
        let cfg = SpinBosonConfig::new(1, 0.0, 2.0, 0.0, 5).unwrap();
        let h = build_hamiltonian(&cfg).unwrap();
        for level in 0..5 {
            for s in 0..2 {
                let i = level * 2 + s;
                assert_eq!(h[(i, i)], C64::new(2.0 * level as f64, 0.0));
            }
        }
        assert_eq!(
            h.max_abs_diff(&ComplexMatrix::from_diag(
                &(0..10).map(|i| h[(i, i)]).collect::<Vec<_>>()
            ))
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn single_spin_without_splitting_commutes_with_sigma_x() {
        let cfg = SpinBosonConfig::new(1, 0.0, 1.0, 0.8, 12).unwrap();
        let h = build_hamiltonian(&cfg).unwrap();
        let sx = kron(&ComplexMatrix::identity(12), &pauli_x()).unwrap();
        let comm = &h.matmul(&sx).unwrap() - &sx.matmul(&h).unwrap();
        assert!(comm.max_abs() < 1e-14);
    }

    #[test]
    fn evolve_at_zero_time_is_identity() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.3, 1.0, 0.5).unwrap();
        let psi0 = initial_state(&cfg).unwrap();
        let out = exact_evolve(&cfg, &psi0, 0.0).unwrap();
        assert!(out.distance(&psi0).unwrap() < 1e-12);
    }

    #[test]
    fn number_state_only_picks_up_phase() {
        let cfg = SpinBosonConfig::new(1, 0.0, 1.3, 0.0, 6).unwrap();
        let psi =
            StateVector::product(&[StateVector::basis(6, 1), StateVector::basis(2, 0)]).unwrap();
        let t = 0.9;
        let out = exact_evolve(&cfg, &psi, t).unwrap();
        let expected = psi.scaled(C64::from_polar(1.0, -1.3 * t));
        assert!(out.distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn small_fock_space_leaks() {
        let cfg = SpinBosonConfig::new(2, 0.0, 1.0, 1.0, 4).unwrap();
        let psi0 = initial_state(&cfg).unwrap();
        let err = exact_evolve(&cfg, &psi0, std::f64::consts::PI).unwrap_err();
        assert_eq!(err.name(), "TruncationLeakage");
    }

    #[test]
    fn norm_preserved() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.4, 1.0, 0.5).unwrap();
        let sys = SpinBosonSystem::new(cfg).unwrap();
        let psi0 = initial_state(&cfg).unwrap();
        for t in [0.3, 2.0, 6.0] {
            assert!((sys.evolve(&psi0, t).unwrap().norm() - 1.0).abs() < 1e-9);
        }
    }
}
