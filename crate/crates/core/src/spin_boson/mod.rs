//! N two-level systems coupled to a single boson mode without the
//! rotating-wave approximation:
//!
//! H = Δ Σ σ_z,i + ω a†a + g (a + a†) Σ σ_x,i.
//!
//! In the strong-coupling expansion the Δ-free part is solved exactly,
//! U_F(t) = e^{iξ̂} e^{−iωa†at} D(α̂(t)) with α̂ = (Ŝg/ω)(1 − e^{iωt}) and
//! ξ̂ = (Ŝg/ω)²(ωt − sin ωt), Ŝ = Σσ_x. With the bath in a Σσ_x eigenstate
//! the field ends up in a coherent state at leading order; the Δ-linear
//! correction moves the bath into an orthogonal sector and drops out of the
//! field's reduced density matrix.
//!
//! Basis: field factor first (Fock levels 0..M), then spins 1..N, each with
//! index 0 = |↑⟩.

mod coherent;
mod correction;
mod leading;
mod model;

pub use coherent::{coherent_state, displacement_operator, field_diagnostics, FieldDiagnostics};
pub use correction::{
    chi_prime_state, cross_term_magnitude, first_order_correction, riemann_decay_scan,
    traced_correction_contribution, CorrectionState, IntegrandForm, QuadratureSpec, RiemannScan,
    RiemannScanPoint,
};
pub use leading::{
    leading_order_field_density, leading_order_state, uf_apply, uf_sector_operator,
    CoherentAmplitude, FieldState, LeadingOrderState,
};
pub use model::{
    build_hamiltonian, exact_evolve, field_density, initial_bath_state, initial_state,
    top_decile_population, SpinBosonSystem,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::MAX_DIM;

/// Population allowed in the top 10% of Fock levels.
pub const LEAKAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinBosonConfig {
    pub n_spins: usize,
    pub delta: f64,
    pub omega: f64,
    pub g: f64,
    pub fock_dim: usize,
}

impl SpinBosonConfig {
    pub fn new(n_spins: usize, delta: f64, omega: f64, g: f64, fock_dim: usize) -> Result<Self> {
        let cfg = Self {
            n_spins,
            delta,
            omega,
            g,
            fock_dim,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config with the Fock dimension from [`recommended_fock_dim`].
    pub fn with_auto_fock(n_spins: usize, delta: f64, omega: f64, g: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        Self::new(
            n_spins,
            delta,
            omega,
            g,
            recommended_fock_dim(n_spins, g, omega),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(Error::InvalidParameter("n_spins must be >= 1".into()));
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega must be > 0, got {}",
                self.omega
            )));
        }
        if !self.delta.is_finite() || !self.g.is_finite() {
            return Err(Error::InvalidParameter("delta and g must be finite".into()));
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter("fock_dim must be >= 2".into()));
        }
        self.total_dim().map(|_| ())
    }

    pub fn spin_dim(&self) -> usize {
        1usize << self.n_spins.min(usize::BITS as usize - 1)
    }

    /// M · 2^N, capped at [`MAX_DIM`].
    pub fn total_dim(&self) -> Result<usize> {
        let requested = if self.n_spins >= 23 {
            usize::MAX
        } else {
            self.fock_dim.saturating_mul(1 << self.n_spins)
        };
        if requested > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                requested,
                max: MAX_DIM,
            });
        }
        Ok(requested)
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.fock_dim];
        dims.extend(std::iter::repeat_n(2, self.n_spins));
        dims
    }

    /// Largest coherent amplitude reached at leading order, 2N|g|/ω.
    pub fn max_alpha(&self) -> f64 {
        2.0 * self.n_spins as f64 * self.g.abs() / self.omega
    }
}

/// ceil(a² + 8a + 20) with a = 2N|g|/ω.
pub fn recommended_fock_dim(n_spins: usize, g: f64, omega: f64) -> usize {
    let a = 2.0 * n_spins as f64 * g.abs() / omega;
    (a * a + 8.0 * a + 20.0).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_sizing_rule() {
        assert_eq!(recommended_fock_dim(3, 1.0, 1.0), 104);
        assert_eq!(recommended_fock_dim(2, 0.5, 1.0), 40);
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(cfg.fock_dim, 68);
        assert_eq!(cfg.factor_dims(), vec![68, 2, 2]);
    }

    #[test]
    fn invalid_configs() {
        assert!(SpinBosonConfig::new(0, 0.0, 1.0, 1.0, 10).is_err());
        assert!(SpinBosonConfig::new(1, 0.0, 0.0, 1.0, 10).is_err());
        assert!(SpinBosonConfig::new(1, 0.0, 1.0, 1.0, 1).is_err());
        assert_eq!(
            SpinBosonConfig::new(20, 0.0, 1.0, 1.0, 10)
                .unwrap_err()
                .name(),
            "DimensionTooLarge"
        );
    }
}
