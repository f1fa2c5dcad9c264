use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::coherent::{coherent_state, displacement_operator, field_diagnostics, FieldDiagnostics};
use super::model::initial_bath_state;
use super::SpinBosonConfig;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, StateVector};

/// Coherent-state displacement α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude(C64);

impl CoherentAmplitude {
    pub fn new(value: C64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> C64 {
        self.0
    }
}

/// U_F(t) applied to |0⟩ ⊗ |bath⟩ with Σσ_x|bath⟩ = S|bath⟩ is
/// e^{iφ}|α(t)⟩ ⊗ |bath⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingOrderState {
    /// Global phase φ = S²g²/ω² (ωt − sin ωt).
    pub phase: f64,
    pub alpha: CoherentAmplitude,
    pub bath_sector: i64,
}

impl LeadingOrderState {
    /// e^{iφ}|α⟩ on `fock_dim` levels.
    pub fn field_state(&self, fock_dim: usize) -> Result<StateVector> {
        Ok(coherent_state(self.alpha.value(), fock_dim)?.scaled(C64::from_polar(1.0, self.phase)))
    }
}

fn check_sector(cfg: &SpinBosonConfig, sector: i64) -> Result<()> {
    let n = cfg.n_spins as i64;
    if sector.abs() > n || (n - sector).rem_euclid(2) != 0 {
        return Err(Error::InvalidSector {
            sector,
            n_spins: cfg.n_spins,
        });
    }
    Ok(())
}

/// Closed-form U_F(t)|0⟩ in bath sector S.
///
/// The free rotation e^{−iωa†at} turns D(α̂) with α̂ = (Sg/ω)(1 − e^{iωt})
/// into the displacement α(t) = α̂ e^{−iωt} = (Sg/ω)(e^{−iωt} − 1); for
/// S = −N this is (Ng/ω)(1 − e^{−iωt}).
pub fn uf_apply(cfg: &SpinBosonConfig, bath_sector: i64, t: f64) -> Result<LeadingOrderState> {
    cfg.validate()?;
    check_sector(cfg, bath_sector)?;
    let c = bath_sector as f64 * cfg.g / cfg.omega;
    let wt = cfg.omega * t;
    Ok(LeadingOrderState {
        phase: c * c * (wt - wt.sin()),
        alpha: CoherentAmplitude::new(C64::new(c, 0.0) * (C64::from_polar(1.0, -wt) - 1.0))?,
        bath_sector,
    })
}

/// U_F(t) restricted to bath sector S, as an M×M field operator:
/// e^{iξ_S} e^{−iωa†at} D(α̂_S(t)).
pub fn uf_sector_operator(
    cfg: &SpinBosonConfig,
    bath_sector: i64,
    t: f64,
) -> Result<ComplexMatrix> {
    cfg.validate()?;
    check_sector(cfg, bath_sector)?;
    let c = bath_sector as f64 * cfg.g / cfg.omega;
    let wt = cfg.omega * t;
    let alpha_hat = C64::new(c, 0.0) * (1.0 - C64::from_polar(1.0, wt));
    let d = displacement_operator(alpha_hat, cfg.fock_dim)?;
    let xi = c * c * (wt - wt.sin());
    let rot: Vec<C64> = (0..cfg.fock_dim)
        .map(|n| C64::from_polar(1.0, xi - wt * n as f64))
        .collect();
    ComplexMatrix::from_diag(&rot).matmul(&d)
}

/// Leading-order joint state e^{iξ}|α(t)⟩ ⊗ Π|−1⟩_x.
pub fn leading_order_state(cfg: &SpinBosonConfig, t: f64) -> Result<StateVector> {
    let lo = uf_apply(cfg, -(cfg.n_spins as i64), t)?;
    StateVector::product(&[
        lo.field_state(cfg.fock_dim)?,
        initial_bath_state(cfg.n_spins)?,
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub density: ComplexMatrix,
    pub diagnostics: FieldDiagnostics,
}

/// |α(t)⟩⟨α(t)| for the standard preparation, with photon statistics.
pub fn leading_order_field_density(cfg: &SpinBosonConfig, t: f64) -> Result<FieldState> {
    let lo = uf_apply(cfg, -(cfg.n_spins as i64), t)?;
    let density = lo.field_state(cfg.fock_dim)?.density();
    let diagnostics = field_diagnostics(&density);
    Ok(FieldState {
        density,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::trace_distance;
    use crate::spin_boson::{field_density, initial_state, SpinBosonSystem};
    use std::f64::consts::PI;

    #[test]
    fn trivial_times() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 0.5).unwrap();
        let lo = uf_apply(&cfg, -2, 0.0).unwrap();
        assert_eq!(lo.phase, 0.0);
        assert_eq!(lo.alpha.value(), C64::new(0.0, 0.0));

        let lo = uf_apply(&cfg, -2, 2.0 * PI).unwrap();
        assert!(lo.alpha.value().norm() < 1e-15);
        assert!((lo.phase - 4.0 * 0.25 * 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn half_period_amplitude() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 0.5).unwrap();
        let lo = uf_apply(&cfg, -2, PI).unwrap();
        assert!((lo.alpha.value().norm() - 2.0).abs() < 1e-14);
        // (Ng/ω)(1 − e^{−iωt}) at ωt = π.
        assert!((lo.alpha.value() - C64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn invalid_sectors() {
        let cfg = SpinBosonConfig::with_auto_fock(3, 0.0, 1.0, 0.5).unwrap();
        assert_eq!(uf_apply(&cfg, -5, 1.0).unwrap_err().name(), "InvalidSector");
        assert_eq!(uf_apply(&cfg, 2, 1.0).unwrap_err().name(), "InvalidSector");
        assert!(uf_apply(&cfg, 1, 1.0).is_ok());
    }

    /// Frozen convention: the closed form, including the global phase,
    /// reproduces the Δ = 0 exact evolution amplitude by amplitude.
    #[test]
    fn convention_matches_exact_evolution() {
        for n in [1usize, 2] {
            let cfg = SpinBosonConfig::with_auto_fock(n, 0.0, 1.0, 0.7).unwrap();
            let sys = SpinBosonSystem::new(cfg).unwrap();
            let psi0 = initial_state(&cfg).unwrap();
            for t in [0.4, 1.9, PI, 5.3] {
                let exact = sys.evolve(&psi0, t).unwrap();
                let lo = leading_order_state(&cfg, t).unwrap();
                assert!(exact.distance(&lo).unwrap() < 1e-9, "N={n} t={t}");
            }
        }
    }

    #[test]
    fn sector_operator_matches_exact_on_fock_states() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 0.6).unwrap();
        let sys = SpinBosonSystem::new(cfg).unwrap();
        let bath = crate::spin_boson::initial_bath_state(2).unwrap();
        let t = 2.3;
        let uf = uf_sector_operator(&cfg, -2, t).unwrap();
        for k in 0..4 {
            let field = StateVector::basis(cfg.fock_dim, k);
            let joint = StateVector::product(&[field.clone(), bath.clone()]).unwrap();
            let exact = sys.evolve(&joint, t).unwrap();
            let closed = StateVector::product(&[uf.apply(&field).unwrap(), bath.clone()]).unwrap();
            assert!(exact.distance(&closed).unwrap() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn phase_does_not_enter_the_density() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 0.5).unwrap();
        let mut lo = uf_apply(&cfg, -2, 1.2).unwrap();
        let with_phase = lo.field_state(cfg.fock_dim).unwrap().density();
        lo.phase = 0.0;
        let without = lo.field_state(cfg.fock_dim).unwrap().density();
        assert!(with_phase.max_abs_diff(&without).unwrap() < 1e-15);
    }

    #[test]
    fn field_density_examples() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 0.5).unwrap();
        let fs = leading_order_field_density(&cfg, 0.0).unwrap();
        let vac = StateVector::basis(cfg.fock_dim, 0).density();
        assert!(fs.density.max_abs_diff(&vac).unwrap() < 1e-15);

        let fs = leading_order_field_density(&cfg, PI).unwrap();
        assert!(fs.diagnostics.mandel_q.unwrap().abs() < 1e-8);
        // max ⟨a†a⟩ = (2Ng/ω)² at ωt = π.
        assert!((fs.diagnostics.mean_n - 4.0).abs() < 1e-10);

        let exact = field_density(
            &SpinBosonSystem::new(cfg)
                .unwrap()
                .evolve(&initial_state(&cfg).unwrap(), PI)
                .unwrap(),
            &cfg,
        )
        .unwrap();
        assert!(trace_distance(&exact, &fs.density).unwrap() < 1e-8);
    }
}
