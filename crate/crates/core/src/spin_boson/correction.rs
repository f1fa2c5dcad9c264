//! First-order (Δ-linear) correction to the leading-order state and its
//! N → ∞ behaviour.
//!
//! ψ⁽¹⁾(t) = −iΔ U_F(t) ∫₀ᵗ U_F†(t′) Σσ_z U_F(t′) ψ(0) dt′.
//!
//! Σσ_z maps Π|−1⟩_x to χ′ = Σ_k (single flip at k), which lies in the
//! Σσ_x sector S′ = −N + 2. Conjugating by U_F in the two sectors leaves a
//! scalar phase e^{i(S² − S′²)(g/ω)²(ωt′ − sin ωt′)} and the coherent state
//! |(S − S′)(g/ω)(1 − e^{iωt′})⟩, i.e. phase coefficient 4(N − 1) and
//! amplitude 2(g/ω)(e^{iωt′} − 1). Treating a flip as a unit shift of Σσ_x
//! instead gives coefficient 2N − 1 and amplitude (g/ω)(e^{iωt′} − 1). That
//! variant is kept as [`IntegrandForm::UnitShift`] so the two can be
//! compared against exact evolution.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::leading::leading_order_state;
use super::model::initial_bath_state;
use super::{SpinBosonConfig, LEAKAGE_TOL};
use crate::error::{Error, Result};
use crate::numerics::ops::{apply_local, pauli_z};
use crate::numerics::quad::CompositeRule;
use crate::numerics::{partial_trace_outer, StateVector, MAX_DIM};

pub const MIN_NODES_PER_FIELD_PERIOD: usize = 64;
pub const MIN_NODES_PER_PHASE_PERIOD: usize = 8;
const DEFAULT_NODES_PER_PANEL: usize = 16;

/// Which integrand the correction and the decay scan use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrandForm {
    /// Sector shift S → S + 2: phase 4(N − 1)(g/ω)², amplitude 2(g/ω).
    #[default]
    Derived,
    /// Sector shift S → S + 1: phase (2N − 1)(g/ω)², amplitude (g/ω).
    UnitShift,
}

impl IntegrandForm {
    /// (phase coefficient, amplitude multiplier).
    fn coefficients(self, n_spins: usize) -> (f64, f64) {
        let n = n_spins as f64;
        match self {
            IntegrandForm::Derived => (4.0 * (n - 1.0), 2.0),
            IntegrandForm::UnitShift => (2.0 * n - 1.0, 1.0),
        }
    }
}

/// Scalar phase Φ(t′) and coherent amplitude b(t′) of the integrand.
#[derive(Debug, Clone, Copy)]
struct Integrand {
    phase_coeff: f64,
    amp: f64,
    omega: f64,
}

impl Integrand {
    fn new(form: IntegrandForm, n_spins: usize, omega: f64, g: f64) -> Self {
        let (coeff, mult) = form.coefficients(n_spins);
        let r = g / omega;
        Self {
            phase_coeff: coeff * r * r,
            amp: mult * r,
            omega,
        }
    }

    fn phase(&self, t: f64) -> f64 {
        let wt = self.omega * t;
        self.phase_coeff * (wt - wt.sin())
    }

    fn beta(&self, t: f64) -> C64 {
        self.amp * (C64::from_polar(1.0, self.omega * t) - 1.0)
    }

    /// Largest dΦ/dt over a period, 2ω · coefficient.
    fn max_rate(&self) -> f64 {
        2.0 * self.omega * self.phase_coeff.abs()
    }
}

/// Composite Gauss–Legendre layout for the time integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_panel: usize,
    pub panels: usize,
}

impl QuadratureSpec {
    /// Smallest layout on [0, t] meeting both node-density requirements,
    /// padded by 2×.
    pub fn auto(omega: f64, max_phase_rate: f64, t: f64) -> Self {
        let periods_field = omega * t.abs() / std::f64::consts::TAU;
        let periods_phase = max_phase_rate * t.abs() / std::f64::consts::TAU;
        let needed = (MIN_NODES_PER_FIELD_PERIOD as f64 * periods_field)
            .max(MIN_NODES_PER_PHASE_PERIOD as f64 * periods_phase);
        let panels = ((2.0 * needed) / DEFAULT_NODES_PER_PANEL as f64)
            .ceil()
            .max(1.0) as usize;
        Self {
            nodes_per_panel: DEFAULT_NODES_PER_PANEL,
            panels,
        }
    }

    /// Layout suited to the correction integral of `cfg` up to time t.
    pub fn for_config(cfg: &SpinBosonConfig, t: f64, form: IntegrandForm) -> Self {
        let integrand = Integrand::new(form, cfg.n_spins, cfg.omega, cfg.g);
        Self::auto(cfg.omega, integrand.max_rate(), t)
    }

    fn rule(&self, omega: f64, max_phase_rate: f64, t: f64) -> Result<CompositeRule> {
        let rule = CompositeRule::new(self.nodes_per_panel, self.panels)?;
        let total = rule.total_nodes() as f64;
        let tau = std::f64::consts::TAU;
        let per_field = total * (tau / omega) / t;
        if per_field < MIN_NODES_PER_FIELD_PERIOD as f64 {
            return Err(Error::QuadratureUnderResolved {
                nodes_per_period: per_field,
                required: MIN_NODES_PER_FIELD_PERIOD,
            });
        }
        if max_phase_rate > 0.0 {
            let per_phase = total * (tau / max_phase_rate) / t;
            if per_phase < MIN_NODES_PER_PHASE_PERIOD as f64 {
                return Err(Error::QuadratureUnderResolved {
                    nodes_per_period: per_phase,
                    required: MIN_NODES_PER_PHASE_PERIOD,
                });
            }
        }
        Ok(rule)
    }
}

/// Σ_k (single flip at k) of Π|−1⟩_x, obtained as Σσ_z Π|−1⟩_x. Norm √n.
pub fn chi_prime_state(n: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::InvalidParameter("chi' needs n >= 1".into()));
    }
    if n >= usize::BITS as usize - 1 || (1usize << n) > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            requested: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX),
            max: MAX_DIM,
        });
    }
    let bath = initial_bath_state(n)?;
    let dims = vec![2usize; n];
    let mut acc = vec![C64::new(0.0, 0.0); bath.dim()];
    for site in 0..n {
        for (a, b) in
            acc.iter_mut()
                .zip(apply_local(bath.amplitudes(), &dims, &[site], &pauli_z())?)
        {
            *a += b;
        }
    }
    StateVector::unnormalized(acc)
}

/// Unnormalized first-order correction ψ⁽¹⁾(t) on the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionState {
    pub amplitudes: StateVector,
    pub norm: f64,
}

/// Unnormalized truncated coherent amplitudes e^{−|γ|²/2} γⁿ/√n!.
fn coherent_amplitudes(gamma: C64, fock_dim: usize, out: &mut [C64], weight: C64) {
    let mut c = weight * (-0.5 * gamma.norm_sqr()).exp();
    for (n, o) in out.iter_mut().enumerate().take(fock_dim) {
        if n > 0 {
            c *= gamma / (n as f64).sqrt();
        }
        *o += c;
    }
}

/// ψ⁽¹⁾(t) by composite quadrature over t′, each node contributing an
/// exactly propagated coherent state.
pub fn first_order_correction(
    cfg: &SpinBosonConfig,
    t: f64,
    quad: &QuadratureSpec,
    form: IntegrandForm,
) -> Result<CorrectionState> {
    cfg.validate()?;
    let m = cfg.fock_dim;
    let chi = chi_prime_state(cfg.n_spins)?;
    if cfg.delta == 0.0 || t == 0.0 {
        let zero = StateVector::zeros(m * chi.dim());
        return Ok(CorrectionState {
            amplitudes: zero,
            norm: 0.0,
        });
    }
    let integrand = Integrand::new(form, cfg.n_spins, cfg.omega, cfg.g);
    let rule = quad.rule(cfg.omega, integrand.max_rate(), t)?;

    // U_F(t) in sector S′ = −N + 2: e^{iξ_{S′}} e^{−iωa†at} D(A).
    let s_prime = 2.0 - cfg.n_spins as f64;
    let c = s_prime * cfg.g / cfg.omega;
    let wt = cfg.omega * t;
    let big_a = c * (1.0 - C64::from_polar(1.0, wt));
    let xi = c * c * (wt - wt.sin());
    let rot = C64::from_polar(1.0, -wt);

    let mut field = vec![C64::new(0.0, 0.0); m];
    for (tp, w) in rule.nodes(0.0, t) {
        let b = integrand.beta(tp);
        // D(A)|b⟩ = e^{(A b* − A* b)/2} |A + b⟩
        let bch = 0.5 * (big_a * b.conj() - big_a.conj() * b);
        let weight = w * C64::from_polar(1.0, integrand.phase(tp)) * bch.exp();
        coherent_amplitudes((big_a + b) * rot, m, &mut field, weight);
    }
    let prefactor = C64::new(0.0, -cfg.delta) * C64::from_polar(1.0, xi);
    for f in &mut field {
        *f *= prefactor;
    }

    let field_norm2: f64 = field.iter().map(|f| f.norm_sqr()).sum();
    if field_norm2 > 0.0 {
        let first = m - m.div_ceil(10);
        let top: f64 = field[first..].iter().map(|f| f.norm_sqr()).sum();
        if top / field_norm2 > LEAKAGE_TOL {
            return Err(Error::TruncationLeakage {
                leakage: top / field_norm2,
                tolerance: LEAKAGE_TOL,
                fock_dim: m,
            });
        }
    }
    let amplitudes = StateVector::product(&[StateVector::unnormalized(field)?, chi])?;
    let norm = amplitudes.norm();
    Ok(CorrectionState { amplitudes, norm })
}

/// ‖Tr_bath(|a⟩⟨b| + |b⟩⟨a|)‖_F: the cross-term b contributes to the field's
/// reduced density matrix alongside a.
pub fn cross_term_magnitude(
    a: &StateVector,
    b: &StateVector,
    cfg: &SpinBosonConfig,
) -> Result<f64> {
    let x = partial_trace_outer(a.amplitudes(), b.amplitudes(), &cfg.factor_dims(), &[0])?;
    Ok(x.try_add(&x.dagger())?.frobenius_norm())
}

/// Cross-term between the leading order and ψ⁽¹⁾ in the field's reduced
/// density matrix. Vanishes because ⟨Π(−1)_x|χ′⟩ = 0.
pub fn traced_correction_contribution(
    cfg: &SpinBosonConfig,
    t: f64,
    quad: &QuadratureSpec,
    form: IntegrandForm,
) -> Result<f64> {
    let leading = leading_order_state(cfg, t)?;
    let corr = first_order_correction(cfg, t, quad, form)?;
    cross_term_magnitude(&leading, &corr.amplitudes, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannScanPoint {
    pub n: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannScan {
    pub points: Vec<RiemannScanPoint>,
    /// Max magnitude over the first ⌊len/2⌋ points.
    pub lower_max: f64,
    /// Max magnitude over the last ⌊len/2⌋ points.
    pub upper_max: f64,
    pub decays: bool,
}

/// |∫₀ᵗ e^{iΦ_N(t′)} ⟨0|D(b(t′))|0⟩ dt′| per N, with ⟨0|D(b)|0⟩ = e^{−|b|²/2}.
/// The phase grows with N while the smooth factor does not, so the integral
/// decays.
pub fn riemann_decay_scan(
    omega: f64,
    g: f64,
    t: f64,
    n_list: &[usize],
    form: IntegrandForm,
) -> Result<RiemannScan> {
    if !(omega > 0.0) || !(g > 0.0) || !(t > 0.0) {
        return Err(Error::InvalidParameter(
            "riemann scan needs omega > 0, g > 0, t > 0".into(),
        ));
    }
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "n_list must be increasing and >= 1".into(),
        ));
    }
    let points = n_list
        .iter()
        .map(|&n| {
            let integrand = Integrand::new(form, n, omega, g);
            let spec = QuadratureSpec::auto(omega, integrand.max_rate(), t);
            let rule = spec.rule(omega, integrand.max_rate(), t)?;
            let total: C64 = rule
                .nodes(0.0, t)
                .into_iter()
                .map(|(tp, w)| {
                    let smooth = (-0.5 * integrand.beta(tp).norm_sqr()).exp();
                    C64::from_polar(w * smooth, integrand.phase(tp))
                })
                .sum();
            Ok(RiemannScanPoint {
                n,
                magnitude: total.norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let half = points.len() / 2;
    let max_of = |pts: &[RiemannScanPoint]| pts.iter().map(|p| p.magnitude).fold(0.0, f64::max);
    let lower_max = max_of(&points[..half]);
    let upper_max = max_of(&points[points.len() - half..]);
    Ok(RiemannScan {
        decays: half > 0 && upper_max < lower_max,
        points,
        lower_max,
        upper_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ops::x_eigenstate;
    use crate::spin_boson::{initial_state, SpinBosonSystem};
    use std::f64::consts::TAU;

    /// Σ_k of explicit single-flip product states.
    fn explicit_chi(n: usize) -> StateVector {
        let mut acc = StateVector::zeros(1 << n);
        for k in 0..n {
            let factors: Vec<StateVector> = (0..n).map(|i| x_eigenstate(i == k)).collect();
            acc = acc.add(&StateVector::product(&factors).unwrap()).unwrap();
        }
        acc
    }

    #[test]
    fn chi_prime_matches_explicit_flips() {
        for n in 1..=5 {
            let chi = chi_prime_state(n).unwrap();
            assert!(chi.distance(&explicit_chi(n)).unwrap() < 1e-14);
            assert!((chi.norm() - (n as f64).sqrt()).abs() < 1e-14);
            let overlap = chi.inner(&initial_bath_state(n).unwrap()).unwrap();
            assert!(overlap.norm() < 1e-15);
        }
        assert!((chi_prime_state(4).unwrap().norm() - 2.0).abs() < 1e-14);
        assert_eq!(chi_prime_state(23).unwrap_err().name(), "DimensionTooLarge");
    }

    #[test]
    fn vanishes_for_zero_delta_or_time() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 1.0).unwrap();
        let q = QuadratureSpec::for_config(&cfg, TAU, IntegrandForm::Derived);
        assert_eq!(
            first_order_correction(&cfg, TAU, &q, IntegrandForm::Derived)
                .unwrap()
                .norm,
            0.0
        );
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.1, 1.0, 1.0).unwrap();
        assert_eq!(
            first_order_correction(&cfg, 0.0, &q, IntegrandForm::Derived)
                .unwrap()
                .norm,
            0.0
        );
    }

    #[test]
    fn coarse_quadrature_rejected() {
        let cfg = SpinBosonConfig::with_auto_fock(3, 0.01, 1.0, 1.0).unwrap();
        let q = QuadratureSpec {
            nodes_per_panel: 8,
            panels: 4,
        };
        let err = first_order_correction(&cfg, TAU, &q, IntegrandForm::Derived).unwrap_err();
        assert_eq!(err.name(), "QuadratureUnderResolved");
    }

    #[test]
    fn matches_exact_minus_leading_at_small_delta() {
        // Exact evolution minus the leading order, divided by Δ, converges
        // to ψ⁽¹⁾/Δ as Δ → 0.
        let t = 1.7;
        for n in [1usize, 2] {
            let cfg = SpinBosonConfig::with_auto_fock(n, 1e-4, 1.0, 0.8).unwrap();
            let exact = SpinBosonSystem::new(cfg)
                .unwrap()
                .evolve(&initial_state(&cfg).unwrap(), t)
                .unwrap();
            let lead = leading_order_state(&cfg, t).unwrap();
            let q = QuadratureSpec::for_config(&cfg, t, IntegrandForm::Derived);
            let corr = first_order_correction(&cfg, t, &q, IntegrandForm::Derived).unwrap();
            let predicted = lead.add(&corr.amplitudes).unwrap();
            let diff = exact.distance(&predicted).unwrap();
            assert!(diff < 1e-2 * corr.norm, "N={n}: {diff} vs {}", corr.norm);
        }
    }

    #[test]
    fn cross_term_vanishes_but_not_for_overlapping_bath() {
        let cfg = SpinBosonConfig::with_auto_fock(2, 0.05, 1.0, 1.0).unwrap();
        let q = QuadratureSpec::for_config(&cfg, 2.0, IntegrandForm::Derived);
        let c = traced_correction_contribution(&cfg, 2.0, &q, IntegrandForm::Derived).unwrap();
        assert!(c <= 1e-10);

        // Leading-order field with the bath in χ′/√N instead.
        let lo = crate::spin_boson::uf_apply(&cfg, -2, 2.0).unwrap();
        let chi = chi_prime_state(2).unwrap().normalize().unwrap();
        let lead = StateVector::product(&[lo.field_state(cfg.fock_dim).unwrap(), chi]).unwrap();
        let corr = first_order_correction(&cfg, 2.0, &q, IntegrandForm::Derived).unwrap();
        assert!(cross_term_magnitude(&lead, &corr.amplitudes, &cfg).unwrap() > 1e-4);

        let cfg0 = SpinBosonConfig::with_auto_fock(2, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(
            traced_correction_contribution(&cfg0, 2.0, &q, IntegrandForm::Derived).unwrap(),
            0.0
        );
    }

    #[test]
    fn riemann_scan_decays_for_both_forms() {
        let n_list = [1, 2, 4, 8, 16, 32, 64];
        for form in [IntegrandForm::Derived, IntegrandForm::UnitShift] {
            let scan = riemann_decay_scan(1.0, 1.0, TAU, &n_list, form).unwrap();
            assert!(scan.decays, "{form:?}: {scan:?}");
        }
        assert!(riemann_decay_scan(1.0, 0.0, TAU, &n_list, IntegrandForm::Derived).is_err());
        assert!(riemann_decay_scan(1.0, 1.0, TAU, &[4, 2], IntegrandForm::Derived).is_err());
    }
}
