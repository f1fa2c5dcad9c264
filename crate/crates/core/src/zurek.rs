//! A single spin coupled to N bath spins, H = λ τ_x Σ_i σ_x,i.
//!
//! With the bath prepared in Π_i |−1⟩_x the bath is an eigenstate of Σσ_x
//! with eigenvalue −N, so the interacting spin evolves under
//! exp(iNλt τ_x) and flops at Ω = 2Nλ while the joint state stays a
//! product. Coherences vanish only after the N → ∞ limit is regularized
//! (see [`crate::regularization`]), which is equivalent to a time average.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ops::{apply_local, pauli_x, x_eigenstate};
use crate::numerics::{kron, matexp_hermitian_prop, partial_trace, ComplexMatrix, StateVector};
use crate::regularization::{regularized_trig_limit, RegularizationSchedule, Signal, TrigKind};

const DENSITY_TOL: f64 = 1e-12;
const MAX_ORACLE_SPINS: usize = 12;

/// Bath size: a finite count, or the formal thermodynamic limit.
///
/// Serializes as an integer or the string `"infinite"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathSize {
    Finite(usize),
    Infinite,
}

impl Serialize for BathSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BathSize::Finite(n) => s.serialize_u64(*n as u64),
            BathSize::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for BathSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(BathSize::Finite(n)),
            Raw::Word(w) if w == "infinite" => Ok(BathSize::Infinite),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a spin count or \"infinite\", got {w:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathConfig {
    pub n_spins: BathSize,
    pub lambda: f64,
}

impl BathConfig {
    pub fn new(n_spins: usize, lambda: f64) -> Result<Self> {
        let cfg = Self {
            n_spins: BathSize::Finite(n_spins),
            lambda,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn thermodynamic_limit(lambda: f64) -> Result<Self> {
        let cfg = Self {
            n_spins: BathSize::Infinite,
            lambda,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == BathSize::Finite(0) {
            return Err(Error::InvalidParameter("bath needs N >= 1".into()));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    fn finite_n(&self) -> Result<usize> {
        self.validate()?;
        match self.n_spins {
            BathSize::Finite(n) => Ok(n),
            BathSize::Infinite => Err(Error::InvalidParameter(
                "operation needs a finite bath; use the limit variants".into(),
            )),
        }
    }
}

/// 2×2 density matrix of the interacting spin, indexed {↑, ↓}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitDensityMatrix {
    pub uu: C64,
    pub ud: C64,
    pub du: C64,
    pub dd: C64,
}

impl QubitDensityMatrix {
    /// Checks Hermiticity, unit trace and positivity, all to 1e-12.
    pub fn new(uu: C64, ud: C64, du: C64, dd: C64) -> Result<Self> {
        let rho = Self { uu, ud, du, dd };
        let herm = (ud - du.conj()).norm().max(uu.im.abs()).max(dd.im.abs());
        if herm > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let trace = uu.re + dd.re;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "density trace {trace} != 1"
            )));
        }
        if rho.min_eigenvalue() < -DENSITY_TOL {
            return Err(Error::InvalidParameter(
                "density matrix not positive".into(),
            ));
        }
        Ok(rho)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                actual: m.rows() * m.cols(),
            });
        }
        Self::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![self.uu, self.ud, self.du, self.dd]).unwrap()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.uu.re + self.dd.re);
        let half_gap = (0.25 * (self.uu.re - self.dd.re).powi(2) + self.ud.norm_sqr()).sqrt();
        mean - half_gap
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        self.uu.re.powi(2) + self.dd.re.powi(2) + 2.0 * self.ud.norm_sqr()
    }

    pub fn offdiag_magnitude(&self) -> f64 {
        self.ud.norm()
    }

    /// Largest entrywise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.uu - other.uu,
            self.ud - other.ud,
            self.du - other.du,
            self.dd - other.dd,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }
}

impl fmt::Display for QubitDensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.uu, self.ud, self.du, self.dd
        )
    }
}

/// (c_↓, c_↑) = (cos Nλt, i sin Nλt) for the preparation |↓⟩ Π|−1⟩_x.
pub fn evolve_interacting_spin(cfg: &BathConfig, t: f64) -> Result<(C64, C64)> {
    let n = cfg.finite_n()?;
    let (s, c) = (n as f64 * cfg.lambda * t).sin_cos();
    Ok((C64::new(c, 0.0), C64::new(0.0, s)))
}

/// ρ(t) = |ψ_I(t)⟩⟨ψ_I(t)|. For an infinite bath every entry takes its
/// regularized N → ∞ value, giving diag(1/2, 1/2).
pub fn reduced_density(cfg: &BathConfig, t: f64) -> Result<QubitDensityMatrix> {
    cfg.validate()?;
    let (cos2, sin2) = match cfg.n_spins {
        BathSize::Finite(n) => {
            let (s, c) = (2.0 * n as f64 * cfg.lambda * t).sin_cos();
            (c, s)
        }
        BathSize::Infinite => return limit_density(),
    };
    QubitDensityMatrix::new(
        C64::new(0.5 * (1.0 - cos2), 0.0),
        C64::new(0.0, 0.5 * sin2),
        C64::new(0.0, -0.5 * sin2),
        C64::new(0.5 * (1.0 + cos2), 0.0),
    )
}

fn limit_density() -> Result<QubitDensityMatrix> {
    let sched = RegularizationSchedule::standard();
    let cos_lim = regularized_trig_limit(TrigKind::Cos, &sched)?.value;
    let sin_lim = regularized_trig_limit(TrigKind::Sin, &sched)?.value;
    QubitDensityMatrix::new(
        C64::new(0.5 * (1.0 - cos_lim), 0.0),
        C64::new(0.0, 0.5 * sin_lim),
        C64::new(0.0, -0.5 * sin_lim),
        C64::new(0.5 * (1.0 + cos_lim), 0.0),
    )
}

/// Ω = 2Nλ; infinite for an infinite bath.
pub fn rabi_frequency(cfg: &BathConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(match cfg.n_spins {
        BathSize::Finite(n) => 2.0 * n as f64 * cfg.lambda,
        BathSize::Infinite => f64::INFINITY,
    })
}

/// (1/T) ∫₀ᵀ ρ(t) dt in closed form.
///
/// |ρ̄_↑↓| = (1 − cos ΩT)/(2ΩT) ≤ 1/(2NλT).
pub fn time_averaged_density(cfg: &BathConfig, window: f64) -> Result<QubitDensityMatrix> {
    cfg.validate()?;
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::InvalidWindow(window));
    }
    let omega = match cfg.n_spins {
        BathSize::Finite(_) => rabi_frequency(cfg)?,
        BathSize::Infinite => return limit_density(),
    };
    let cos_avg = Signal::Cos {
        amplitude: 1.0,
        omega,
    }
    .window_average(window)?;
    let sin_avg = Signal::Sin {
        amplitude: 1.0,
        omega,
    }
    .window_average(window)?;
    QubitDensityMatrix::new(
        C64::new(0.5 * (1.0 - cos_avg), 0.0),
        C64::new(0.0, 0.5 * sin_avg),
        C64::new(0.0, -0.5 * sin_avg),
        C64::new(0.5 * (1.0 + cos_avg), 0.0),
    )
}

/// Upper bound 1/(2NλT) on the averaged coherence.
pub fn offdiag_bound(cfg: &BathConfig, window: f64) -> Result<f64> {
    Ok(match cfg.n_spins {
        BathSize::Finite(n) => 1.0 / (2.0 * n as f64 * cfg.lambda * window),
        BathSize::Infinite => 0.0,
    })
}

/// |ψ(0)⟩ = |↓⟩ ⊗ Π_i |−1⟩_x on factors [spin, bath_1, …, bath_N].
pub fn initial_joint_state(n: usize) -> Result<StateVector> {
    let mut factors = vec![StateVector::basis(2, 1)];
    factors.extend(std::iter::repeat_n(x_eigenstate(false), n));
    StateVector::product(&factors)
}

/// Joint state at time t from the dense simulator: the couplings
/// λ τ_x σ_x,i commute, so exp(−iHt) is the product of the two-site
/// propagators exp(−iλt τ_x⊗σ_x,i).
pub fn dense_joint_state(cfg: &BathConfig, t: f64) -> Result<StateVector> {
    let n = cfg.finite_n()?;
    if n > MAX_ORACLE_SPINS {
        return Err(Error::DimensionTooLarge {
            requested: 1 << (n + 1),
            max: 1 << (MAX_ORACLE_SPINS + 1),
        });
    }
    let coupling = &kron(&pauli_x(), &pauli_x())? * cfg.lambda;
    let step = matexp_hermitian_prop(&coupling, t)?;
    let dims = vec![2usize; n + 1];
    let mut psi = initial_joint_state(n)?.into_amplitudes();
    for bath_site in 1..=n {
        psi = apply_local(&psi, &dims, &[0, bath_site], &step)?;
    }
    StateVector::new(psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZurekOracleReport {
    pub n_spins: usize,
    pub t: f64,
    pub max_deviation: f64,
}

/// Partial trace of the dense joint evolution vs [`reduced_density`].
pub fn dense_oracle_check(cfg: &BathConfig, t: f64) -> Result<ZurekOracleReport> {
    let n = cfg.finite_n()?;
    let psi = dense_joint_state(cfg, t)?;
    let dims = vec![2usize; n + 1];
    let rho = partial_trace(&psi, &dims, &[0])?;
    let closed = reduced_density(cfg, t)?.to_matrix();
    Ok(ZurekOracleReport {
        n_spins: n,
        t,
        max_deviation: rho.max_abs_diff(&closed)?,
    })
}

/// Angular frequency of the largest non-DC discrete Fourier peak of
/// uniformly spaced samples.
pub fn dominant_frequency(samples: &[f64], dt: f64) -> Result<f64> {
    let n = samples.len();
    if n < 4 || !(dt > 0.0) {
        return Err(Error::InvalidParameter(
            "need >= 4 samples and dt > 0".into(),
        ));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut best = (0usize, -1.0f64);
    for k in 1..=n / 2 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &x) in samples.iter().enumerate() {
            let phase = -std::f64::consts::TAU * (k * j) as f64 / n as f64;
            acc += C64::from_polar(x - mean, phase);
        }
        if acc.norm() > best.1 {
            best = (k, acc.norm());
        }
    }
    Ok(std::f64::consts::TAU * best.0 as f64 / (n as f64 * dt))
}

/// Trajectory CSV `t,rho_uu,rho_dd,re_rho_ud,im_rho_ud`.
pub fn trajectory_csv(cfg: &BathConfig, t_grid: &[f64]) -> Result<String> {
    let mut out = String::from("t,rho_uu,rho_dd,re_rho_ud,im_rho_ud\n");
    for &t in t_grid {
        let r = reduced_density(cfg, t)?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t, r.uu.re, r.dd.re, r.ud.re, r.ud.im
        ));
    }
    Ok(out)
}

/// Limit report: the averaged coherence against its 1/(2NλT) bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub n: BathSize,
    pub window: f64,
    pub offdiag_bound: f64,
    pub offdiag_max: f64,
}

pub fn limit_report(cfg: &BathConfig, window: f64) -> Result<LimitReport> {
    Ok(LimitReport {
        n: cfg.n_spins,
        window,
        offdiag_bound: offdiag_bound(cfg, window)?,
        offdiag_max: time_averaged_density(cfg, window)?.offdiag_magnitude(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ops::collective;
    use crate::numerics::quad::CompositeRule;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn initial_amplitudes_and_quarter_flop() {
        let cfg = BathConfig::new(3, 0.5).unwrap();
        assert_eq!(
            evolve_interacting_spin(&cfg, 0.0).unwrap(),
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
        );
        let t = FRAC_PI_2 / (3.0 * 0.5);
        let (d, u) = evolve_interacting_spin(&cfg, t).unwrap();
        assert!(d.norm() < 1e-15);
        assert!((u - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn amplitudes_match_full_hamiltonian_propagator_n6() {
        // Full 2^7-dimensional H = λ τ_x ⊗ Σσ_x built by Kronecker products.
        let n = 6;
        let cfg = BathConfig::new(n, 1.0).unwrap();
        let h = kron(&pauli_x(), &collective(&pauli_x(), n).unwrap()).unwrap();
        for t in [0.05, 0.4, 1.7] {
            let u = matexp_hermitian_prop(&h, t).unwrap();
            let psi = u.apply(&initial_joint_state(n).unwrap()).unwrap();
            let (d, up) = evolve_interacting_spin(&cfg, t).unwrap();
            let bath = StateVector::product(&vec![x_eigenstate(false); n]).unwrap();
            let expected =
                StateVector::product(&[StateVector::new(vec![up, d]).unwrap(), bath]).unwrap();
            assert!(psi.distance(&expected).unwrap() < 1e-10);
        }
    }

    #[test]
    fn density_examples() {
        let cfg = BathConfig::new(2, 1.0).unwrap();
        let r0 = reduced_density(&cfg, 0.0).unwrap();
        assert_eq!(r0.dd.re, 1.0);
        assert_eq!(r0.uu.re, 0.0);

        // 2Nλt = π: full flop.
        let r = reduced_density(&cfg, PI / 4.0).unwrap();
        assert!((r.uu.re - 1.0).abs() < 1e-15 && r.offdiag_magnitude() < 1e-15);

        // 2Nλt = π/2.
        let r = reduced_density(&cfg, PI / 8.0).unwrap();
        assert!((r.uu.re - 0.5).abs() < 1e-15 && (r.dd.re - 0.5).abs() < 1e-15);
        assert!((r.ud - C64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn reduced_state_stays_pure() {
        let cfg = BathConfig::new(5, 0.3).unwrap();
        for k in 0..30 {
            let r = reduced_density(&cfg, 0.21 * k as f64).unwrap();
            assert!((r.purity() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rabi_frequency_linear_in_n() {
        assert_eq!(
            rabi_frequency(&BathConfig::new(1, 1.0).unwrap()).unwrap(),
            2.0
        );
        assert_eq!(
            rabi_frequency(&BathConfig::new(8, 0.5).unwrap()).unwrap(),
            8.0
        );
        assert!(
            rabi_frequency(&BathConfig::thermodynamic_limit(1.0).unwrap())
                .unwrap()
                .is_infinite()
        );
    }

    #[test]
    fn fourier_peak_at_rabi_frequency() {
        let dt = 0.1;
        let samples = 50;
        let bin = std::f64::consts::TAU / (samples as f64 * dt);
        for n in 1..=12 {
            let cfg = BathConfig::new(n, 1.0).unwrap();
            let series: Vec<f64> = (0..samples)
                .map(|k| reduced_density(&cfg, k as f64 * dt).unwrap().uu.re)
                .collect();
            let peak = dominant_frequency(&series, dt).unwrap();
            assert!(
                (peak - rabi_frequency(&cfg).unwrap()).abs() <= bin,
                "N={n}: peak {peak}"
            );
        }
    }

    #[test]
    fn full_period_average_is_half() {
        let cfg = BathConfig::new(4, 0.7).unwrap();
        let r = time_averaged_density(&cfg, PI / (4.0 * 0.7)).unwrap();
        assert!((r.uu.re - 0.5).abs() < 1e-15);
        assert!(r.offdiag_magnitude() < 1e-15);
    }

    #[test]
    fn averaged_coherence_bound_and_quadrature() {
        let cfg = BathConfig::new(10, 1.0).unwrap();
        let r = time_averaged_density(&cfg, 100.0).unwrap();
        assert!(r.offdiag_magnitude() <= 5e-4);

        // Independent check: composite quadrature of ρ_↑↓(t) itself.
        let rule = CompositeRule::new(16, 400).unwrap();
        let im = rule.integrate(0.0, 100.0, |t| reduced_density(&cfg, t).unwrap().ud.im) / 100.0;
        let uu = rule.integrate(0.0, 100.0, |t| reduced_density(&cfg, t).unwrap().uu.re) / 100.0;
        assert!((im - r.ud.im).abs() < 1e-12);
        assert!((uu - r.uu.re).abs() < 1e-12);
    }

    #[test]
    fn infinite_bath_gives_decohered_state() {
        let cfg = BathConfig::thermodynamic_limit(1.0).unwrap();
        let half = C64::new(0.5, 0.0);
        for r in [
            time_averaged_density(&cfg, 3.0).unwrap(),
            reduced_density(&cfg, 0.7).unwrap(),
        ] {
            assert_eq!((r.uu, r.dd), (half, half));
            assert_eq!(r.ud, C64::new(0.0, 0.0));
            assert_eq!(r.du, C64::new(0.0, 0.0));
        }
        assert!(evolve_interacting_spin(&cfg, 1.0).is_err());
    }

    #[test]
    fn invalid_window() {
        let cfg = BathConfig::new(2, 1.0).unwrap();
        assert_eq!(
            time_averaged_density(&cfg, 0.0).unwrap_err(),
            Error::InvalidWindow(0.0)
        );
        assert_eq!(
            time_averaged_density(&cfg, -1.0).unwrap_err(),
            Error::InvalidWindow(-1.0)
        );
    }

    #[test]
    fn oracle_small_and_bound() {
        let cfg = BathConfig::new(1, 1.3).unwrap();
        for t in [0.0, 0.3, 2.2, 9.0] {
            assert!(dense_oracle_check(&cfg, t).unwrap().max_deviation <= 1e-12);
        }
        let big = BathConfig::new(13, 1.0).unwrap();
        assert_eq!(
            dense_oracle_check(&big, 0.1).unwrap_err().name(),
            "DimensionTooLarge"
        );
    }

    #[test]
    fn bath_size_serde() {
        let cfg: BathConfig = serde_json::from_str(r#"{"n_spins": 4, "lambda": 1.0}"#).unwrap();
        assert_eq!(cfg.n_spins, BathSize::Finite(4));
        let cfg: BathConfig =
            serde_json::from_str(r#"{"n_spins": "infinite", "lambda": 1.0}"#).unwrap();
        assert_eq!(cfg.n_spins, BathSize::Infinite);
    }
}
