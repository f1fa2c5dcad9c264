//! N independent two-level systems under H = λ Σ σ_z,i prepared in a product
//! state.
//!
//! For product states every moment factorizes over sites, so ⟨H⟩, ΔH and the
//! collective-spin trajectory are O(N) closed forms valid at any N. The dense
//! state-vector check in [`dense_oracle_check`] validates them for N ≤ 12.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ops::{apply_local, pauli_x, pauli_y, pauli_z};
use crate::numerics::{matexp_hermitian_prop, ComplexMatrix, StateVector};

const SITE_NORM_TOL: f64 = 1e-12;
const MAX_ORACLE_SPINS: usize = 12;
const RESAMPLE_LIMIT: usize = 16;

/// Amplitudes of one site: `alpha` on |↓⟩, `beta` on |↑⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub alpha: C64,
    pub beta: C64,
}

impl Site {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !alpha.is_finite() || !beta.is_finite() || (norm - 1.0).abs() > SITE_NORM_TOL {
            return Err(Error::NotNormalized { norm: norm.sqrt() });
        }
        Ok(Self { alpha, beta })
    }

    /// Site with |β|² = `up_probability` and relative phase `phase` on β.
    pub fn from_up_probability(up_probability: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&up_probability) {
            return Err(Error::InvalidParameter(format!(
                "up probability {up_probability} outside [0, 1]"
            )));
        }
        Self::new(
            C64::new((1.0 - up_probability).sqrt(), 0.0),
            C64::from_polar(up_probability.sqrt(), phase),
        )
    }

    /// Site with magnetization m = |β|² − |α|².
    pub fn from_magnetization(m: f64, phase: f64) -> Result<Self> {
        Self::from_up_probability(0.5 * (1.0 + m), phase)
    }

    /// σ_x eigenstate with eigenvalue +1.
    pub fn plus_x() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: C64::new(s, 0.0),
            beta: C64::new(s, 0.0),
        }
    }

    /// ⟨σ_z⟩ = |β|² − |α|².
    pub fn magnetization(&self) -> f64 {
        self.beta.norm_sqr() - self.alpha.norm_sqr()
    }

    /// (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩).
    pub fn bloch(&self) -> [f64; 3] {
        let w = self.beta.conj() * self.alpha;
        [2.0 * w.re, 2.0 * w.im, self.magnetization()]
    }

    /// 1 − m² evaluated as 4|α|²|β|², which stays accurate near the poles.
    fn sigma_z_variance(&self) -> f64 {
        4.0 * self.alpha.norm_sqr() * self.beta.norm_sqr()
    }

    /// (β, α) in the |↑⟩, |↓⟩ basis.
    fn to_vector(self) -> StateVector {
        StateVector::new(vec![self.beta, self.alpha]).expect("site invariant guarantees unit norm")
    }
}

/// Product state Π_i (α_i|↓⟩ + β_i|↑⟩).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpinState {
    sites: Vec<Site>,
}

impl ProductSpinState {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidParameter(
                "product state needs N >= 1 sites".into(),
            ));
        }
        Ok(Self { sites })
    }

    /// N copies of the same site.
    pub fn uniform(n: usize, site: Site) -> Result<Self> {
        Self::new(vec![site; n])
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Dense 2^N state vector, site 0 most significant.
    pub fn to_state_vector(&self) -> Result<StateVector> {
        let factors: Vec<StateVector> = self.sites.iter().map(|s| s.to_vector()).collect();
        StateVector::product(&factors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_spins: usize,
    pub lambda: f64,
}

impl EnsembleConfig {
    pub fn new(n_spins: usize, lambda: f64) -> Result<Self> {
        let cfg = Self { n_spins, lambda };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(Error::InvalidParameter("n_spins must be >= 1".into()));
        }
        if !self.lambda.is_finite() || self.lambda == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and nonzero, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    fn check(&self, state: &ProductSpinState) -> Result<()> {
        self.validate()?;
        if state.n_sites() != self.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins,
                actual: state.n_sites(),
            });
        }
        Ok(())
    }
}

/// ⟨H⟩ = λ Σ_i (|β_i|² − |α_i|²).
pub fn mean_energy(state: &ProductSpinState, cfg: &EnsembleConfig) -> Result<f64> {
    cfg.check(state)?;
    Ok(cfg.lambda * state.sites.iter().map(Site::magnetization).sum::<f64>())
}

/// ΔH = |λ| √(Σ_i (1 − m_i²)).
pub fn energy_spread(state: &ProductSpinState, cfg: &EnsembleConfig) -> Result<f64> {
    cfg.check(state)?;
    Ok(cfg.lambda.abs()
        * state
            .sites
            .iter()
            .map(Site::sigma_z_variance)
            .sum::<f64>()
            .sqrt())
}

/// ΔH / ⟨H⟩.
pub fn relative_fluctuation(state: &ProductSpinState, cfg: &EnsembleConfig) -> Result<f64> {
    let mean = mean_energy(state, cfg)?;
    if mean.abs() <= 1e-12 * cfg.lambda.abs() * state.n_sites() as f64 {
        return Err(Error::ZeroMeanEnergy);
    }
    Ok(energy_spread(state, cfg)? / mean)
}

/// Distribution of independent sites for [`scaling_experiment`].
///
/// Phases of β relative to α are uniform on [0, 2π) in both variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SiteSampler {
    /// Every site has the same magnetization.
    Fixed { magnetization: f64 },
    /// Magnetization uniform on [m_min, m_max].
    UniformMagnetization { m_min: f64, m_max: f64 },
}

impl SiteSampler {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = match *self {
            SiteSampler::Fixed { magnetization } => (magnetization, magnetization),
            SiteSampler::UniformMagnetization { m_min, m_max } => (m_min, m_max),
        };
        if !(-1.0..=1.0).contains(&lo) || !(-1.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidParameter(format!(
                "magnetization interval [{lo}, {hi}] not inside [-1, 1]"
            )));
        }
        Ok(())
    }

    pub fn sample_site(&self, rng: &mut impl Rng) -> Site {
        let m = match *self {
            SiteSampler::Fixed { magnetization } => magnetization,
            SiteSampler::UniformMagnetization { m_min, m_max } => {
                if m_min == m_max {
                    m_min
                } else {
                    rng.random_range(m_min..=m_max)
                }
            }
        };
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        Site::from_magnetization(m, phase).expect("validated magnetization")
    }

    pub fn sample_state(&self, n: usize, rng: &mut impl Rng) -> Result<ProductSpinState> {
        ProductSpinState::new((0..n).map(|_| self.sample_site(rng)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mean_energy: f64,
    pub delta_h: f64,
    pub ratio: f64,
}

/// Per-N fluctuation data plus the log–log least-squares fit of ratio vs N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub slope: f64,
    pub intercept: f64,
}

impl ScalingTable {
    /// CSV with header `n,mean_energy,delta_h,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mean_energy,delta_h,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.n, r.mean_energy, r.delta_h, r.ratio
            ));
        }
        out
    }

    /// Fit sidecar `{"slope": ..., "intercept": ...}`.
    pub fn fit_json(&self) -> String {
        serde_json::json!({ "slope": self.slope, "intercept": self.intercept }).to_string()
    }
}

/// Ordinary least squares of ln|y| against ln x; returns (slope, intercept).
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    let first = logs.first().ok_or(Error::InsufficientPoints)?.0;
    if logs.iter().all(|&(x, _)| x == first) {
        return Err(Error::InsufficientPoints);
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Samples one product state per N (λ = 1) and fits the fluctuation scaling.
///
/// Each N draws from its own ChaCha stream keyed by (seed, N), so rows do not
/// depend on the order or multiplicity of `n_list`.
pub fn scaling_experiment(
    sampler: &SiteSampler,
    n_list: &[usize],
    seed: u64,
) -> Result<ScalingTable> {
    sampler.validate()?;
    if n_list.iter().any(|&n| n < 2) {
        return Err(Error::InvalidParameter(
            "scaling experiment needs N >= 2".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        let cfg = EnsembleConfig::new(n, 1.0)?;
        let mut row = None;
        for _ in 0..RESAMPLE_LIMIT {
            let state = sampler.sample_state(n, &mut rng)?;
            match relative_fluctuation(&state, &cfg) {
                Ok(ratio) => {
                    row = Some(ScalingRow {
                        n,
                        mean_energy: mean_energy(&state, &cfg)?,
                        delta_h: energy_spread(&state, &cfg)?,
                        ratio,
                    });
                    break;
                }
                Err(Error::ZeroMeanEnergy) => continue,
                Err(e) => return Err(e),
            }
        }
        rows.push(row.ok_or(Error::ZeroMeanEnergy)?);
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.ratio)).collect();
    let (slope, intercept) = fit_power_law(&points)?;
    Ok(ScalingTable {
        rows,
        slope,
        intercept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveSample {
    pub t: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub delta_jx: f64,
}

/// Site Bloch vector after evolving for time t: transverse components rotate
/// at 2λ, σ_z is conserved.
fn rotate(bloch: [f64; 3], lambda: f64, t: f64) -> [f64; 3] {
    let (s, c) = (2.0 * lambda * t).sin_cos();
    [
        bloch[0] * c - bloch[1] * s,
        bloch[1] * c + bloch[0] * s,
        bloch[2],
    ]
}

/// ⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩ and ΔJ_x on a time grid, J_a = Σ_i σ_a,i.
///
/// d⟨J_x⟩/dt = −2λ⟨J_y⟩, d⟨J_y⟩/dt = 2λ⟨J_x⟩. For a pure site
/// Var σ_x = 1 − x² = y² + z².
pub fn collective_spin_trajectory(
    state: &ProductSpinState,
    cfg: &EnsembleConfig,
    t_grid: &[f64],
) -> Result<Vec<CollectiveSample>> {
    cfg.check(state)?;
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("non-finite time in grid".into()));
    }
    let blochs: Vec<[f64; 3]> = state.sites.iter().map(Site::bloch).collect();
    Ok(t_grid
        .iter()
        .map(|&t| {
            let (mut jx, mut jy, mut jz, mut var) = (0.0, 0.0, 0.0, 0.0);
            for b in &blochs {
                let [x, y, z] = rotate(*b, cfg.lambda, t);
                jx += x;
                jy += y;
                jz += z;
                var += y * y + z * z;
            }
            CollectiveSample {
                t,
                jx,
                jy,
                jz,
                delta_jx: var.sqrt(),
            }
        })
        .collect())
}

/// Closed form vs dense evolution at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleOracleReport {
    pub n_spins: usize,
    pub t: f64,
    pub mean_energy_dev: f64,
    pub delta_h_dev: f64,
    pub j_dev: f64,
    pub delta_jx_dev: f64,
    pub max_deviation: f64,
}

/// Builds the 2^N state vector, evolves it with exp(−iλtσ_z) on every site,
/// and compares the dense moments with the closed forms.
pub fn dense_oracle_check(
    state: &ProductSpinState,
    cfg: &EnsembleConfig,
    t: f64,
) -> Result<EnsembleOracleReport> {
    cfg.check(state)?;
    let n = state.n_sites();
    if n > MAX_ORACLE_SPINS {
        return Err(Error::DimensionTooLarge {
            requested: 1 << n,
            max: 1 << MAX_ORACLE_SPINS,
        });
    }
    let dims = vec![2usize; n];
    let site_h = &pauli_z() * cfg.lambda;
    let step = matexp_hermitian_prop(&site_h, t)?;
    let mut psi = state.to_state_vector()?.into_amplitudes();
    for site in 0..n {
        psi = apply_local(&psi, &dims, &[site], &step)?;
    }
    let psi = StateVector::new(psi)?;

    // Σ_i op_i |ψ⟩
    let collective = |op: &ComplexMatrix| -> Result<Vec<C64>> {
        let mut acc = vec![C64::new(0.0, 0.0); psi.dim()];
        for site in 0..n {
            for (a, b) in acc
                .iter_mut()
                .zip(apply_local(psi.amplitudes(), &dims, &[site], op)?)
            {
                *a += b;
            }
        }
        Ok(acc)
    };
    // (⟨A⟩, ‖(A − ⟨A⟩)ψ‖) without the cancellation of ⟨A²⟩ − ⟨A⟩².
    let moments = |applied: &[C64]| -> (f64, f64) {
        let mean: C64 = psi
            .amplitudes()
            .iter()
            .zip(applied)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let spread = psi
            .amplitudes()
            .iter()
            .zip(applied)
            .map(|(a, b)| (b - a * mean.re).norm_sqr())
            .sum::<f64>()
            .sqrt();
        (mean.re, spread)
    };

    let (jx, djx) = moments(&collective(&pauli_x())?);
    let (jy, _) = moments(&collective(&pauli_y())?);
    let hz: Vec<C64> = collective(&pauli_z())?
        .into_iter()
        .map(|z| z * cfg.lambda)
        .collect();
    let (jz_energy, dh) = moments(&hz);
    let jz = jz_energy / cfg.lambda;

    let closed = collective_spin_trajectory(state, cfg, &[t])?[0];
    let mean_energy_dev = (mean_energy(state, cfg)? - jz_energy).abs();
    let delta_h_dev = (energy_spread(state, cfg)? - dh).abs();
    let j_dev = (closed.jx - jx)
        .abs()
        .max((closed.jy - jy).abs())
        .max((closed.jz - jz).abs());
    let delta_jx_dev = (closed.delta_jx - djx).abs();
    Ok(EnsembleOracleReport {
        n_spins: n,
        t,
        mean_energy_dev,
        delta_h_dev,
        j_dev,
        delta_jx_dev,
        max_deviation: mean_energy_dev
            .max(delta_h_dev)
            .max(j_dev)
            .max(delta_jx_dev),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::expectation;
    use crate::numerics::ops::collective;

    fn site(p_up: f64, phase: f64) -> Site {
        Site::from_up_probability(p_up, phase).unwrap()
    }

    #[test]
    fn all_up_mean_energy_and_zero_fluctuation() {
        let s = ProductSpinState::uniform(7, site(1.0, 0.0)).unwrap();
        let cfg = EnsembleConfig::new(7, 1.5).unwrap();
        assert_eq!(mean_energy(&s, &cfg).unwrap(), 1.5 * 7.0);
        assert_eq!(relative_fluctuation(&s, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_superposition_has_zero_mean_and_errors() {
        let s = ProductSpinState::uniform(4, site(0.5, 0.3)).unwrap();
        let cfg = EnsembleConfig::new(4, 1.0).unwrap();
        assert!(mean_energy(&s, &cfg).unwrap().abs() < 1e-15);
        assert_eq!(
            relative_fluctuation(&s, &cfg).unwrap_err(),
            Error::ZeroMeanEnergy
        );
    }

    #[test]
    fn three_quarter_sites_at_n300() {
        let s = ProductSpinState::uniform(300, site(0.75, 0.0)).unwrap();
        let cfg = EnsembleConfig::new(300, 1.0).unwrap();
        assert!((mean_energy(&s, &cfg).unwrap() - 150.0).abs() < 1e-10);
        assert!((relative_fluctuation(&s, &cfg).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn per_site_formula_matches_dense_operator_at_n8() {
        // Dense ⟨Σσ_z⟩ and ⟨(Σσ_z)²⟩ from the Kronecker-built operator.
        let sites: Vec<Site> = (0..8)
            .map(|k| site(0.1 + 0.1 * k as f64, 0.7 * k as f64))
            .collect();
        let s = ProductSpinState::new(sites).unwrap();
        let cfg = EnsembleConfig::new(8, 0.8).unwrap();
        let psi = s.to_state_vector().unwrap();
        let h = &collective(&pauli_z(), 8).unwrap() * 0.8;
        let h2 = h.matmul(&h).unwrap();
        let e = expectation(&h, &psi).unwrap();
        let e2 = expectation(&h2, &psi).unwrap();
        assert!(e.im.abs() < 1e-12);
        assert!((mean_energy(&s, &cfg).unwrap() - e.re).abs() < 1e-12);
        let dh = (e2.re - e.re * e.re).sqrt();
        assert!((energy_spread(&s, &cfg).unwrap() - dh).abs() < 1e-9);
    }

    #[test]
    fn quadrupling_n_halves_ratio() {
        let st = site(0.8, 1.1);
        let cfg1 = EnsembleConfig::new(25, 1.0).unwrap();
        let cfg4 = EnsembleConfig::new(100, 1.0).unwrap();
        let r1 = relative_fluctuation(&ProductSpinState::uniform(25, st).unwrap(), &cfg1).unwrap();
        let r4 = relative_fluctuation(&ProductSpinState::uniform(100, st).unwrap(), &cfg4).unwrap();
        assert!((r1 / r4 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_sampler_scaling() {
        let sampler = SiteSampler::Fixed { magnetization: 0.5 };
        let table = scaling_experiment(&sampler, &[100, 400], 3).unwrap();
        let sqrt3 = 3f64.sqrt();
        assert!((table.rows[0].ratio - sqrt3 / 10.0).abs() < 1e-12);
        assert!((table.rows[1].ratio - sqrt3 / 20.0).abs() < 1e-12);
        assert!((table.slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn repeated_n_is_rejected() {
        let sampler = SiteSampler::Fixed { magnetization: 0.5 };
        assert_eq!(
            scaling_experiment(&sampler, &[50, 50], 1).unwrap_err(),
            Error::InsufficientPoints
        );
    }

    #[test]
    fn zero_magnetization_sampler_exhausts_retries() {
        let sampler = SiteSampler::Fixed { magnetization: 0.0 };
        assert_eq!(
            scaling_experiment(&sampler, &[10, 20], 1).unwrap_err(),
            Error::ZeroMeanEnergy
        );
    }

    #[test]
    fn plus_x_transverse_magnitude_is_conserved() {
        let s = ProductSpinState::uniform(6, Site::plus_x()).unwrap();
        let cfg = EnsembleConfig::new(6, 1.0).unwrap();
        let grid: Vec<f64> = (0..40).map(|k| 0.173 * k as f64).collect();
        for p in collective_spin_trajectory(&s, &cfg, &grid).unwrap() {
            assert!((p.jx * p.jx + p.jy * p.jy - 36.0).abs() < 1e-10);
            assert_eq!(p.jz, 0.0);
        }
    }

    #[test]
    fn ehrenfest_finite_difference() {
        let sites: Vec<Site> = (0..5)
            .map(|k| site(0.2 + 0.15 * k as f64, 0.4 * k as f64))
            .collect();
        let s = ProductSpinState::new(sites).unwrap();
        let cfg = EnsembleConfig::new(5, 0.7).unwrap();
        let t0 = 1.3;
        let mut prev_err = f64::INFINITY;
        for h in [1e-2, 5e-3, 2.5e-3] {
            let pts = collective_spin_trajectory(&s, &cfg, &[t0 - h, t0, t0 + h]).unwrap();
            let deriv = (pts[2].jx - pts[0].jx) / (2.0 * h);
            let err = (deriv + 2.0 * cfg.lambda * pts[1].jy).abs();
            assert!(
                err < prev_err / 3.0,
                "central difference should converge O(h^2)"
            );
            prev_err = err;
        }
    }

    #[test]
    fn oracle_single_qubit_and_bounds() {
        let s = ProductSpinState::uniform(1, site(0.3, 0.9)).unwrap();
        let cfg = EnsembleConfig::new(1, 1.0).unwrap();
        for t in [0.0, 0.5, 7.0] {
            assert!(dense_oracle_check(&s, &cfg, t).unwrap().max_deviation <= 1e-10);
        }
        let big = ProductSpinState::uniform(13, site(0.3, 0.9)).unwrap();
        let cfg = EnsembleConfig::new(13, 1.0).unwrap();
        assert_eq!(
            dense_oracle_check(&big, &cfg, 1.0).unwrap_err().name(),
            "DimensionTooLarge"
        );
    }

    #[test]
    fn config_mismatch_and_invalid() {
        let s = ProductSpinState::uniform(3, site(0.3, 0.0)).unwrap();
        let cfg = EnsembleConfig {
            n_spins: 4,
            lambda: 1.0,
        };
        assert_eq!(
            mean_energy(&s, &cfg).unwrap_err().name(),
            "DimensionMismatch"
        );
        assert!(EnsembleConfig::new(3, 0.0).is_err());
        assert!(Site::new(C64::new(1.0, 0.0), C64::new(0.1, 0.0)).is_err());
        assert!(ProductSpinState::new(vec![]).is_err());
    }
}
