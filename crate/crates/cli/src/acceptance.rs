//! Acceptance suite: nine checks, each with its own runtime budget.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thermolimit::ensemble::{self, scaling_experiment, EnsembleConfig, SiteSampler};
use thermolimit::numerics::quad::integrate_adaptive;
use thermolimit::numerics::trace_distance;
use thermolimit::regularization::{
    abel_integral, abel_limit, damped_integral, regularized_trig_limit, RegularizationSchedule,
    TrigKind,
};
use thermolimit::spin_boson::{
    field_density, field_diagnostics, first_order_correction, initial_state,
    leading_order_field_density, leading_order_state, recommended_fock_dim, riemann_decay_scan,
    traced_correction_contribution, IntegrandForm, QuadratureSpec, SpinBosonConfig,
    SpinBosonSystem,
};
use thermolimit::zurek::{
    self, dominant_frequency, offdiag_bound, reduced_density, time_averaged_density, BathConfig,
};
use thermolimit::C64;

use crate::config::{Experiment, ExperimentConfig, RangeSpec};
use crate::error::CliError;
use crate::experiments;
use crate::output::{Format, Table};
use crate::sweep::sweep_table;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub seed: u64,
    /// Forces the Fock truncation of the spin-boson checks.
    pub fock_dim: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: crate::config::DEFAULT_SEED,
            fock_dim: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be evaluated; holds the error name.
    Error(String),
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    /// Headline number compared against `threshold`.
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One line of the pass/fail table.
    pub fn line(&self) -> String {
        let status = match &self.status {
            Status::Pass => "PASS".to_string(),
            Status::Fail => "FAIL".to_string(),
            Status::Error(name) => format!("FAIL ({name})"),
        };
        format!(
            "criterion {} {:<28} {:<24} {} [{:.2}s / {}s]",
            self.id,
            self.name,
            status,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

/// Outcome of a check body: (passed, metric, threshold, detail).
type Check = Result<(bool, f64, f64, String), CliError>;

struct Spec {
    id: u8,
    name: &'static str,
    budget_s: u64,
    check: fn(&Options) -> Check,
}

const CRITERIA: [Spec; 9] = [
    Spec {
        id: 1,
        name: "fluctuation scaling",
        budget_s: 5,
        check: fluctuation_scaling,
    },
    Spec {
        id: 2,
        name: "ensemble oracle",
        budget_s: 30,
        check: ensemble_oracle,
    },
    Spec {
        id: 3,
        name: "leading order exactness",
        budget_s: 120,
        check: leading_order_exactness,
    },
    Spec {
        id: 4,
        name: "first-order consistency",
        budget_s: 120,
        check: first_order_consistency,
    },
    Spec {
        id: 5,
        name: "riemann decay",
        budget_s: 30,
        check: riemann_decay,
    },
    Spec {
        id: 6,
        name: "spin-bath reduced density",
        budget_s: 60,
        check: zurek_density,
    },
    Spec {
        id: 7,
        name: "decoherence by averaging",
        budget_s: 5,
        check: decoherence_by_averaging,
    },
    Spec {
        id: 8,
        name: "abel limits",
        budget_s: 5,
        check: abel_limits,
    },
    Spec {
        id: 9,
        name: "determinism",
        budget_s: 60,
        check: determinism,
    },
];

pub fn criterion_ids() -> impl Iterator<Item = u8> {
    CRITERIA.iter().map(|s| s.id)
}

pub fn run_criterion(id: u8, opts: &Options) -> Option<CriterionResult> {
    let spec = CRITERIA.iter().find(|s| s.id == id)?;
    let start = Instant::now();
    let outcome = (spec.check)(opts);
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(spec.budget_s);
    let result = match outcome {
        Ok((ok, metric, threshold, detail)) => {
            let in_time = elapsed <= budget;
            CriterionResult {
                id,
                name: spec.name,
                status: if ok && in_time {
                    Status::Pass
                } else {
                    Status::Fail
                },
                metric,
                threshold,
                detail: if in_time {
                    detail
                } else {
                    format!("{detail}; over time budget")
                },
                elapsed,
                budget,
            }
        }
        Err(e) => CriterionResult {
            id,
            name: spec.name,
            status: Status::Error(match &e {
                CliError::Model(m) => m.name().to_string(),
                other => other.to_string(),
            }),
            metric: f64::NAN,
            threshold: f64::NAN,
            detail: e.to_string(),
            elapsed,
            budget,
        },
    };
    Some(result)
}

pub fn run_all(opts: &Options) -> Vec<CriterionResult> {
    criterion_ids()
        .filter_map(|id| run_criterion(id, opts))
        .collect()
}

/// Data table of a suite run. Timings are left out so that repeated runs
/// give identical bytes.
pub fn results_table(results: &[CriterionResult]) -> Table {
    let mut t = Table::new(&["criterion", "name", "status", "metric", "threshold"]);
    for r in results {
        let status = match &r.status {
            Status::Pass => "pass".to_string(),
            Status::Fail => "fail".to_string(),
            Status::Error(name) => format!("error:{name}"),
        };
        t.push(vec![
            (r.id as usize).into(),
            r.name.into(),
            status.as_str().into(),
            r.metric.into(),
            r.threshold.into(),
        ]);
    }
    t
}

fn fluctuation_scaling(opts: &Options) -> Check {
    let sampler = SiteSampler::UniformMagnetization {
        m_min: 0.3,
        m_max: 0.9,
    };
    let n_list: Vec<usize> = (1..=6).map(|k| 10usize.pow(k)).collect();
    let table = scaling_experiment(&sampler, &n_list, opts.seed)?;
    let err = (table.slope + 0.5).abs();
    Ok((err <= 0.05, err, 0.05, format!("slope {:.4}", table.slope)))
}

fn ensemble_oracle(opts: &Options) -> Check {
    let sampler = SiteSampler::UniformMagnetization {
        m_min: -1.0,
        m_max: 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for n in 1..=10 {
        let cfg = EnsembleConfig::new(n, 0.8)?;
        for _ in 0..20 {
            let state = sampler.sample_state(n, &mut rng)?;
            for t in [0.0, 0.7, 3.1] {
                worst = worst.max(ensemble::dense_oracle_check(&state, &cfg, t)?.max_deviation);
            }
        }
    }
    Ok((
        worst <= 1e-9,
        worst,
        1e-9,
        format!("max deviation {worst:.2e}"),
    ))
}

fn spin_boson_config(
    opts: &Options,
    n: usize,
    delta: f64,
    g: f64,
) -> Result<SpinBosonConfig, CliError> {
    let fock = opts
        .fock_dim
        .unwrap_or_else(|| recommended_fock_dim(n, g, 1.0));
    Ok(SpinBosonConfig::new(n, delta, 1.0, g, fock)?)
}

fn leading_order_exactness(opts: &Options) -> Check {
    let period = std::f64::consts::TAU;
    let (mut worst_td, mut worst_q) = (0.0f64, 0.0f64);
    for n in 1..=3 {
        for g in [0.5, 1.0] {
            let cfg = spin_boson_config(opts, n, 0.0, g)?;
            let system = SpinBosonSystem::new(cfg)?;
            let psi0 = initial_state(&cfg)?;
            for k in 0..16 {
                let t = 2.0 * period * k as f64 / 15.0;
                let rho = field_density(&system.evolve(&psi0, t)?, &cfg)?;
                let leading = leading_order_field_density(&cfg, t)?;
                worst_td = worst_td.max(trace_distance(&rho, &leading.density)?);
                for q in [
                    field_diagnostics(&rho).mandel_q,
                    leading.diagnostics.mandel_q,
                ]
                .into_iter()
                .flatten()
                {
                    worst_q = worst_q.max(q.abs());
                }
            }
        }
    }
    Ok((
        worst_td <= 1e-7 && worst_q <= 1e-6,
        worst_td,
        1e-7,
        format!("trace distance {worst_td:.2e}, |Q| {worst_q:.2e}"),
    ))
}

fn first_order_consistency(opts: &Options) -> Check {
    let t = std::f64::consts::TAU;
    let form = IntegrandForm::Derived;
    let mut ratios = Vec::new();
    let mut worst_cross = 0.0f64;
    for delta in [1e-2, 1e-3] {
        let cfg = spin_boson_config(opts, 2, delta, 1.0)?;
        let exact = SpinBosonSystem::new(cfg)?.evolve(&initial_state(&cfg)?, t)?;
        let lead = leading_order_state(&cfg, t)?;
        let quad = QuadratureSpec::for_config(&cfg, t, form);
        let corr = first_order_correction(&cfg, t, &quad, form)?;
        ratios.push(exact.distance(&lead)? / corr.norm);
        worst_cross = worst_cross.max(traced_correction_contribution(&cfg, t, &quad, form)?);
    }
    let ratio = ratios[1];
    Ok((
        (0.9..=1.1).contains(&ratio) && worst_cross <= 1e-10,
        ratio,
        1.0,
        format!(
            "ratio {:.5} (delta 1e-2: {:.5}), cross term {worst_cross:.2e}",
            ratio, ratios[0]
        ),
    ))
}

fn riemann_decay(_: &Options) -> Check {
    let n_list = [1, 2, 4, 8, 16, 32, 64];
    let t = std::f64::consts::TAU;
    let scan = riemann_decay_scan(1.0, 1.0, t, &n_list, IntegrandForm::Derived)?;
    let unit_shift = riemann_decay_scan(1.0, 1.0, t, &n_list, IntegrandForm::UnitShift)?;
    let max_over = |pts: &[thermolimit::spin_boson::RiemannScanPoint], ns: &[usize]| {
        pts.iter()
            .filter(|p| ns.contains(&p.n))
            .map(|p| p.magnitude)
            .fold(0.0, f64::max)
    };
    let low = max_over(&scan.points, &[1, 2]);
    let high = max_over(&scan.points, &[32, 64]);
    let unit_shift_ok =
        max_over(&unit_shift.points, &[32, 64]) < max_over(&unit_shift.points, &[1, 2]);
    Ok((
        high < low,
        high / low,
        1.0,
        format!("max N>=32 {high:.3e} vs N<=2 {low:.3e}; unit-shift form decays: {unit_shift_ok}"),
    ))
}

fn zurek_density(_: &Options) -> Check {
    let lambda = 1.0;
    let dt = 0.1;
    let samples = 50;
    let bin = std::f64::consts::TAU / (samples as f64 * dt);
    let (mut worst, mut worst_peak) = (0.0f64, 0.0f64);
    for n in 1..=12 {
        let cfg = BathConfig::new(n, lambda)?;
        let mut populations = Vec::with_capacity(samples);
        for k in 0..samples {
            let t = dt * k as f64;
            worst = worst.max(zurek::dense_oracle_check(&cfg, t)?.max_deviation);
            populations.push(reduced_density(&cfg, t)?.uu.re);
        }
        let peak = dominant_frequency(&populations, dt)?;
        worst_peak = worst_peak.max((peak - 2.0 * n as f64 * lambda).abs() / bin);
    }
    Ok((
        worst <= 1e-10 && worst_peak <= 1.0,
        worst,
        1e-10,
        format!("max deviation {worst:.2e}, peak offset {worst_peak:.2} bins"),
    ))
}

fn decoherence_by_averaging(_: &Options) -> Check {
    let lambda = 1.0;
    let mut worst_ratio = 0.0f64;
    for n in [1, 2, 5, 10, 50] {
        let cfg = BathConfig::new(n, lambda)?;
        for window in [1.0, 10.0, 100.0, 1e3, 1e4] {
            let mag = time_averaged_density(&cfg, window)?.offdiag_magnitude();
            worst_ratio = worst_ratio.max(mag / offdiag_bound(&cfg, window)?);
        }
    }
    let limit = BathConfig::thermodynamic_limit(lambda)?;
    let half = C64::new(0.5, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut exact_limit = true;
    for t in [0.0, 0.3, 17.0] {
        let r = reduced_density(&limit, t)?;
        exact_limit &= r.uu == half && r.dd == half && r.ud == zero && r.du == zero;
    }
    let avg = time_averaged_density(&limit, 10.0)?;
    exact_limit &= avg.uu == half && avg.dd == half && avg.ud == zero && avg.du == zero;
    Ok((
        worst_ratio <= 1.0 + 1e-12 && exact_limit,
        worst_ratio,
        1.0,
        format!("max coherence/bound {worst_ratio:.3}, infinite bath exact: {exact_limit}"),
    ))
}

fn abel_limits(_: &Options) -> Check {
    let mut worst_limit_ratio = 0.0f64;
    for eps in [1e-2, 1e-3, 1e-4] {
        for kind in [TrigKind::Cos, TrigKind::Sin] {
            let residual = (abel_integral(kind, eps)? - abel_limit(kind)).abs();
            worst_limit_ratio = worst_limit_ratio.max(residual / (2.0 * eps));
        }
    }
    let schedule = RegularizationSchedule::standard();
    let limits_zero = [TrigKind::Cos, TrigKind::Sin]
        .iter()
        .map(|&k| regularized_trig_limit(k, &schedule).map(|l| l.value == 0.0))
        .collect::<thermolimit::Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);

    // Closed forms against adaptive quadrature of the damped integrand, on a
    // finite window and on [0, 60/ε] where the dropped tail is below e^{-60}.
    let mut worst_quad = 0.0f64;
    for eps in [1.0, 0.1, 1e-2, 1e-3, 1e-4] {
        for kind in [TrigKind::Cos, TrigKind::Sin] {
            let f = damped(kind, eps);
            let numeric = integrate_adaptive(&f, 0.0, 60.0, 1e-13)?;
            worst_quad = worst_quad.max((numeric - damped_integral(kind, eps, 60.0)?).abs());
            if eps >= 0.1 {
                let numeric = integrate_adaptive(&f, 0.0, 60.0 / eps, 1e-13)?;
                worst_quad = worst_quad.max((numeric - abel_integral(kind, eps)?).abs());
            }
        }
    }
    Ok((
        worst_limit_ratio <= 1.0 && limits_zero && worst_quad <= 1e-10,
        worst_quad,
        1e-10,
        format!(
            "max residual/2eps {worst_limit_ratio:.3}, limits zero: {limits_zero}, quadrature gap {worst_quad:.2e}"
        ),
    ))
}

fn damped(kind: TrigKind, eps: f64) -> impl Fn(f64) -> f64 {
    move |y: f64| {
        (-eps * y).exp()
            * match kind {
                TrigKind::Cos => y.cos(),
                TrigKind::Sin => y.sin(),
            }
    }
}

fn determinism(opts: &Options) -> Check {
    let mut compared = 0usize;
    let mut identical = true;
    for experiment in [
        Experiment::Scaling,
        Experiment::Spinboson,
        Experiment::Zurek,
        Experiment::Regularize,
    ] {
        let mut cfg = ExperimentConfig::default_for(experiment);
        if experiment.is_stochastic() {
            cfg.seed = Some(opts.seed);
        }
        for format in [Format::Csv, Format::Json] {
            let a = experiments::run(&cfg, format)?;
            let b = experiments::run(&cfg, format)?;
            identical &= a == b;
            compared += a.files.len();
        }
    }
    let mut sweep = ExperimentConfig::default_for(Experiment::Zurek);
    sweep.set_parameter("times", json!({ "stop": 2.0, "points": 21 }))?;
    sweep.ranges.insert(
        "n_spins".into(),
        RangeSpec::List((1..=12).map(serde_json::Value::from).collect()),
    );
    let serial = sweep_table(&sweep, 1)?.to_csv();
    let parallel = sweep_table(&sweep, 4)?.to_csv();
    identical &= serial == parallel;
    compared += 1;

    let first = results_table(&[
        run_criterion(5, opts).expect("known criterion"),
        run_criterion(8, opts).expect("known criterion"),
    ]);
    let second = results_table(&[
        run_criterion(5, opts).expect("known criterion"),
        run_criterion(8, opts).expect("known criterion"),
    ]);
    identical &= first.to_csv() == second.to_csv();
    compared += 1;

    Ok((
        identical,
        compared as f64,
        compared as f64,
        format!("{compared} data files compared, identical: {identical}"),
    ))
}
