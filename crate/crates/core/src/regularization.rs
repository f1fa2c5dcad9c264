//! Meaning for lim_{N→∞} cos(Nx) and lim_{N→∞} sin(Nx).
//!
//! Writing cos(Nx) = 1 − ∫₀^{Nx} sin y dy and sin(Nx) = ∫₀^{Nx} cos y dy,
//! damping the integrands by e^{−εy}, sending N → ∞ first and ε → 0⁺
//! afterwards assigns both limits the value 0, the same value a long time
//! average produces. Taking ε → 0⁺ first leaves the oscillation intact.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad::integrate_adaptive;

/// Smallest Abel parameter accepted by a schedule.
pub const EPSILON_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Cos,
    Sin,
}

/// Decreasing Abel parameters and increasing averaging windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizationSchedule {
    epsilons: Vec<f64>,
    windows: Vec<f64>,
}

impl RegularizationSchedule {
    pub fn new(epsilons: Vec<f64>, windows: Vec<f64>) -> Result<Self> {
        if epsilons.is_empty() || windows.is_empty() {
            return Err(Error::InvalidParameter(
                "schedule needs at least one ε and one T".into(),
            ));
        }
        if let Some(&e) = epsilons
            .iter()
            .find(|&&e| !(e >= EPSILON_FLOOR) || !e.is_finite())
        {
            return Err(Error::InvalidEpsilon(e));
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "epsilons must strictly decrease".into(),
            ));
        }
        validate_windows(&windows)?;
        Ok(Self { epsilons, windows })
    }

    /// ε ∈ {1e-1, …, 1e-4} against T ∈ {1e1, …, 1e4}.
    pub fn standard() -> Self {
        Self::new(vec![1e-1, 1e-2, 1e-3, 1e-4], vec![1e1, 1e2, 1e3, 1e4]).unwrap()
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn windows(&self) -> &[f64] {
        &self.windows
    }
}

fn validate_windows(windows: &[f64]) -> Result<()> {
    if let Some(&t) = windows.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidWindow(t));
    }
    if windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "windows must strictly increase".into(),
        ));
    }
    Ok(())
}

/// ∫₀^∞ e^{−εy} trig(y) dy: ε/(1+ε²) for cos, 1/(1+ε²) for sin.
pub fn abel_integral(kind: TrigKind, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let d = 1.0 + epsilon * epsilon;
    Ok(match kind {
        TrigKind::Cos => epsilon / d,
        TrigKind::Sin => 1.0 / d,
    })
}

/// ∫₀^L e^{−εy} trig(y) dy for ε ≥ 0 and finite L ≥ 0.
pub fn damped_integral(kind: TrigKind, epsilon: f64, upper: f64) -> Result<f64> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let d = 1.0 + epsilon * epsilon;
    let decay = (-epsilon * upper).exp();
    let (s, c) = upper.sin_cos();
    Ok(match kind {
        TrigKind::Cos => (decay * (s - epsilon * c) + epsilon) / d,
        TrigKind::Sin => (1.0 - decay * (epsilon * s + c)) / d,
    })
}

/// ε → 0⁺ of [`abel_integral`]. The closed forms are rational in ε and
/// continuous at 0, so the limit is their value there.
pub fn abel_limit(kind: TrigKind) -> f64 {
    match kind {
        TrigKind::Cos => 0.0,
        TrigKind::Sin => 1.0,
    }
}

/// Abel-regularized stand-in for lim cos(Nx) or lim sin(Nx) at a given ε,
/// after N → ∞: 1 − ∫₀^∞ e^{−εy} sin y dy, resp. ∫₀^∞ e^{−εy} cos y dy.
pub fn regularized_trig_proxy(kind: TrigKind, epsilon: f64) -> Result<f64> {
    Ok(match kind {
        TrigKind::Cos => 1.0 - abel_integral(TrigKind::Sin, epsilon)?,
        TrigKind::Sin => abel_integral(TrigKind::Cos, epsilon)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedLimit {
    /// Limit with N → ∞ taken before ε → 0⁺.
    pub value: f64,
    /// (ε, proxy) for each ε of the schedule.
    pub proxies: Vec<(f64, f64)>,
}

/// lim_{N→∞} cos(Nx) or sin(Nx) under Abel regularization (x > 0).
pub fn regularized_trig_limit(
    kind: TrigKind,
    schedule: &RegularizationSchedule,
) -> Result<RegularizedLimit> {
    let proxies = schedule
        .epsilons
        .iter()
        .map(|&e| Ok((e, regularized_trig_proxy(kind, e)?)))
        .collect::<Result<Vec<_>>>()?;
    let value = match kind {
        TrigKind::Cos => 1.0 - abel_limit(TrigKind::Sin),
        TrigKind::Sin => abel_limit(TrigKind::Cos),
    };
    Ok(RegularizedLimit { value, proxies })
}

/// Opposite limit order: ε → 0⁺ at fixed N, which just returns trig(Nx).
pub fn eps_first_value(kind: TrigKind, n: f64, x: f64) -> Result<f64> {
    let upper = n * x;
    Ok(match kind {
        TrigKind::Cos => 1.0 - damped_integral(TrigKind::Sin, 0.0, upper)?,
        TrigKind::Sin => damped_integral(TrigKind::Cos, 0.0, upper)?,
    })
}

/// A real function of time, with closed-form averages where available.
#[derive(Clone)]
pub enum Signal {
    Constant(f64),
    Cos {
        amplitude: f64,
        omega: f64,
    },
    Sin {
        amplitude: f64,
        omega: f64,
    },
    Sum(Vec<Signal>),
    /// Arbitrary function; averaged by adaptive quadrature.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Constant(c) => write!(f, "Constant({c})"),
            Signal::Cos { amplitude, omega } => write!(f, "{amplitude}·cos({omega}t)"),
            Signal::Sin { amplitude, omega } => write!(f, "{amplitude}·sin({omega}t)"),
            Signal::Sum(parts) => f.debug_list().entries(parts).finish(),
            Signal::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Signal {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Signal::Constant(c) => *c,
            Signal::Cos { amplitude, omega } => amplitude * (omega * t).cos(),
            Signal::Sin { amplitude, omega } => amplitude * (omega * t).sin(),
            Signal::Sum(parts) => parts.iter().map(|p| p.eval(t)).sum(),
            Signal::Custom(f) => f(t),
        }
    }

    /// (1/T) ∫₀ᵀ f dt.
    pub fn window_average(&self, window: f64) -> Result<f64> {
        Ok(match self {
            Signal::Constant(c) => *c,
            Signal::Cos { amplitude, omega } => {
                if *omega == 0.0 {
                    *amplitude
                } else {
                    amplitude * (omega * window).sin() / (omega * window)
                }
            }
            Signal::Sin { amplitude, omega } => {
                if *omega == 0.0 {
                    0.0
                } else {
                    amplitude * (1.0 - (omega * window).cos()) / (omega * window)
                }
            }
            Signal::Sum(parts) => parts
                .iter()
                .map(|p| p.window_average(window))
                .sum::<Result<f64>>()?,
            Signal::Custom(f) => {
                let f = f.clone();
                integrate_adaptive(&move |t| f(t), 0.0, window, 1e-12 * window.max(1.0))? / window
            }
        })
    }

    /// Abel mean ε ∫₀^∞ e^{−εt} f(t) dt, in closed form; `None` for custom
    /// signals.
    pub fn abel_mean(&self, epsilon: f64) -> Option<f64> {
        let e2 = epsilon * epsilon;
        match self {
            Signal::Constant(c) => Some(*c),
            Signal::Cos { amplitude, omega } => Some(amplitude * e2 / (e2 + omega * omega)),
            Signal::Sin { amplitude, omega } => {
                Some(amplitude * epsilon * omega / (e2 + omega * omega))
            }
            Signal::Sum(parts) => parts.iter().map(|p| p.abel_mean(epsilon)).sum(),
            Signal::Custom(_) => None,
        }
    }

    /// Cesàro mean (1/K) Σ_{k=1}^{K} f(k).
    pub fn cesaro_mean(&self, terms: usize) -> f64 {
        (1..=terms).map(|k| self.eval(k as f64)).sum::<f64>() / terms as f64
    }
}

/// Time average of `signal` over [0, T] for each window T.
pub fn time_average(signal: &Signal, windows: &[f64]) -> Result<Vec<f64>> {
    validate_windows(windows)?;
    windows.iter().map(|&t| signal.window_average(t)).collect()
}

/// Which limit an equivalence report examines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Target {
    /// lim cos(Nx).
    Cos,
    /// lim sin(Nx).
    Sin,
    /// Control: a constant, whose every regularization returns itself.
    Constant(f64),
}

impl Target {
    fn signal(self) -> Signal {
        match self {
            Target::Cos => Signal::Cos {
                amplitude: 1.0,
                omega: 1.0,
            },
            Target::Sin => Signal::Sin {
                amplitude: 1.0,
                omega: 1.0,
            },
            Target::Constant(c) => Signal::Constant(c),
        }
    }

    fn abel_value(self, epsilon: f64) -> Result<f64> {
        match self {
            Target::Cos => regularized_trig_proxy(TrigKind::Cos, epsilon),
            Target::Sin => regularized_trig_proxy(TrigKind::Sin, epsilon),
            Target::Constant(c) => Ok(c),
        }
    }

    fn limit(self) -> f64 {
        match self {
            Target::Cos | Target::Sin => 0.0,
            Target::Constant(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub regularizer: String,
    pub parameter: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub target: Target,
    pub limit: f64,
    pub rows: Vec<ReportRow>,
    /// |Abel value at smallest ε − limit|.
    pub abel_residual: f64,
    /// |time average at largest T − limit|.
    pub time_average_residual: f64,
    /// |Abel value at smallest ε − time average at largest T|.
    pub endpoint_gap: f64,
    /// Abel residual ≤ 2ε_min and time-average residual ≤ 2/T_max.
    pub converged: bool,
}

impl EquivalenceReport {
    /// CSV with header `regularizer,parameter,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("regularizer,parameter,value\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.regularizer, r.parameter, r.value));
        }
        out
    }
}

/// Number of ε-first samples (N = 1..=ORDER_DEMO_TERMS, x = 1) in a report.
const ORDER_DEMO_TERMS: usize = 12;

/// Tabulates the Abel value per ε, the time average per T, the Cesàro mean
/// per window length (beyond the two regularizers of the model, included as
/// a third opinion), and the ε-first order of limits, which does not settle.
pub fn equivalence_report(
    target: Target,
    schedule: &RegularizationSchedule,
) -> Result<EquivalenceReport> {
    let signal = target.signal();
    let limit = target.limit();
    let mut rows = Vec::new();
    for &e in &schedule.epsilons {
        rows.push(ReportRow {
            regularizer: "abel".into(),
            parameter: e,
            value: target.abel_value(e)?,
        });
    }
    let averages = time_average(&signal, &schedule.windows)?;
    for (&t, &v) in schedule.windows.iter().zip(&averages) {
        rows.push(ReportRow {
            regularizer: "time_average".into(),
            parameter: t,
            value: v,
        });
    }
    for &t in &schedule.windows {
        let terms = t.round().max(1.0) as usize;
        rows.push(ReportRow {
            regularizer: "cesaro".into(),
            parameter: terms as f64,
            value: signal.cesaro_mean(terms),
        });
    }
    if let Some(kind) = match target {
        Target::Cos => Some(TrigKind::Cos),
        Target::Sin => Some(TrigKind::Sin),
        Target::Constant(_) => None,
    } {
        for n in 1..=ORDER_DEMO_TERMS {
            rows.push(ReportRow {
                regularizer: "eps_first".into(),
                parameter: n as f64,
                value: eps_first_value(kind, n as f64, 1.0)?,
            });
        }
    }

    let eps_min = *schedule.epsilons.last().expect("schedule is nonempty");
    let t_max = *schedule.windows.last().expect("schedule is nonempty");
    let abel_end = target.abel_value(eps_min)?;
    let avg_end = *averages.last().expect("schedule is nonempty");
    let abel_residual = (abel_end - limit).abs();
    let time_average_residual = (avg_end - limit).abs();
    Ok(EquivalenceReport {
        target,
        limit,
        rows,
        abel_residual,
        time_average_residual,
        endpoint_gap: (abel_end - avg_end).abs(),
        converged: abel_residual <= 2.0 * eps_min && time_average_residual <= 2.0 / t_max,
    })
}
