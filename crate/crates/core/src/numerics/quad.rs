//! Gauss–Legendre quadrature: fixed composite panels for oscillatory
//! integrands with a known fastest phase rate, and adaptive bisection for
//! everything else.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Composite Gauss–Legendre rule over equal panels.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    /// Reference nodes and weights on [−1, 1].
    reference: Vec<(f64, f64)>,
    panels: usize,
}

impl CompositeRule {
    pub fn new(nodes_per_panel: usize, panels: usize) -> Result<Self> {
        let rule = GaussLegendre::new(nodes_per_panel).map_err(|_| {
            Error::InvalidParameter(format!("Gauss-Legendre order {nodes_per_panel} < 2"))
        })?;
        if panels == 0 {
            return Err(Error::InvalidParameter("zero quadrature panels".into()));
        }
        Ok(Self {
            reference: rule.as_node_weight_pairs().to_vec(),
            panels,
        })
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.reference.len()
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn total_nodes(&self) -> usize {
        self.panels * self.reference.len()
    }

    /// Physical (node, weight) pairs on [a, b].
    pub fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let h = (b - a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.total_nodes());
        for p in 0..self.panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            for &(x, w) in &self.reference {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes(a, b).into_iter().map(|(t, w)| w * f(t)).sum()
    }
}

const ADAPTIVE_ORDER: usize = 12;
const MAX_DEPTH: u32 = 40;

/// Adaptive Gauss–Legendre integration to absolute tolerance `tol`.
///
/// Each interval is accepted when the single-panel estimate agrees with the
/// two-half-panel estimate to within the interval's share of `tol`.
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = CompositeRule::new(ADAPTIVE_ORDER, 1)?;
    let whole = rule.integrate(a, b, f);
    recurse(&rule, f, a, b, whole, tol, 0)
}

fn recurse(
    rule: &CompositeRule,
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    let refined = left + right;
    if !refined.is_finite() {
        return Err(Error::QuadratureError { a, b });
    }
    if (refined - whole).abs() <= tol {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureError { a, b });
    }
    Ok(recurse(rule, f, a, m, left, 0.5 * tol, depth + 1)?
        + recurse(rule, f, m, b, right, 0.5 * tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_integrates_polynomials_exactly() {
        let rule = CompositeRule::new(4, 3).unwrap();
        let v = rule.integrate(0.0, 3.0, |x| x.powi(7));
        assert!((v - 3f64.powi(8) / 8.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let v = integrate_adaptive(&|x: f64| (20.0 * x).cos(), 0.0, 3.0, 1e-12).unwrap();
        assert!((v - (60f64).sin() / 20.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_failure_on_singularity() {
        let err = integrate_adaptive(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12).unwrap_err();
        assert_eq!(err.name(), "QuadratureError");
    }

    #[test]
    fn order_below_two_rejected() {
        assert!(CompositeRule::new(1, 4).is_err());
    }
}
