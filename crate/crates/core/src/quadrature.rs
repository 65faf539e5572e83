//! Composite Gauss–Legendre rules on finite intervals.
//!
//! Nodes are computed by Newton iteration on the three-term Legendre
//! recurrence. All nodes lie strictly inside the integration interval, so
//! integrable endpoint singularities are never evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[order - 1 - i] = -x;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Integrates `f` over `[a, b]` split into `panels` equal panels.
    pub fn composite<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|j| {
                let lo = a + h * j as f64;
                let hi = if j + 1 == panels { b } else { lo + h };
                self.integrate(f, lo, hi)
            })
            .sum()
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    if order == 1 {
        (x, 1.0)
    } else {
        (p1, d)
    }
}

/// Parameters of the composite rule used for improper kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Number of panels on each half of the unit interval.
    pub panels: usize,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Accepted difference between the rule and its half-panel refinement.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    /// 2000 nodes in total with the default kernel tolerance.
    fn default() -> Self {
        Self {
            panels: 100,
            order: 10,
            tolerance: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn nodes(&self) -> usize {
        2 * self.panels * self.order
    }
}

/// Integrates `u^(l-1) (1-u)^(r-1) h(u)` over `(0, 1)` for endpoint orders
/// `l = lead_left`, `r = lead_right` and a bounded regular part `h`.
///
/// `h` receives `(ln u, ln(1-u))` rather than `u`, so that points graded
/// towards an endpoint keep full relative precision even when `u` or `1-u`
/// underflows. Each half of the interval is mapped by `u = w^(1/l) / 2`
/// (mirrored on the right), which absorbs the algebraic factor exactly.
/// Both orders must be positive. The rule is repeated with half the panels
/// and the difference is checked against `spec.tolerance`.
pub fn integrate_unit_interval<F: Fn(f64, f64) -> f64>(
    h: &F,
    lead_left: f64,
    lead_right: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(lead_left > 0.0 && lead_right > 0.0) {
        return Err(Error::Domain(format!(
            "non-integrable endpoint behaviour (orders {lead_left}, {lead_right})"
        )));
    }
    if spec.panels < 2 || spec.order < 1 {
        return Err(Error::Domain("quadrature needs at least 2 panels".into()));
    }
    let rule = GaussLegendre::new(spec.order);
    let ln_half = -std::f64::consts::LN_2;
    // ∫_0^{1/2} u^(l-1) φ(u) du = 2^(-l) / l ∫_0^1 φ(w^(1/l) / 2) dw
    let left = |w: f64| {
        let ln_u = ln_half + w.ln() / lead_left;
        let ln_c = (-ln_u.exp()).ln_1p();
        ((lead_right - 1.0) * ln_c).exp() * h(ln_u, ln_c)
    };
    let right = |w: f64| {
        let ln_c = ln_half + w.ln() / lead_right;
        let ln_u = (-ln_c.exp()).ln_1p();
        ((lead_left - 1.0) * ln_u).exp() * h(ln_u, ln_c)
    };
    let scale_left = 0.5f64.powf(lead_left) / lead_left;
    let scale_right = 0.5f64.powf(lead_right) / lead_right;
    let run = |panels: usize| {
        scale_left * rule.composite(&left, 0.0, 1.0, panels)
            + scale_right * rule.composite(&right, 0.0, 1.0, panels)
    };
    let fine = run(spec.panels);
    let coarse = run(spec.panels / 2);
    let estimated_error = (fine - coarse).abs();
    if !fine.is_finite() || estimated_error > spec.tolerance * fine.abs().max(1.0) {
        return Err(Error::Quadrature {
            partial: fine,
            estimated_error,
            tolerance: spec.tolerance,
        });
    }
    Ok(fine)
}
