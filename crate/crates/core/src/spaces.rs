//! Analytic functions as truncated Taylor coefficient vectors, and the
//! Dirichlet-space norms `‖f‖²_{D_α} = Σ (n+1)^(1-α) |a_n|²`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Hard cap on the number of coefficients chosen adaptively for test functions.
pub const TEST_FUNCTION_CAP: usize = 1 << 16;

/// Geometric cutoff used when choosing truncations adaptively.
pub const GEOMETRIC_CUTOFF: f64 = 1e-12;

/// Taylor coefficients `a_0, …, a_N` of `f(z) = Σ a_n z^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientFunction {
    coeffs: Vec<f64>,
}

impl CoefficientFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("a coefficient function needs at least one coefficient");
        }
        if let Some(x) = coeffs.iter().find(|x| !x.is_finite()) {
            return domain(format!("coefficients must be finite, found {x}"));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            coeffs: vec![0.0; len.max(1)],
        }
    }

    /// The monomial `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest retained index `N`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| lambda * a).collect(),
        }
    }

    /// Multiplies coefficient `n` by `(n+1)^exponent`.
    pub fn weighted(&self, exponent: f64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| a * ((n + 1) as f64).powf(exponent))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Plain ℓ² norm of the coefficients (the Hardy-space norm).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

impl From<CoefficientFunction> for Vec<f64> {
    fn from(f: CoefficientFunction) -> Self {
        f.coeffs
    }
}

pub fn dirichlet_norm(f: &CoefficientFunction, alpha: f64) -> f64 {
    let w = 1.0 - alpha;
    f.coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| ((n + 1) as f64).powf(w) * a * a)
        .sum::<f64>()
        .sqrt()
}

/// `f_t(z) = (1 - t²)^(1 - α/2) Σ_{n ≤ N} t^n z^n`.
pub fn test_function(t: f64, alpha: f64, n_max: usize) -> Result<CoefficientFunction> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("test function needs t in (0, 1), got {t}"));
    }
    let prefactor = (1.0 - t * t).powf(1.0 - alpha / 2.0);
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut power = 1.0;
    for _ in 0..=n_max {
        coeffs.push(prefactor * power);
        power *= t;
    }
    CoefficientFunction::new(coeffs)
}

/// Smallest `N` with `t^N < 1e-12`, capped so that at most
/// [`TEST_FUNCTION_CAP`] coefficients are produced.
pub fn adaptive_truncation(t: f64) -> usize {
    if t <= 0.0 {
        return 0;
    }
    if t >= 1.0 {
        return TEST_FUNCTION_CAP - 1;
    }
    let n = (GEOMETRIC_CUTOFF.ln() / t.ln()).floor() as usize + 1;
    n.min(TEST_FUNCTION_CAP - 1)
}

/// Upper bound for the `D_α`-norm² mass of `f_t` beyond index `N`,
/// `Σ_{n>N} (n+1)^(1-α) (1-t²)^(2-α) t^(2n)`.
///
/// For `n ≥ N+1` the ratio of consecutive terms is at most
/// `q = ((N+3)/(N+2))^max(0, 1-α) · t²`, so the tail is bounded by its
/// first term over `1 - q`. Returns infinity when `q ≥ 1`.
pub fn truncation_tail(t: f64, alpha: f64, n_max: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let t2 = t * t;
    let w = 1.0 - alpha;
    let first = (1.0 - t2).powf(2.0 - alpha)
        * ((n_max + 2) as f64).powf(w)
        * t2.powf((n_max + 1) as f64);
    let growth = ((n_max + 3) as f64 / (n_max + 2) as f64).powf(w.max(0.0));
    let q = growth * t2;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    first / (1.0 - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let one = CoefficientFunction::new(vec![1.0]).unwrap();
        for alpha in [-1.0, 0.0, 0.5, 2.0, 3.7] {
            assert_eq!(dirichlet_norm(&one, alpha), 1.0);
        }
        let z = CoefficientFunction::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(dirichlet_norm(&z, 1.0), 1.0);
        let z2 = CoefficientFunction::monomial(2);
        assert!((dirichlet_norm(&z2, 0.0) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(CoefficientFunction::new(vec![]).is_err());
        assert!(CoefficientFunction::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn test_function_examples() {
        let f = test_function(0.5, 2.0, 2).unwrap();
        assert_eq!(f.coeffs(), &[1.0, 0.5, 0.25]);
        let f = test_function(0.5, 1.0, 0).unwrap();
        assert!((f.coeffs()[0] - 0.75f64.sqrt()).abs() < 1e-15);
        // (1-t²) Σ t^{2n} = 1 for α = 1
        let f = test_function(0.9, 1.0, 512).unwrap();
        assert!((dirichlet_norm(&f, 1.0).powi(2) - 1.0).abs() < 1e-10);
        assert!(test_function(0.0, 1.0, 4).is_err());
        assert!(test_function(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn adaptive_truncation_reaches_cutoff() {
        for t in [0.5, 0.9, 0.99, 0.999] {
            let n = adaptive_truncation(t);
            assert!(t.powi(n as i32) < GEOMETRIC_CUTOFF);
            assert!(t.powi(n as i32 - 1) >= GEOMETRIC_CUTOFF * 0.999_999);
        }
        assert_eq!(adaptive_truncation(0.999_999_9), TEST_FUNCTION_CAP - 1);
    }

    #[test]
    fn truncation_tail_examples() {
        let b = truncation_tail(0.5, 2.0, 64);
        assert!(b <= 4f64.powi(-64) / 0.75);
        assert!(b < 1e-38);
        assert_eq!(truncation_tail(0.0, 1.0, 0), 0.0);
        assert!(truncation_tail(1e-30, 0.5, 0) < 1e-50);
        assert!(truncation_tail(0.9, 1.0, 512) < 1e-40);
    }

    #[test]
    fn truncation_tail_bounds_brute_force_sum() {
        for (t, alpha, n) in [(0.9f64, 0.25f64, 40usize), (0.99, 0.5, 300), (0.7, 1.5, 10), (0.95, 2.0, 50)] {
            let exact: f64 = (n + 1..n + 20_000)
                .map(|k| {
                    ((k + 1) as f64).powf(1.0 - alpha)
                        * (1.0 - t * t).powf(2.0 - alpha)
                        * (t * t).powi(k as i32)
                })
                .sum();
            let bound = truncation_tail(t, alpha, n);
            assert!(bound >= exact, "({t}, {alpha}, {n}): {bound} < {exact}");
            assert!(bound <= 3.0 * exact);
        }
    }
}
