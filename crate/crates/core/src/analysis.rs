//! Norm estimation and the experiment suites that compare the Carleson,
//! moment-decay and operator-norm characterizations at finite scale.
//!
//! Nothing here decides boundedness or compactness. The reports record
//! finite-truncation surrogates (growth of norm curves, decay of tail norms,
//! trends of ratios) for a reader or a test to judge against thresholds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::measure::{
    carleson_report, dyadic_grid, moment_decay_from, moment_sequence, ratio_or_zero, tail_mass,
    CarlesonReport, Measure, MomentDecay, DEFAULT_GRID_LEVELS,
};
use crate::operator::{dh_from_moments, dot, s_mu_from_moments, split_rows, TruncatedMatrix};
use crate::spaces::{adaptive_truncation, dirichlet_norm, test_function};
use crate::specialfn::{hardy_constant, KernelParams};

/// Power-iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerConfig {
    /// Relative change of successive Rayleigh quotients that counts as converged.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

/// Largest singular value estimate with the matching right singular vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub estimate: f64,
    pub converged: bool,
    pub iterations: usize,
    #[serde(skip)]
    pub right_vector: Vec<f64>,
}

/// Largest singular value of `m` by power iteration on `v ↦ Mᵀ(M v)`.
///
/// Starts from the normalized all-ones vector, which is not orthogonal to
/// the Perron vector of a nonnegative matrix. Iteration stops once two
/// successive Rayleigh quotients agree to `tol` relative; otherwise the last
/// estimate is returned with `converged = false`.
pub fn l2_norm_estimate(m: &TruncatedMatrix, tol: f64, max_iter: usize) -> Result<NormEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return domain(format!("power iteration tolerance must be positive, got {tol}"));
    }
    let cols = m.cols();
    if cols == 0 || m.rows() == 0 {
        return Ok(NormEstimate {
            estimate: 0.0,
            converged: true,
            iterations: 0,
            right_vector: vec![0.0; cols],
        });
    }
    // iterate on M / max|m_ij| so that tiny or huge entries cannot under- or
    // overflow in the squared quantities
    let scale = m.data().iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut v = vec![1.0 / (cols as f64).sqrt(); cols];
    if scale == 0.0 {
        return Ok(NormEstimate {
            estimate: 0.0,
            converged: true,
            iterations: 0,
            right_vector: v,
        });
    }
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let mut w = m.matvec(&v);
        w.iter_mut().for_each(|x| *x /= scale);
        let next = dot(&w, &w);
        if next == 0.0 {
            return Ok(NormEstimate {
                estimate: 0.0,
                converged: true,
                iterations: it,
                right_vector: v,
            });
        }
        let mut u = m.matvec_transpose(&w);
        u.iter_mut().for_each(|x| *x /= scale);
        let norm_u = dot(&u, &u).sqrt();
        let done = it > 1 && (next - lambda).abs() <= tol * next;
        lambda = next;
        if done {
            return Ok(NormEstimate {
                estimate: lambda.sqrt() * scale,
                converged: true,
                iterations: it,
                right_vector: v,
            });
        }
        v.iter_mut().zip(&u).for_each(|(vi, ui)| *vi = ui / norm_u);
    }
    Ok(NormEstimate {
        estimate: lambda.sqrt() * scale,
        converged: false,
        iterations: max_iter,
        right_vector: v,
    })
}

/// Norm estimates of square truncations of `S_μ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCurve {
    pub truncations: Vec<usize>,
    pub estimates: Vec<f64>,
    /// `estimates[i + 1] / estimates[i]`.
    pub growth_ratios: Vec<f64>,
    pub converged: Vec<bool>,
}

impl NormCurve {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    pub fn last(&self) -> f64 {
        self.estimates.last().copied().unwrap_or(0.0)
    }
}

pub fn operator_norm_curve(
    m: &Measure,
    p: &KernelParams,
    truncations: &[usize],
    power: &PowerConfig,
) -> Result<NormCurve> {
    if truncations.is_empty() {
        return domain("norm curve needs at least one truncation");
    }
    if truncations.windows(2).any(|w| w[0] >= w[1]) || truncations[0] == 0 {
        return domain("truncations must be positive and strictly increasing");
    }
    let largest = *truncations.last().unwrap();
    let mu = moment_sequence(m, (2 * largest).saturating_sub(2).max(1))?;
    let mut estimates = Vec::with_capacity(truncations.len());
    let mut converged = Vec::with_capacity(truncations.len());
    for &n in truncations {
        let s = s_mu_from_moments(mu.values(), p, n, n)?;
        let est = l2_norm_estimate(&s, power.tol, power.max_iter)?;
        estimates.push(est.estimate);
        converged.push(est.converged);
    }
    let growth_ratios = estimates
        .windows(2)
        .map(|w| ratio_or_zero(w[1], w[0]))
        .collect();
    Ok(NormCurve {
        truncations: truncations.to_vec(),
        estimates,
        growth_ratios,
        converged,
    })
}

/// Scaled Hankel form of the kernel matrix `(K(n, k))_{n,k ≥ 1}`, so that
/// `K(n, k) = row[n] col[k] diag[n + k]` with 1-based indices.
struct KernelMatrix {
    row: Vec<f64>,
    col: Vec<f64>,
    diag: Vec<f64>,
}

impl KernelMatrix {
    fn new(p: &KernelParams, size: usize) -> Self {
        let row = (1..=size).map(|n| (n as f64).powf(p.row_exponent())).collect();
        let col = (1..=size).map(|k| (k as f64).powf(p.col_exponent())).collect();
        let diag = (0..=2 * size)
            .map(|j| {
                if j < 2 {
                    0.0
                } else {
                    (j as f64).powf(-p.carleson_exponent())
                }
            })
            .collect();
        Self { row, col, diag }
    }

    /// `Σ_n (Σ_k K(n,k) a_k)²` over `n, k ∈ 1..=size`; `a[0]` is `a_1`.
    fn quadratic_form(&self, a: &[f64]) -> f64 {
        let weighted: Vec<f64> = self.col.iter().zip(a).map(|(c, x)| c * x).collect();
        let rows: Vec<f64> = (0..self.row.len())
            .into_par_iter()
            .map(|i| {
                // 0-based i ↔ n = i + 1, k = j + 1, so n + k = i + j + 2
                let s = dot(&self.diag[i + 2..i + 2 + weighted.len()], &weighted);
                let v = self.row[i] * s;
                v * v
            })
            .collect();
        rows.iter().sum()
    }
}

/// `Σ_n (Σ_k K(n,k) a_k)² / (C² Σ a_k²)` for one vector `a = (a_1, …, a_K)`,
/// with `C` the Beta constant. The zero vector gives 0.
pub fn schur_ratio(p: &KernelParams, a: &[f64]) -> Result<f64> {
    let c = hardy_constant(p)?;
    let km = KernelMatrix::new(p, a.len());
    Ok(ratio_for(&km, c, a))
}

fn ratio_for(km: &KernelMatrix, c: f64, a: &[f64]) -> f64 {
    let rhs = c * c * dot(a, a);
    if rhs == 0.0 {
        return 0.0;
    }
    km.quadratic_form(a) / rhs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurReport {
    pub alpha: f64,
    pub beta: f64,
    pub constant: f64,
    pub trials: usize,
    pub size: usize,
    pub seed: u64,
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
}

/// Seeded nonnegative test vector of length `size`.
///
/// Trials cycle through three shapes: uniform entries on `[0, 1)`, entries
/// `u_k k^-γ` with a random `γ ∈ [0, 1)`, and the near-extremal profile
/// `k^-(1/2 + δ)` with a small random `δ`.
pub fn schur_trial_vector(rng: &mut ChaCha8Rng, trial: usize, size: usize) -> Vec<f64> {
    match trial % 3 {
        0 => (0..size).map(|_| rng.random::<f64>()).collect(),
        1 => {
            let gamma: f64 = rng.random();
            (1..=size)
                .map(|k| rng.random::<f64>() * (k as f64).powf(-gamma))
                .collect()
        }
        _ => {
            let delta = 0.01 + 0.1 * rng.random::<f64>();
            (1..=size).map(|k| (k as f64).powf(-0.5 - delta)).collect()
        }
    }
}

/// Largest observed ratio of the two sides of the kernel inequality over
/// `trials` seeded vectors of length `size`.
pub fn schur_inequality_check(
    p: &KernelParams,
    trials: usize,
    size: usize,
    seed: u64,
) -> Result<SchurReport> {
    if trials < 1 {
        return domain("schur check needs at least one trial");
    }
    if size < 16 {
        return domain(format!("schur check needs K >= 16, got {size}"));
    }
    let c = hardy_constant(p)?;
    let km = KernelMatrix::new(p, size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratios: Vec<f64> = (0..trials)
        .map(|trial| {
            let a = schur_trial_vector(&mut rng, trial, size);
            ratio_for(&km, c, &a)
        })
        .collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(SchurReport {
        alpha: p.alpha(),
        beta: p.beta(),
        constant: c,
        trials,
        size,
        seed,
        max_ratio,
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundPoint {
    pub t: f64,
    /// Highest coefficient index used for `f_t` and `DH_μ f_t`.
    pub truncation: usize,
    pub tail_mass: f64,
    pub dh_norm: f64,
    /// `μ([t,1)) / ((1-t²)^s ‖DH_μ f_t‖_{D_β})`; infinite when the norm
    /// vanishes but the tail does not.
    pub ratio: f64,
}

/// Test-function lower bound `μ([t,1)) ≲ (1-t²)^s ‖DH_μ f_t‖_{D_β}`
/// evaluated on a grid of `t`.
pub fn lower_bound_check(m: &Measure, p: &KernelParams, tgrid: &[f64]) -> Result<Vec<LowerBoundPoint>> {
    let s = p.carleson_exponent();
    tgrid
        .iter()
        .map(|&t| {
            if !(t > 0.0 && t < 1.0) {
                return domain(format!("lower bound grid needs t in (0, 1), got {t}"));
            }
            let n = adaptive_truncation(t);
            let f = test_function(t, p.alpha(), n)?;
            let mu = moment_sequence(m, (2 * n).max(1))?;
            let dh = dh_from_moments(mu.values(), f.coeffs(), n)?;
            let dh_norm = dirichlet_norm(&dh, p.beta());
            let tail = tail_mass(m, t)?;
            let denom = (1.0 - t * t).powf(s) * dh_norm;
            let ratio = if tail == 0.0 {
                0.0
            } else if denom == 0.0 {
                f64::INFINITY
            } else {
                tail / denom
            };
            Ok(LowerBoundPoint {
                t,
                truncation: n,
                tail_mass: tail,
                dh_norm,
                ratio,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailNorm {
    pub mcut: usize,
    pub norm: f64,
    pub converged: bool,
}

/// Norms of `S_μ - S_{μ,m}` on the `N × N` truncation for each cut `m`.
pub fn compactness_diagnostic(
    m: &Measure,
    p: &KernelParams,
    n: usize,
    cuts: &[usize],
    power: &PowerConfig,
) -> Result<Vec<TailNorm>> {
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return domain("cuts must be strictly increasing");
    }
    if let Some(&c) = cuts.iter().find(|&&c| c >= n) {
        return domain(format!("cut {c} must be below the truncation {n}"));
    }
    let mu = moment_sequence(m, (2 * n).saturating_sub(2).max(1))?;
    let s = s_mu_from_moments(mu.values(), p, n, n)?;
    cuts.iter()
        .map(|&mcut| {
            let tail = split_rows(&s, mcut, true);
            let est = l2_norm_estimate(&tail, power.tol, power.max_iter)?;
            Ok(TailNorm {
                mcut,
                norm: est.estimate,
                converged: est.converged,
            })
        })
        .collect()
}

/// Settings for [`boundedness_diagnostic`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticConfig {
    pub truncations: Vec<usize>,
    pub grid: Vec<f64>,
    pub decay_n: usize,
    pub power: PowerConfig,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        Self {
            truncations: vec![128, 256, 512, 1024],
            grid: dyadic_grid(DEFAULT_GRID_LEVELS),
            decay_n: 4096,
            power: PowerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub alpha: f64,
    pub beta: f64,
    /// `s = 2 - (β - α)/2`.
    pub exponent: f64,
    pub carleson: CarlesonReport,
    pub moment_decay: MomentDecay,
    pub norm_curve: NormCurve,
    /// `C_μ = max_n μ_n (n+2)^s` over the computed moments.
    pub moment_constant: f64,
    /// `C_μ · B(2 - β/2, α/2)`, an upper bound for every norm estimate.
    pub hardy_bound: f64,
    pub verdict_notes: Vec<String>,
}

/// Growth ratio above which a dyadic norm curve is reported as growing.
pub const GROWTH_THRESHOLD: f64 = 1.05;

pub fn boundedness_diagnostic(
    m: &Measure,
    p: &KernelParams,
    config: &DiagnosticConfig,
) -> Result<DiagnosticReport> {
    let s = p.carleson_exponent();
    let carleson = carleson_report(m, s, &config.grid)?;
    if config.decay_n < 16 {
        return domain(format!("moment decay report needs N >= 16, got {}", config.decay_n));
    }
    let norm_curve = operator_norm_curve(m, p, &config.truncations, &config.power)?;
    let largest = *config.truncations.last().unwrap();
    let top = config.decay_n.max(2 * largest);
    let mu = moment_sequence(m, top)?;
    let moment_decay = moment_decay_from(&moment_sequence(m, config.decay_n)?, s);
    let moment_constant = mu
        .values()
        .iter()
        .enumerate()
        .map(|(n, &x)| x * ((n + 2) as f64).powf(s))
        .fold(0.0, f64::max);
    let hardy_bound = moment_constant * hardy_constant(p)?;
    let verdict_notes = verdicts(&carleson, &moment_decay, &norm_curve, hardy_bound);
    Ok(DiagnosticReport {
        alpha: p.alpha(),
        beta: p.beta(),
        exponent: s,
        carleson,
        moment_decay,
        norm_curve,
        moment_constant,
        hardy_bound,
        verdict_notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trend {
    Vanishing,
    Bounded,
    Growing,
}

fn classify(trend: f64) -> Trend {
    if trend < 0.5 {
        Trend::Vanishing
    } else if trend > 2.0 {
        Trend::Growing
    } else {
        Trend::Bounded
    }
}

fn describe(t: Trend) -> &'static str {
    match t {
        Trend::Vanishing => "decaying (vanishing)",
        Trend::Bounded => "bounded",
        Trend::Growing => "growing",
    }
}

fn verdicts(
    carleson: &CarlesonReport,
    decay: &MomentDecay,
    curve: &NormCurve,
    hardy_bound: f64,
) -> Vec<String> {
    let mut notes = Vec::new();
    let c = classify(carleson.vanishing_trend);
    notes.push(format!(
        "carleson: sup ratio {:.6e}, trend {:.6e} -> {}",
        carleson.sup_ratio,
        carleson.vanishing_trend,
        describe(c)
    ));
    let d = classify(decay.trend);
    notes.push(format!(
        "moments: sup mu_n (n+1)^s {:.6e}, trend {:.6e} -> {}",
        decay.sup,
        decay.trend,
        describe(d)
    ));
    let max_growth = curve.growth_ratios.iter().copied().fold(0.0, f64::max);
    let growing = max_growth > GROWTH_THRESHOLD;
    notes.push(format!(
        "norm curve: last estimate {:.6e}, max growth ratio {:.6} -> {}",
        curve.last(),
        max_growth,
        if growing { "growing" } else { "bounded" }
    ));
    if !curve.all_converged() {
        notes.push("norm curve: power iteration did not converge at every truncation".into());
    }
    if curve.last() > hardy_bound * (1.0 + 1e-6) {
        notes.push(format!(
            "inconsistency: estimate exceeds the kernel bound {hardy_bound:.6e}"
        ));
    }
    let carleson_ok = c != Trend::Growing;
    let decay_ok = d != Trend::Growing;
    if carleson_ok == decay_ok && decay_ok == !growing {
        notes.push(format!(
            "agreement: all indicators read {}",
            if growing { "unbounded" } else { "bounded" }
        ));
    } else {
        notes.push("disagreement: indicators differ at this scale".into());
    }
    notes
}

/// `‖DH_μ f‖_{D_β} / ‖f‖_{D_α}` with the output truncated to `rows`
/// coefficients; zero for the zero function.
pub fn representation_ratio(
    m: &Measure,
    p: &KernelParams,
    f: &crate::spaces::CoefficientFunction,
    rows: usize,
) -> Result<f64> {
    if rows == 0 {
        return domain("need at least one output row");
    }
    let mu = moment_sequence(m, (rows + f.len()).saturating_sub(2).max(1))?;
    let dh = dh_from_moments(mu.values(), f.coeffs(), rows - 1)?;
    let den = dirichlet_norm(f, p.alpha());
    Ok(ratio_or_zero(dirichlet_norm(&dh, p.beta()), den))
}
