//! Positive Borel measures on `[0, 1)` built from point masses and
//! Jacobi-type densities `scale · t^a (1-t)^b dt`.
//!
//! Every quantity here has a closed form: moments are Beta values and tail
//! masses are incomplete Beta values.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specialfn::{beta, inc_beta_regularized, log_beta};

/// Largest moment index a [`MomentSequence`] may hold.
pub const MOMENT_CAP: usize = 1 << 20;

/// A point mass `c · δ_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    pub c: f64,
}

/// The density `scale · t^a (1-t)^b` on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub a: f64,
    pub b: f64,
    pub scale: f64,
}

impl Density {
    fn moment(&self, n: usize) -> f64 {
        // B(n + a + 1, b + 1); arguments are positive by construction
        self.scale * log_beta(n as f64 + self.a + 1.0, self.b + 1.0).unwrap().exp()
    }

    fn tail(&self, t: f64) -> Result<f64> {
        let b1 = self.b + 1.0;
        if self.a == 0.0 {
            return Ok(self.scale * (1.0 - t).powf(b1) / b1);
        }
        let full = beta(self.a + 1.0, b1)?;
        if t == 0.0 {
            return Ok(self.scale * full);
        }
        // ∫_t^1 s^a (1-s)^b ds = B(a+1, b+1) · I_{1-t}(b+1, a+1)
        Ok(self.scale * full * inc_beta_regularized(b1, self.a + 1.0, 1.0 - t)?)
    }
}

/// A finite positive measure on `[0, 1)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    densities: Vec<Density>,
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, densities: Vec<Density>) -> Result<Self> {
        for a in &atoms {
            if !(a.t.is_finite() && (0.0..1.0).contains(&a.t)) {
                return domain(format!("atom position must lie in [0, 1), got {}", a.t));
            }
            if !(a.c.is_finite() && a.c > 0.0) {
                return domain(format!("atom mass must be positive, got {}", a.c));
            }
        }
        for d in &densities {
            if !(d.a.is_finite() && d.a >= 0.0) {
                return domain(format!("density exponent a must be >= 0, got {}", d.a));
            }
            if !(d.b.is_finite() && d.b > -1.0) {
                return domain(format!("density exponent b must be > -1, got {}", d.b));
            }
            if !(d.scale.is_finite() && d.scale > 0.0) {
                return domain(format!("density scale must be positive, got {}", d.scale));
            }
        }
        Ok(Self { atoms, densities })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Lebesgue measure on `[0, 1)`; its Hankel matrix is the Hilbert matrix.
    pub fn lebesgue() -> Self {
        Self::jacobi(0.0, 0.0, 1.0).unwrap()
    }

    pub fn atom(t: f64, c: f64) -> Result<Self> {
        Self::new(vec![Atom { t, c }], vec![])
    }

    pub fn jacobi(a: f64, b: f64, scale: f64) -> Result<Self> {
        Self::new(vec![], vec![Density { a, b, scale }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn densities(&self) -> &[Density] {
        &self.densities
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.densities.is_empty()
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &Measure) -> Measure {
        let mut out = self.clone();
        out.atoms.extend_from_slice(&other.atoms);
        out.densities.extend_from_slice(&other.densities);
        out
    }

    /// Multiplies every mass and density scale by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Measure> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return domain(format!("scale factor must be positive, got {lambda}"));
        }
        Measure::new(
            self.atoms
                .iter()
                .map(|a| Atom { t: a.t, c: a.c * lambda })
                .collect(),
            self.densities
                .iter()
                .map(|d| Density { scale: d.scale * lambda, ..*d })
                .collect(),
        )
    }

    /// Validates a deserialized measure.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.atoms, self.densities)
    }
}

/// `μ_n = ∫ t^n dμ(t)`.
pub fn moment(m: &Measure, n: usize) -> f64 {
    let atoms: f64 = m.atoms.iter().map(|a| a.c * atom_power(a.t, n)).sum();
    let dens: f64 = m.densities.iter().map(|d| d.moment(n)).sum();
    atoms + dens
}

fn atom_power(t: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(k) => t.powi(k),
        Err(_) => t.powf(n as f64),
    }
}

/// `μ([t, 1))`.
pub fn tail_mass(m: &Measure, t: f64) -> Result<f64> {
    if !(t.is_finite() && (0.0..1.0).contains(&t)) {
        return domain(format!("tail mass requires t in [0, 1), got {t}"));
    }
    let atoms: f64 = m.atoms.iter().filter(|a| a.t >= t).map(|a| a.c).sum();
    let dens = m
        .densities
        .iter()
        .map(|d| d.tail(t))
        .sum::<Result<f64>>()?;
    Ok(atoms + dens)
}

/// Moments `μ_0, …, μ_N` of a measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSequence {
    values: Vec<f64>,
    #[serde(skip)]
    source: Measure,
}

impl MomentSequence {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> &Measure {
        &self.source
    }

    /// Highest index `N`.
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }
}

pub fn moment_sequence(m: &Measure, n_max: usize) -> Result<MomentSequence> {
    if n_max < 1 {
        return domain("moment sequence needs N >= 1");
    }
    if n_max > MOMENT_CAP {
        return Err(Error::Resource(format!(
            "moment index {n_max} exceeds cap {MOMENT_CAP}"
        )));
    }
    Ok(MomentSequence {
        values: (0..=n_max).map(|n| moment(m, n)).collect(),
        source: m.clone(),
    })
}

/// Tail-mass ratios `μ([t,1)) / (1-t)^s` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonReport {
    pub exponent: f64,
    pub grid: Vec<f64>,
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    /// Ratio at the last grid point divided by the ratio at the middle one.
    /// Values below 1 point to vanishing behaviour; this is a trend, not a
    /// decision.
    pub vanishing_trend: f64,
}

/// `t_j = 1 - 2^-j` for `j = 1..=levels`.
pub fn dyadic_grid(levels: usize) -> Vec<f64> {
    (1..=levels).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect()
}

pub const DEFAULT_GRID_LEVELS: usize = 24;

pub fn carleson_report(m: &Measure, s: f64, grid: &[f64]) -> Result<CarlesonReport> {
    if !(s.is_finite() && s > 0.0) {
        return domain(format!("Carleson exponent must be positive, got {s}"));
    }
    if grid.is_empty() {
        return domain("Carleson grid is empty");
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("Carleson grid must be strictly increasing");
    }
    let ratios = grid
        .iter()
        .map(|&t| Ok(tail_mass(m, t)? / (1.0 - t).powf(s)))
        .collect::<Result<Vec<_>>>()?;
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let last = *ratios.last().unwrap();
    let mid = ratios[(ratios.len() - 1) / 2];
    Ok(CarlesonReport {
        exponent: s,
        grid: grid.to_vec(),
        ratios,
        sup_ratio,
        vanishing_trend: ratio_or_zero(last, mid),
    })
}

pub(crate) fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Summary of `a_n = μ_n (n+1)^s` for `n ≤ N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentDecay {
    pub exponent: f64,
    pub n_max: usize,
    pub sup: f64,
    /// `mean(a_n, n ∈ [N/2, N]) / mean(a_n, n ∈ [N/8, N/4])`.
    pub trend: f64,
}

pub fn moment_decay_report(m: &Measure, s: f64, n_max: usize) -> Result<MomentDecay> {
    if n_max < 16 {
        return domain(format!("moment decay report needs N >= 16, got {n_max}"));
    }
    let seq = moment_sequence(m, n_max)?;
    Ok(moment_decay_from(&seq, s))
}

pub(crate) fn moment_decay_from(seq: &MomentSequence, s: f64) -> MomentDecay {
    let n_max = seq.max_index();
    let scaled: Vec<f64> = seq
        .values()
        .iter()
        .enumerate()
        .map(|(n, &mu)| mu * ((n + 1) as f64).powf(s))
        .collect();
    let sup = scaled.iter().copied().fold(0.0, f64::max);
    let mean = |lo: usize, hi: usize| scaled[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
    let late = mean(n_max / 2, n_max);
    let early = mean(n_max / 8, n_max / 4);
    MomentDecay {
        exponent: s,
        n_max,
        sup,
        trend: ratio_or_zero(late, early),
    }
}
