//! Truncations of the Hankel operator `H_μ`, the Derivative-Hilbert operator
//! `DH_μ`, the diagonal weights `V_α`, `T_β`, and the conjugated matrix
//! `S_μ` with `DH_μ = T_β ∘ S_μ ∘ V_α`.
//!
//! Index conventions: operations producing coefficient functions take the
//! highest output index `N` and return `N + 1` coefficients; matrix builders
//! take explicit row and column counts.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::measure::{moment_sequence, Measure};
use crate::spaces::CoefficientFunction;
use crate::specialfn::KernelParams;

/// Largest number of entries a dense [`TruncatedMatrix`] may hold.
pub const MATRIX_ENTRY_CAP: usize = 1 << 26;

/// Rows per work unit in parallel products; fixed so results do not depend
/// on the thread count.
const ROW_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixLabel {
    /// `(n+1)^((3-β)/2) (k+1)^((α-1)/2) μ_{n+k}`
    SMu,
    /// `S_μ` with rows `0..=m` zeroed.
    TailBlock,
    /// `S_μ` restricted to rows `0..=m` (the finite-rank part `S_{μ,m}`).
    HeadBlock,
    /// `(n+1) μ_{n+k}`
    RawDh,
    /// `μ_{n+k}`
    RawHankel,
}

/// Dense row-major matrix with nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    label: MatrixLabel,
}

impl TruncatedMatrix {
    fn from_fn(
        rows: usize,
        cols: usize,
        label: MatrixLabel,
        f: impl Fn(usize, usize) -> f64 + Sync,
    ) -> Result<Self> {
        check_entry_cap(rows, cols)?;
        let mut data = vec![0.0; rows * cols];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(n, row)| {
                for (k, x) in row.iter_mut().enumerate() {
                    *x = f(n, k);
                }
            });
        }
        Ok(Self {
            rows,
            cols,
            data,
            label,
        })
    }

    /// Builds a matrix from row-major data; entries must be finite and
    /// nonnegative.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>, label: MatrixLabel) -> Result<Self> {
        check_entry_cap(rows, cols)?;
        if data.len() != rows * cols {
            return domain(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return domain("matrix entries must be finite and nonnegative");
        }
        Ok(Self {
            rows,
            cols,
            data,
            label,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn label(&self) -> MatrixLabel {
        self.label
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.data[n * self.cols + k]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.data[n * self.cols..(n + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        if self.cols == 0 {
            return vec![0.0; self.rows];
        }
        self.data
            .par_chunks(self.cols)
            .map(|row| dot(row, x))
            .collect()
    }

    /// `y = Mᵀ x`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_transpose dimension mismatch");
        let cols = self.cols;
        if cols == 0 || self.rows == 0 {
            return vec![0.0; cols];
        }
        let partials: Vec<Vec<f64>> = self
            .data
            .par_chunks(ROW_CHUNK * cols)
            .zip(x.par_chunks(ROW_CHUNK))
            .map(|(block, xs)| {
                let mut acc = vec![0.0; cols];
                for (row, &xi) in block.chunks(cols).zip(xs) {
                    if xi != 0.0 {
                        for (a, &m) in acc.iter_mut().zip(row) {
                            *a += m * xi;
                        }
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![0.0; cols];
        for p in &partials {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        out
    }

    /// Entrywise sum; shapes must agree.
    pub fn add(&self, other: &TruncatedMatrix, label: MatrixLabel) -> Result<TruncatedMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return domain("matrix shapes differ");
        }
        Ok(TruncatedMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            label,
        })
    }
}

fn check_entry_cap(rows: usize, cols: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(n) if n <= MATRIX_ENTRY_CAP => Ok(()),
        _ => Err(Error::Resource(format!(
            "{rows}x{cols} matrix exceeds the {MATRIX_ENTRY_CAP}-entry cap"
        ))),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Moments `μ_0..=μ_{max_index}`, with the sequence floor of index 1.
fn moments_upto(m: &Measure, max_index: usize) -> Result<Vec<f64>> {
    Ok(moment_sequence(m, max_index.max(1))?.values().to_vec())
}

fn hankel_rows(mu: &[f64], a: &[f64], n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .into_par_iter()
        .map(|n| dot(&mu[n..n + a.len()], a))
        .collect()
}

/// `H_μ f` truncated to indices `0..=n_max`: `c_n = Σ_k μ_{n+k} a_k`.
pub fn apply_h(m: &Measure, f: &CoefficientFunction, n_max: usize) -> Result<CoefficientFunction> {
    let mu = moments_upto(m, n_max + f.truncation())?;
    CoefficientFunction::new(hankel_rows(&mu, f.coeffs(), n_max))
}

/// `DH_μ f` truncated to indices `0..=n_max`: `b_n = (n+1) Σ_k μ_{n+k} a_k`.
pub fn apply_dh(m: &Measure, f: &CoefficientFunction, n_max: usize) -> Result<CoefficientFunction> {
    let mu = moments_upto(m, n_max + f.truncation())?;
    dh_from_moments(&mu, f.coeffs(), n_max)
}

pub(crate) fn dh_from_moments(mu: &[f64], a: &[f64], n_max: usize) -> Result<CoefficientFunction> {
    let b = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let w = (n + 1) as f64;
            mu[n..n + a.len()].iter().zip(a).map(|(m, x)| w * m * x).sum()
        })
        .collect();
    CoefficientFunction::new(b)
}

/// Coefficients of `z g(z)`.
fn shift_by_z(g: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.len() + 1);
    out.push(0.0);
    out.extend_from_slice(g);
    out
}

/// Coefficients of `g'(z)`.
fn derivative(g: &[f64]) -> Vec<f64> {
    g.iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| n as f64 * c)
        .collect()
}

/// Largest coefficient deviation between `(z H_μ f)'` and `DH_μ f`.
pub fn derivative_identity_check(
    m: &Measure,
    f: &CoefficientFunction,
    n_max: usize,
) -> Result<f64> {
    let h = apply_h(m, f, n_max)?;
    let via_derivative = derivative(&shift_by_z(h.coeffs()));
    let direct = apply_dh(m, f, n_max)?;
    Ok(max_deviation(&via_derivative, direct.coeffs()))
}

fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `V_α`: coefficient `n` times `(n+1)^((1-α)/2)`; an isometry `D_α → H²`.
pub fn v_alpha(f: &CoefficientFunction, alpha: f64) -> CoefficientFunction {
    f.weighted((1.0 - alpha) / 2.0)
}

/// `T_β`: coefficient `n` times `(n+1)^((β-1)/2)`; an isometry `H² → D_β`.
pub fn t_beta(g: &CoefficientFunction, beta: f64) -> CoefficientFunction {
    g.weighted((beta - 1.0) / 2.0)
}

/// Inverse of [`v_alpha`].
pub fn v_alpha_inverse(g: &CoefficientFunction, alpha: f64) -> CoefficientFunction {
    g.weighted((alpha - 1.0) / 2.0)
}

pub(crate) fn s_mu_from_moments(
    mu: &[f64],
    p: &KernelParams,
    rows: usize,
    cols: usize,
) -> Result<TruncatedMatrix> {
    check_entry_cap(rows, cols)?;
    if rows > 0 && cols > 0 && mu.len() < rows + cols - 1 {
        return domain("not enough moments for the requested truncation");
    }
    let row_w: Vec<f64> = (0..rows)
        .map(|n| ((n + 1) as f64).powf(p.row_exponent()))
        .collect();
    let col_w: Vec<f64> = (0..cols)
        .map(|k| ((k + 1) as f64).powf(p.col_exponent()))
        .collect();
    TruncatedMatrix::from_fn(rows, cols, MatrixLabel::SMu, |n, k| {
        row_w[n] * col_w[k] * mu[n + k]
    })
}

/// The `rows × cols` section of `S_μ`.
pub fn s_mu_matrix(m: &Measure, p: &KernelParams, rows: usize, cols: usize) -> Result<TruncatedMatrix> {
    check_entry_cap(rows, cols)?;
    let mu = moments_upto(m, (rows + cols).saturating_sub(2))?;
    s_mu_from_moments(&mu, p, rows, cols)
}

/// Largest coefficient deviation between `T_β S_μ V_α f` and `DH_μ f` on
/// indices `0..=n_max`, relative to the largest `DH_μ f` coefficient.
pub fn factorization_check(
    m: &Measure,
    p: &KernelParams,
    f: &CoefficientFunction,
    n_max: usize,
) -> Result<f64> {
    let s = s_mu_matrix(m, p, n_max + 1, f.len())?;
    let v = v_alpha(f, p.alpha());
    let sv = CoefficientFunction::new(s.matvec(v.coeffs()))?;
    let factored = t_beta(&sv, p.beta());
    let direct = apply_dh(m, f, n_max)?;
    let dev = max_deviation(factored.coeffs(), direct.coeffs());
    let scale = direct.max_abs();
    Ok(if scale == 0.0 { dev } else { dev / scale })
}

fn check_cut(mcut: usize, rows: usize) -> Result<()> {
    if mcut >= rows {
        return domain(format!("cut index {mcut} must be below the row count {rows}"));
    }
    Ok(())
}

pub(crate) fn split_rows(s: &TruncatedMatrix, mcut: usize, keep_tail: bool) -> TruncatedMatrix {
    let cols = s.cols;
    let mut data = s.data.clone();
    let boundary = (mcut + 1) * cols;
    if keep_tail {
        data[..boundary].fill(0.0);
    } else {
        data[boundary..].fill(0.0);
    }
    TruncatedMatrix {
        rows: s.rows,
        cols,
        data,
        label: if keep_tail {
            MatrixLabel::TailBlock
        } else {
            MatrixLabel::HeadBlock
        },
    }
}

/// `S_μ - S_{μ,m}`: the `rows × cols` section of `S_μ` with rows `0..=mcut`
/// set to zero.
pub fn tail_block(
    m: &Measure,
    p: &KernelParams,
    mcut: usize,
    rows: usize,
    cols: usize,
) -> Result<TruncatedMatrix> {
    check_cut(mcut, rows)?;
    Ok(split_rows(&s_mu_matrix(m, p, rows, cols)?, mcut, true))
}

/// `S_{μ,m}`: rows `0..=mcut` of `S_μ`, the rest zero.
pub fn head_block(
    m: &Measure,
    p: &KernelParams,
    mcut: usize,
    rows: usize,
    cols: usize,
) -> Result<TruncatedMatrix> {
    check_cut(mcut, rows)?;
    Ok(split_rows(&s_mu_matrix(m, p, rows, cols)?, mcut, false))
}

/// Moment Hankel matrix `(μ_{n+k})`.
pub fn raw_hankel_matrix(m: &Measure, rows: usize, cols: usize) -> Result<TruncatedMatrix> {
    check_entry_cap(rows, cols)?;
    let mu = moments_upto(m, (rows + cols).saturating_sub(2))?;
    TruncatedMatrix::from_fn(rows, cols, MatrixLabel::RawHankel, |n, k| mu[n + k])
}

/// Matrix of `DH_μ` in the monomial basis, `((n+1) μ_{n+k})`.
pub fn dh_matrix(m: &Measure, rows: usize, cols: usize) -> Result<TruncatedMatrix> {
    check_entry_cap(rows, cols)?;
    let mu = moments_upto(m, (rows + cols).saturating_sub(2))?;
    TruncatedMatrix::from_fn(rows, cols, MatrixLabel::RawDh, |n, k| (n + 1) as f64 * mu[n + k])
}

/// Cauchy–Schwarz certificate for `|Σ_k μ_{n+k} a_k|` under the decay
/// hypothesis `μ_j ≤ C (j+1)^-(α/2 + ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellDefinedBound {
    /// `C = max_j μ_j (j+1)^(α/2+ε)` over the moments used.
    pub constant: f64,
    /// `C (Σ_k (k+1)^(α-1) (n+k+1)^-(α+2ε))^(1/2) ‖f‖_{D_α}`.
    pub bound: f64,
    /// The exact partial sum `Σ_k μ_{n+k} a_k`.
    pub exact: f64,
}

pub fn well_defined_bound(
    m: &Measure,
    alpha: f64,
    eps: f64,
    f: &CoefficientFunction,
    n: usize,
) -> Result<WellDefinedBound> {
    if !(eps.is_finite() && eps > 0.0) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    let mu = moments_upto(m, n + f.truncation())?;
    let decay = alpha / 2.0 + eps;
    let constant = mu[..=n + f.truncation()]
        .iter()
        .enumerate()
        .map(|(j, &x)| x * ((j + 1) as f64).powf(decay))
        .fold(0.0, f64::max);
    let kernel: f64 = (0..f.len())
        .map(|k| {
            ((k + 1) as f64).powf(alpha - 1.0) * ((n + k + 1) as f64).powf(-(alpha + 2.0 * eps))
        })
        .sum();
    let norm = crate::spaces::dirichlet_norm(f, alpha);
    let exact = dot(&mu[n..n + f.len()], f.coeffs());
    Ok(WellDefinedBound {
        constant,
        bound: constant * kernel.sqrt() * norm,
        exact,
    })
}
