//! Truncated Derivative-Hilbert operators `DH_μ` induced by Hankel moment
//! matrices of positive measures on `[0, 1)`, acting between Dirichlet
//! spaces `D_α → D_β` with `0 < α ≤ 2` and `2 ≤ β < 4`.
//!
//! The crate computes exact moments and tail masses, builds truncations of
//! `H_μ`, `DH_μ` and the conjugated matrix `S_μ`, estimates their norms, and
//! compares three indicators of boundedness at finite scale: Carleson tail
//! ratios, moment decay, and operator-norm growth.
//!
//! ```
//! use dhilbert::{measure::Measure, specialfn::KernelParams, operator::apply_dh, spaces::CoefficientFunction};
//!
//! let f = CoefficientFunction::new(vec![1.0]).unwrap();
//! let b = apply_dh(&Measure::lebesgue(), &f, 3).unwrap();
//! assert!(b.coeffs().iter().all(|x| (x - 1.0).abs() < 1e-14));
//! # let _ = KernelParams::new(2.0, 2.0).unwrap();
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod measure;
pub mod operator;
pub mod quadrature;
pub mod report;
pub mod spaces;
pub mod specialfn;

pub use error::{Error, Result};
