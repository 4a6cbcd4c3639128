//! Combinatorial (q-Nekrasov) series for the tau functions of the
//! q-Painleve VI, V, III_1, III_2 and III_3 equations, together with the
//! machinery to verify the identities they satisfy at desk scale:
//!
//! - [`qcore`]: q-numbers, q-Pochhammer symbols, the q-Gamma and q-Barnes
//!   functions, with controlled truncation and log-space evaluation;
//! - [`partitions`]: Young diagrams, arm/leg lengths, enumeration;
//! - [`nekrasov`]: Nekrasov factors, Chern-Simons factors and their
//!   rescaled large-Lambda limit forms;
//! - [`tau`]: the structure constants C, the instanton-type series Z, and
//!   the Fourier-window tau functions of each family with their shifted
//!   variants;
//! - [`painleve`]: (y, z) solution pairs, equation and bilinear-identity
//!   residuals, the III_1 Backlund transformation, the q-P(A7) g-variable
//!   reduction and the q-P(A7') standard form;
//! - [`degeneration`]: the confluence cascade VI -> V -> III_1 -> III_2 ->
//!   III_3 with its scaling constants and convergence sweeps.
//!
//! The crate is `no_std` (alloc required); all evaluation is pure and
//! deterministic, with fixed summation orders so identical inputs give
//! bit-identical results.
//!
//! ```
//! use num_complex::Complex64;
//! use qtau::painleve::equation_residual;
//! use qtau::tau::{default_params, tau, FamilyId};
//! use qtau::{QContext, TruncationSpec};
//!
//! let ctx = QContext::new(0.5)?;
//! let params = default_params(FamilyId::III3A7Prime);
//! let trunc = TruncationSpec::new(8, 3)?;
//! let t = Complex64::new(0.02, 0.0);
//!
//! let value = tau(&ctx, &params, t, &trunc)?;
//! assert!((value.re + 0.561454).abs() < 1e-5);
//!
//! // the (y, z) pair built from shifted-tau ratios solves the q-Painleve
//! // equation of the family
//! for report in equation_residual(&ctx, &params, t, &trunc, 1e-6)? {
//!     assert!(report.pass, "{} residual {:.2e}", report.identity_id, report.relative);
//! }
//! # Ok::<(), qtau::Error>(())
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod degeneration;
pub mod error;
pub mod nekrasov;
pub mod painleve;
pub mod partitions;
pub mod qcore;
pub mod tau;

pub use error::{Error, Result};
pub use qcore::{LogComplex, QContext};
pub use tau::{FamilyId, FamilyParams, TruncationSpec};

/// Complex scalar type used throughout.
pub type Complex = num_complex::Complex64;
