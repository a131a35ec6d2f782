//! Infinitesimal arithmetic and kinetic limit analysis.
//!
//! The crate has five layers:
//!
//! - [`field`] — an ordered field extending the reals by a positive
//!   infinitesimal, represented as truncated Laurent series;
//! - [`expr`] — a small expression language evaluated over reals or field
//!   elements;
//! - [`analytic`] — elementary functions applied to field elements via
//!   Taylor composition, and derivatives as standard parts of infinitesimal
//!   difference quotients;
//! - [`seq`] — lazily evaluated "variable quantities" (sequences) with limit
//!   detection, cluster values, strip tests and continuity probes;
//! - [`microscope`] — magnified graph windows, a local-straightness metric,
//!   the blancmange function and deterministic SVG rendering.
//!
//! A derivative is literally the standard part of an infinitesimal
//! difference quotient:
//!
//! ```
//! use petit_core::analytic::derivative;
//! use petit_core::expr::Expr;
//!
//! let f = Expr::parse("log(x)").unwrap();
//! let slope = derivative(&f, "x", 2.0, petit_core::DEFAULT_ORDER).unwrap();
//! assert!((slope - 0.5).abs() < 1e-12);
//! ```

pub mod analytic;
pub mod error;
pub mod expr;
pub mod field;
pub mod figures;
pub mod microscope;
pub mod seq;
pub mod svg;

pub use error::{Error, Result};
pub use field::{Classification, Laurent, DEFAULT_ORDER};
