//! Monotone-inclusion laboratory: generalized proximal point and inexact
//! Krasnosel'skii-Mann iterations over operators with exact resolvents,
//! closed-form linear-rate bounds, and trace certification.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod engines;
pub mod error;
pub mod operators;
pub mod rates;
pub mod subregularity;
pub mod suite;
pub mod vector;

pub use error::{Error, Result};
pub use operators::{Operator, OperatorKind, Projection, ZeroSet};
pub use vector::Vector;
