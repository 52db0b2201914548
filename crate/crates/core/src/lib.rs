// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod kvn;
pub mod linalg;
pub mod open;
pub mod quantum;
pub mod scale;
pub mod spectral;
pub mod weyl;

pub use error::{Error, Result};
