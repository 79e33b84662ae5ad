// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod correlation;
pub mod densela;
pub mod error;
pub mod fisher_hartwig;
pub mod harness;
pub mod measures;
pub mod model;
pub mod quad;

pub use error::{Error, Result};
