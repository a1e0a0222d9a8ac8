// Comparisons are written so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod error;
pub mod grassmann;
pub mod groupoid;
pub mod harness;
pub mod matcore;

pub use error::{Error, Result};
