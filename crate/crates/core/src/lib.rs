// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fuzzy;
pub mod ga;
pub mod ilc;
pub mod linear;
pub mod pid;
pub mod plant;
pub mod signal;
pub mod trajectory;
pub mod wavelet;

pub use error::{Error, Result};
pub use signal::Signal;
