//! Influence-function-driven sample reweighting for fair binary
//! classification.
//!
//! The crate trains weighted-ERM classifiers, measures how much each
//! training sample moves the loss of the privileged and unprivileged
//! groups, picks reweighting plans from those influences, retrains, and
//! reports fairness and utility metrics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod data;
pub mod error;
pub mod experiment;
pub mod influence;
pub mod linalg;
pub mod lp;
pub mod metrics;
pub mod model;
pub mod reweight;
mod svg;
pub mod synth;

pub use error::{Error, Result};
