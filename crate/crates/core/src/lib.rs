//! Plug-and-play iterative regularization for linear inverse problems.
//!
//! The crate provides the building blocks (sparse operators, conjugate
//! gradients, denoisers), the iterative solvers with per-step monitoring of
//! descent and data fit, stopping rules, and a simulated tomography harness
//! that runs configured experiments and writes CSV traces.

// negated comparisons are how parameter checks reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod denoise;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod ops;
pub mod selection;
pub mod solvers;
pub mod tomography;

pub use error::{Error, Result};
