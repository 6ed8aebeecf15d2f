//! Traceable mixnet with distributed set-membership (`BTraceIn`) and reverse
//! set-membership (`BTraceOut`) queries.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod commitment;
pub mod dpk;
pub mod encryption;
pub mod error;
pub mod harness;
pub mod membership;
pub mod mixnet;
pub mod runtime;
pub mod sharing;
pub mod signatures;
pub mod wire;

pub use algebra::{setup, GroupElement, GroupId, Gt, Scalar, SetupParams, G1, G2};
pub use error::{Error, Result};
