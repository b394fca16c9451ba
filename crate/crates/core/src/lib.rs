//! Pseudospectral workbench for the isothermal Korteweg system on the
//! periodic torus, built around the effective velocity `v = u + (κ/μ)∇ln ρ`.

// `!(x > 0.0)` is deliberate throughout: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
mod error;
pub mod functionals;
pub mod harness;
pub mod integrator;
pub mod lp;
pub mod manufactured;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
