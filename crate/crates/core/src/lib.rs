//! Exact-arithmetic models of curve configurations on surfaces, linear
//! chains of rational curves slated for rational blow-down, and the integer
//! homology bookkeeping of the resulting 4-manifolds.
//!
//! Everything is computed over arbitrary-precision integers and rationals;
//! no floating point appears anywhere in the pipeline.

pub mod canonical;
pub mod config;
pub mod exactalg;
pub mod homology;
pub mod report;
pub mod scenario;
#[cfg(test)]
pub(crate) mod testbed;
pub mod tsingular;
