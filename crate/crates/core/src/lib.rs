//! Exact symbolic toolkit for Dirac structures on polynomial charts, compact
//! group actions and stratum-wise singular reduction.

pub mod actions;
pub mod calculus;
pub mod dirac;
pub mod distributions;
pub mod dynamics;
pub mod expr;
pub mod linalg;
pub mod reduction;
pub mod report;
pub mod sampling;
pub mod scenes;
