//! Exact computations with stability conditions for compactified universal
//! Jacobians, at the level of dual graphs of stable pointed curves.

pub mod abel_jacobi;
pub mod chamber;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod rational;
pub mod stability;
pub mod suites;
pub mod vine;

pub use abel_jacobi::{AJDatum, VinePhiTable};
pub use error::{Error, Result};
pub use graph::{DualGraph, Subcurve};
pub use rational::Rational;
pub use stability::{PhiVector, SheafDatum};
pub use vine::VineCurve;
