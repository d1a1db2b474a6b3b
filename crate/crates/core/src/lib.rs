//! Exact q-series laboratory for rank two false theta functions of type A2
//! and the meromorphic Jacobi forms whose Fourier coefficients they are.
//!
//! The formal layer ([`series`], [`bilaurent`], [`thetas`], [`falsetheta`])
//! works with exact rationals only. [`identities`] compares independently
//! built series coefficient by coefficient, and [`numeric`] checks the
//! modular and elliptic transformation laws in floating point.

pub mod bilaurent;
pub mod error;
pub mod falsetheta;
pub mod identities;
pub mod lattice;
pub mod numeric;
pub mod rational;
pub mod series;
pub mod thetas;

pub use bilaurent::{BiLaurentSeries, Region};
pub use error::{Error, Result};
pub use rational::{Exp, Rational};
pub use series::PuiseuxSeries;
