//! Exact arithmetic for special values of positive-characteristic L-series
//! over Tate algebras: Carlitz and rank-one Drinfeld exponentials, L-series
//! values and their Euler products, class-module Fitting data, Anderson-style
//! log-algebraic special polynomials, Gauss-Thakur sums, Bernoulli-Carlitz
//! numbers, and finite-level trace-formula determinants.
//!
//! All computation is exact over F_{q^m} with runtime parameters; truncated
//! Laurent series carry explicit precision bounds that every operation
//! propagates pessimistically, so results are reproducible bit for bit.

pub mod error;
pub mod field;
pub mod poly;
pub mod tpoly;
pub mod apoly;
pub mod ratfunc;
pub mod grammar;
pub mod tate;
pub mod carlitz;
pub mod drinfeld;
pub mod lseries;
pub mod logalg;
pub mod characters;
pub mod nuclear;
pub mod json;
pub mod acceptance;

pub use error::{Error, Result};
pub use field::{FFElem, FieldDesc};
pub use poly::FPoly;
pub use tpoly::TPoly;
pub use apoly::APoly;
pub use ratfunc::RatFunc;
