//! Exact rational scalars and dense matrices over them.

mod matrix;
mod rational;

pub use matrix::{det, solve, RatMatrix, Rref};
pub use rational::{format_rational, parse_rational, rat, ratio, to_f64, Rational};
