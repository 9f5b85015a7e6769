//! Exact and adaptive-precision numerics.

pub mod interval;
pub mod rational;
pub mod rootsum;
pub mod upoly;

pub use interval::{AlgebraicInterval, PrecisionPolicy};
pub use rational::{exact_root, from_f64, int, parse_rational, pow2, rat, to_f64, Rational};
pub use rootsum::{
    compare_root_sum, compare_sqrt_sum, conjugate_sum_polynomial, RootSumComparison,
};
pub use upoly::UPoly;
