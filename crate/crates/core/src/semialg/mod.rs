//! Boundary polynomial of the `1/d`-unit ball and membership tests against it.

mod membership;
mod poly;
mod resultant;

pub use membership::{membership_with_chamber, membership_with_polynomial, Chamber, Membership};
pub use poly::{Monomial, MultivariatePolynomial};
pub use resultant::{
    boundary_polynomial, boundary_polynomial_with_cap, resultant, DEFAULT_DEGREE_CAP,
};
