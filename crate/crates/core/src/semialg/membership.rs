use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::poly::MultivariatePolynomial;
use super::resultant::boundary_polynomial;
use crate::error::{Error, Result};
use crate::numeric::{compare_root_sum, AlgebraicInterval, PrecisionPolicy, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chamber {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone)]
pub struct Membership {
    pub chamber: Chamber,
    /// Sign of the boundary polynomial at the point.
    pub polynomial_sign: Ordering,
    pub root_sum: AlgebraicInterval,
}

pub fn membership_with_chamber(d: u32, point: &[Rational]) -> Result<Membership> {
    let p = boundary_polynomial(d, point.len())?;
    membership_with_polynomial(&p, d, point)
}

/// Places `point` relative to `{Σ x_i^(1/d) ≤ 1}` using a precomputed
/// boundary polynomial.
pub fn membership_with_polynomial(
    p: &MultivariatePolynomial,
    d: u32,
    point: &[Rational],
) -> Result<Membership> {
    if let Some(i) = point.iter().position(Signed::is_negative) {
        return Err(Error::NegativeValue { row: i, col: 0 });
    }
    let value = p.evaluate(point)?;
    let polynomial_sign = value.cmp(&Rational::zero());
    let cmp = compare_root_sum(point, d, &Rational::one(), PrecisionPolicy::default());
    let chamber = match cmp.ordering {
        Ordering::Less => Chamber::Inside,
        Ordering::Equal => Chamber::Boundary,
        Ordering::Greater => Chamber::Outside,
    };
    if chamber == Chamber::Boundary && !value.is_zero() {
        return Err(Error::InternalInconsistency(
            "root sum equals one but the boundary polynomial does not vanish".into(),
        ));
    }
    Ok(Membership {
        chamber,
        polynomial_sign,
        root_sum: cmp.sum,
    })
}
