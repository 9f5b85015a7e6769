//! Certified enclosures of real numbers with dyadic endpoints.
//!
//! Endpoints are exact rationals. Results of operations on two degenerate
//! (exact) intervals stay exact; anything touching an inexact operand is
//! rounded outward to a multiple of `2^-precision_bits`, which keeps
//! endpoint sizes bounded.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{ceil_dyadic, exact_root, floor_dyadic, pow2, to_f64, Rational};

pub const DEFAULT_START_BITS: u32 = 64;
pub const DEFAULT_CAP_BITS: u32 = 4096;

/// Starting precision and refinement cap for adaptive computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            start_bits: DEFAULT_START_BITS,
            cap_bits: DEFAULT_CAP_BITS,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start_bits: u32, cap_bits: u32) -> Self {
        let start_bits = start_bits.max(8);
        Self {
            start_bits,
            cap_bits: cap_bits.max(start_bits),
        }
    }
}

/// A closed interval `[lower, upper]` known to contain some real value.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraicInterval {
    lower: Rational,
    upper: Rational,
    precision_bits: u32,
}

impl fmt::Debug for AlgebraicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lower)
        } else {
            write!(
                f,
                "[{:.17e}, {:.17e}]",
                to_f64(&self.lower),
                to_f64(&self.upper)
            )
        }
    }
}

impl AlgebraicInterval {
    pub fn exact(value: Rational) -> Self {
        Self {
            upper: value.clone(),
            lower: value,
            precision_bits: 0,
        }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn one() -> Self {
        Self::exact(Rational::one())
    }

    /// Builds an interval from explicit bounds. Panics if `lower > upper`.
    pub fn new(lower: Rational, upper: Rational, precision_bits: u32) -> Self {
        assert!(lower <= upper, "interval bounds out of order");
        Self {
            lower,
            upper,
            precision_bits,
        }
    }

    /// Exact enclosure of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        Self::exact(super::rational::from_f64(x))
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The exact value if the interval is degenerate.
    pub fn as_exact(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lower)
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lower <= q && q <= &self.upper
    }

    /// Certified comparison with a rational; `None` when `q` lies inside.
    pub fn cmp_rational(&self, q: &Rational) -> Option<Ordering> {
        if &self.upper < q {
            Some(Ordering::Less)
        } else if &self.lower > q {
            Some(Ordering::Greater)
        } else if self.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Upper bound on `|x|` over the interval.
    pub fn abs_upper(&self) -> Rational {
        let a = self.lower.abs();
        let b = self.upper.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    fn combine_bits(&self, other: &Self) -> u32 {
        self.precision_bits.max(other.precision_bits).max(1)
    }

    fn rounded(lower: Rational, upper: Rational, bits: u32) -> Self {
        if lower == upper {
            return Self::exact(lower);
        }
        Self {
            lower: floor_dyadic(&lower, bits),
            upper: ceil_dyadic(&upper, bits),
            precision_bits: bits,
        }
    }

    fn from_parts(lower: Rational, upper: Rational, exact: bool, bits: u32) -> Self {
        if exact {
            Self::exact(lower)
        } else {
            Self::rounded(lower, upper, bits)
        }
    }

    /// Enclosure of `q^(1/d)` for `q >= 0`, exact when `q` is a perfect power.
    pub fn root_of(q: &Rational, d: u32, bits: u32) -> Self {
        assert!(d >= 1, "root degree must be positive");
        assert!(!q.is_negative(), "root of a negative rational");
        match exact_root(q, d) {
            Some(r) => Self::exact(r),
            None => Self::root_bracket(q, d, bits),
        }
    }

    /// Width-`2^-bits` bracket of `q^(1/d)` without the perfect-power shortcut.
    pub fn root_bracket(q: &Rational, d: u32, bits: u32) -> Self {
        assert!(!q.is_negative(), "root of a negative rational");
        let scaled = q * pow2(i64::from(d) * i64::from(bits));
        let r = scaled.floor().to_integer().nth_root(d);
        let step = pow2(-i64::from(bits));
        let lower = Rational::from_integer(r) * &step;
        let upper = &lower + &step;
        Self {
            lower,
            upper,
            precision_bits: bits,
        }
    }

    pub fn sqrt_of(q: &Rational, bits: u32) -> Self {
        Self::root_of(q, 2, bits)
    }

    /// Enclosure of `x^(1/d)` over the interval; negative parts are clamped to zero.
    pub fn root(&self, d: u32, bits: u32) -> Self {
        let lo = if self.lower.is_negative() {
            Rational::zero()
        } else {
            self.lower.clone()
        };
        let hi = if self.upper.is_negative() {
            Rational::zero()
        } else {
            self.upper.clone()
        };
        if lo == hi {
            return Self::root_of(&lo, d, bits);
        }
        let a = Self::root_of(&lo, d, bits);
        let b = Self::root_of(&hi, d, bits);
        Self {
            lower: a.lower,
            upper: b.upper,
            precision_bits: bits.max(self.precision_bits),
        }
    }

    pub fn sqrt(&self, bits: u32) -> Self {
        self.root(2, bits)
    }

    pub fn square(&self) -> Self {
        if !self.lower.is_negative() || !self.upper.is_positive() {
            self * self
        } else {
            let m = self.abs_upper();
            Self::rounded(Rational::zero(), &m * &m, self.precision_bits.max(1))
        }
    }

    /// `1/x`; `None` if the interval contains zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains(&Rational::zero()) {
            return None;
        }
        let exact = self.is_exact();
        Some(Self::from_parts(
            self.upper.recip(),
            self.lower.recip(),
            exact,
            self.precision_bits.max(1),
        ))
    }

    /// Division; `None` if the divisor contains zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| {
            if self.is_exact() && other.is_exact() {
                Self::exact(&self.lower / &other.lower)
            } else {
                let p = self * &r;
                Self::rounded(p.lower, p.upper, self.combine_bits(other))
            }
        })
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self * &Self::exact(q.clone())
    }

    /// Intersection of two enclosures of the same number.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lower = if self.lower > other.lower {
            self.lower.clone()
        } else {
            other.lower.clone()
        };
        let upper = if self.upper < other.upper {
            self.upper.clone()
        } else {
            other.upper.clone()
        };
        (lower <= upper).then(|| Self {
            lower,
            upper,
            precision_bits: self.precision_bits.max(other.precision_bits),
        })
    }

    /// Hull of two intervals.
    pub fn hull(&self, other: &Self) -> Self {
        let lower = if self.lower < other.lower {
            self.lower.clone()
        } else {
            other.lower.clone()
        };
        let upper = if self.upper > other.upper {
            self.upper.clone()
        } else {
            other.upper.clone()
        };
        Self {
            lower,
            upper,
            precision_bits: self.precision_bits.max(other.precision_bits),
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Self>) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| &acc + x)
    }
}

impl Add for &AlgebraicInterval {
    type Output = AlgebraicInterval;
    fn add(self, rhs: Self) -> AlgebraicInterval {
        AlgebraicInterval::from_parts(
            &self.lower + &rhs.lower,
            &self.upper + &rhs.upper,
            self.is_exact() && rhs.is_exact(),
            self.combine_bits(rhs),
        )
    }
}

impl Sub for &AlgebraicInterval {
    type Output = AlgebraicInterval;
    fn sub(self, rhs: Self) -> AlgebraicInterval {
        AlgebraicInterval::from_parts(
            &self.lower - &rhs.upper,
            &self.upper - &rhs.lower,
            self.is_exact() && rhs.is_exact(),
            self.combine_bits(rhs),
        )
    }
}

impl Mul for &AlgebraicInterval {
    type Output = AlgebraicInterval;
    fn mul(self, rhs: Self) -> AlgebraicInterval {
        if self.is_exact() && rhs.is_exact() {
            return AlgebraicInterval::exact(&self.lower * &rhs.lower);
        }
        let products = [
            &self.lower * &rhs.lower,
            &self.lower * &rhs.upper,
            &self.upper * &rhs.lower,
            &self.upper * &rhs.upper,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if p < &lo {
                lo = p.clone();
            }
            if p > &hi {
                hi = p.clone();
            }
        }
        AlgebraicInterval::rounded(lo, hi, self.combine_bits(rhs))
    }
}

impl Div for &AlgebraicInterval {
    type Output = AlgebraicInterval;
    /// Panics when the divisor contains zero; use `checked_div` otherwise.
    fn div(self, rhs: Self) -> AlgebraicInterval {
        self.checked_div(rhs)
            .expect("interval division by an enclosure of zero")
    }
}

impl Neg for &AlgebraicInterval {
    type Output = AlgebraicInterval;
    fn neg(self) -> AlgebraicInterval {
        AlgebraicInterval {
            lower: -&self.upper,
            upper: -&self.lower,
            precision_bits: self.precision_bits,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for AlgebraicInterval {
            type Output = AlgebraicInterval;
            fn $m(self, rhs: Self) -> AlgebraicInterval {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    #[test]
    fn sqrt_two_brackets() {
        let r = AlgebraicInterval::sqrt_of(&rat(2, 1), 64);
        let sq_lo = r.lower() * r.lower();
        let sq_hi = r.upper() * r.upper();
        assert!(sq_lo < rat(2, 1) && rat(2, 1) < sq_hi);
        assert_eq!(r.width(), pow2(-64));
    }

    #[test]
    fn perfect_powers_are_exact() {
        assert_eq!(
            AlgebraicInterval::root_of(&rat(1, 27), 3, 64).as_exact(),
            Some(&rat(1, 3))
        );
        let s = AlgebraicInterval::sqrt_of(&rat(9, 100), 64);
        assert!(s.is_exact());
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = AlgebraicInterval::exact(rat(1, 3));
        let b = AlgebraicInterval::exact(rat(2, 7));
        assert_eq!((&a * &b).as_exact(), Some(&rat(2, 21)));
        assert_eq!((&a / &b).as_exact(), Some(&rat(7, 6)));
        assert_eq!((&a - &b).as_exact(), Some(&rat(1, 21)));
    }

    #[test]
    fn mixed_products_contain_truth() {
        let s2 = AlgebraicInterval::sqrt_of(&rat(2, 1), 80);
        let s3 = AlgebraicInterval::sqrt_of(&rat(3, 1), 80);
        let p = &s2 * &s3;
        let s6 = AlgebraicInterval::sqrt_of(&rat(6, 1), 80);
        assert!(p.intersect(&s6).is_some());
        let q = &(&s6 / &s2) - &s3;
        assert!(q.contains(&Rational::zero()));
    }

    #[test]
    fn division_by_zero_enclosure_is_refused() {
        let z = AlgebraicInterval::new(rat(-1, 10), rat(1, 10), 8);
        assert!(AlgebraicInterval::one().checked_div(&z).is_none());
    }
}
