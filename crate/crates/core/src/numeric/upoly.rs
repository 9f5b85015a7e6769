//! Dense univariate polynomials over the rationals, with Sturm root counting.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Coefficients in ascending order of degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Exact division, `None` when the remainder is non-zero.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p(x + shift)`, computed by Horner composition.
    pub fn shift(&self, shift: &Rational) -> Self {
        let lin = Self::new(vec![shift.clone(), Rational::one()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * &lin) + &Self::constant(c.clone())
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(Rational::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides its argument")
    }

    /// Sturm chain of the square-free part.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let p = self.squarefree();
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        chain
    }

    /// Number of distinct real roots in the closed interval `[a, b]`.
    pub fn count_roots_in(&self, a: &Rational, b: &Rational) -> usize {
        assert!(a <= b, "empty interval");
        if self.is_zero() {
            panic!("zero polynomial has infinitely many roots");
        }
        let chain = self.sturm_chain();
        let at = |x: &Rational| sign_changes(chain.iter().map(|p| sign(&p.eval(x))));
        // Sturm counts roots in the half-open interval (a, b].
        let half_open = at(a) - at(b);
        half_open + usize::from(self.eval(a).is_zero())
    }

    /// Number of distinct real roots strictly greater than `a`.
    pub fn count_roots_above(&self, a: &Rational) -> usize {
        let chain = self.sturm_chain();
        let at_a = sign_changes(chain.iter().map(|p| sign(&p.eval(a))));
        let at_inf = sign_changes(chain.iter().map(|p| match p.leading() {
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(c) if c.is_negative() => Ordering::Less,
            _ => Ordering::Equal,
        }));
        at_a - at_inf
    }
}

fn sign(q: &Rational) -> Ordering {
    q.cmp(&Rational::zero())
}

fn sign_changes(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut changes = 0;
    for s in signs.filter(|s| *s != Ordering::Equal) {
        if last != Ordering::Equal && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

impl Add for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: Self) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        UPoly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, rhs: Self) -> UPoly {
        self + &(-rhs)
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, rhs: Self) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};

    fn from_roots(roots: &[Rational]) -> UPoly {
        roots.iter().fold(UPoly::constant(int(1)), |acc, r| {
            &acc * &UPoly::new(vec![-r.clone(), int(1)])
        })
    }

    #[test]
    fn sturm_counts_match_constructed_roots() {
        let p = from_roots(&[rat(-1, 2), rat(1, 3), rat(1, 3), rat(2, 1)]);
        assert_eq!(p.count_roots_in(&int(0), &int(1)), 1);
        assert_eq!(p.count_roots_in(&int(-1), &int(3)), 3);
        assert_eq!(p.count_roots_in(&rat(1, 3), &rat(1, 3)), 1);
        assert_eq!(p.count_roots_in(&rat(1, 3), &int(2)), 2);
        assert_eq!(p.count_roots_in(&int(3), &int(4)), 0);
        assert_eq!(p.count_roots_above(&int(0)), 2);
        assert_eq!(p.count_roots_above(&int(2)), 0);
    }

    #[test]
    fn no_real_roots() {
        let p = UPoly::new(vec![int(1), int(0), int(1)]);
        assert_eq!(p.count_roots_in(&int(-10), &int(10)), 0);
    }

    #[test]
    fn shift_and_division() {
        let p = UPoly::new(vec![int(1), int(2), int(1)]); // (x+1)^2
        assert_eq!(p.shift(&int(-1)), UPoly::new(vec![int(0), int(0), int(1)]));
        let q = UPoly::new(vec![int(1), int(1)]);
        assert_eq!(p.exact_div(&q), Some(q.clone()));
        assert!(p.exact_div(&UPoly::new(vec![int(2), int(1)])).is_none());
    }
}
