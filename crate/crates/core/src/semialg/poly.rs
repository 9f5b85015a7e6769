use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, Rational};

/// Exponent vector, ordered by total degree and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with rational coefficients in `nvars` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultivariatePolynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultivariatePolynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars.to_string(),
                    found: e.len().to_string(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = Monomial(e);
        let sum = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(e.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(self.nvars, Rational::one()), |acc, _| {
            &acc * self
        })
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    /// Coefficients as polynomials in the other variables, lowest power first.
    pub fn coefficients_in(&self, var: usize) -> Vec<Self> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = std::mem::take(&mut e[var]) as usize;
            out[k].add_term(e, c.clone());
        }
        out
    }

    /// Keeps the first `n` variables; the dropped ones must not occur.
    pub fn truncate_vars(&self, n: usize) -> Result<Self> {
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            if m.0[n..].iter().any(|&e| e > 0) {
                return Err(Error::InternalInconsistency(
                    "eliminated variable survives".into(),
                ));
            }
            out.add_term(m.0[..n].to_vec(), c.clone());
        }
        Ok(out)
    }

    /// Variable `i` of the result is variable `perm[i]` of `self`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(perm.iter().map(|&p| m.0[p]).collect(), c.clone());
        }
        out
    }

    fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Quotient when `divisor` divides `self` exactly.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (lm, lc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let e: Vec<u32> = m.0.iter().zip(&lm.0).map(|(a, b)| a - b).collect();
            let q = c / lc;
            let mut t = Self::zero(self.nvars);
            t.add_term(e, q);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some(quot)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars.to_string(),
                found: point.len().to_string(),
            });
        }
        let mut powers: Vec<Vec<Rational>> = point
            .iter()
            .map(|x| vec![Rational::one(), x.clone()])
            .collect();
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                let list = &mut powers[i];
                while list.len() <= e as usize {
                    let next = list.last().expect("non-empty") * &point[i];
                    list.push(next);
                }
                t *= &list[e as usize];
            }
            total += t;
        }
        Ok(total)
    }

    /// One term per line: coefficient, then the exponent vector.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (m, c) in self.terms() {
            out.push_str(&c.to_string());
            for e in &m.0 {
                out.push(' ');
                out.push_str(&e.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(nvars: usize, text: &str) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let c = parse_rational(parts.next().expect("non-empty line"))?;
            let e = parts
                .map(|s| s.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|err| Error::InvalidArgument(format!("line {}: {err}", lineno + 1)))?;
            if e.len() != nvars {
                return Err(Error::InvalidArgument(format!(
                    "line {}: expected {nvars} exponents, found {}",
                    lineno + 1,
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

impl fmt::Display for MultivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{e}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn add(self, rhs: Self) -> MultivariatePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        out
    }
}

impl Neg for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn neg(self) -> MultivariatePolynomial {
        self.scale(&-Rational::one())
    }
}

impl Sub for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn sub(self, rhs: Self) -> MultivariatePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.0.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn mul(self, rhs: Self) -> MultivariatePolynomial {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let e = Monomial(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect());
                let prod = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MultivariatePolynomial {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    type P = MultivariatePolynomial;

    #[test]
    fn arithmetic_and_division() {
        let x = P::var(2, 0);
        let y = P::var(2, 1);
        let one = P::constant(2, rat(1, 1));
        let a = &(&x + &y) - &one;
        let b = &x - &y;
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&a), Some(b.clone()));
        assert_eq!(prod.exact_div(&b), Some(a.clone()));
        assert_eq!(x.exact_div(&y), None);
        assert_eq!(a.pow(2).total_degree(), Some(2));
        assert_eq!(prod.evaluate(&[rat(1, 2), rat(1, 2)]).unwrap(), rat(0, 1));
        assert!(prod.evaluate(&[rat(1, 2)]).is_err());
    }

    #[test]
    fn grlex_order_and_text() {
        let p = P::from_terms(
            2,
            [
                (vec![0, 0], rat(1, 1)),
                (vec![1, 0], rat(-2, 1)),
                (vec![0, 2], rat(3, 4)),
            ],
        )
        .unwrap();
        let text = p.to_text();
        assert_eq!(text, "3/4 0 2\n-2 1 0\n1 0 0\n");
        assert_eq!(P::from_text(2, &text).unwrap(), p);
        let c = p.coefficients_in(1);
        assert_eq!(c.len(), 3);
        assert_eq!(c[2].constant_term(), rat(3, 4));
    }
}
