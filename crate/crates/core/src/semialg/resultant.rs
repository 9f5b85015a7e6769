use num_traits::{One, Zero};

use super::poly::MultivariatePolynomial as Poly;
use crate::error::{Error, Result};
use crate::numeric::Rational;

pub const DEFAULT_DEGREE_CAP: u64 = 64;

/// Fraction-free determinant; every division is exact.
fn bareiss(mut m: Vec<Vec<Poly>>, nvars: usize) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::constant(nvars, Rational::one());
    }
    let mut negate = false;
    let mut prev = Poly::constant(nvars, Rational::one());
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Poly::zero(nvars);
            };
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev).expect("Bareiss step divides exactly");
            }
            m[i][k] = Poly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Sylvester resultant of `p` and `q` with respect to variable `var`.
pub fn resultant(p: &Poly, q: &Poly, var: usize) -> Poly {
    let nvars = p.nvars();
    let pc = p.coefficients_in(var);
    let qc = q.coefficients_in(var);
    let dp = pc.len() - 1;
    let dq = qc.len() - 1;
    let size = dp + dq;
    if size == 0 {
        return Poly::constant(nvars, Rational::one());
    }
    let mut m = vec![vec![Poly::zero(nvars); size]; size];
    for i in 0..dq {
        for k in 0..=dp {
            m[i][i + k] = pc[dp - k].clone();
        }
    }
    for i in 0..dp {
        for k in 0..=dq {
            m[dq + i][i + k] = qc[dq - k].clone();
        }
    }
    bareiss(m, nvars)
}

pub fn boundary_polynomial(d: u32, n: usize) -> Result<Poly> {
    boundary_polynomial_with_cap(d, n, DEFAULT_DEGREE_CAP)
}

/// Polynomial in `x_1..x_n` vanishing where `Σ x_i^(1/d) = 1` on some branch,
/// of total degree `d^(n-1)` and constant term one.
pub fn boundary_polynomial_with_cap(d: u32, n: usize, cap: u64) -> Result<Poly> {
    if d == 0 || n < 2 {
        return Err(Error::InvalidArgument(
            "order must be at least 1 and size at least 2".into(),
        ));
    }
    let degree = u32::try_from(n - 1)
        .ok()
        .and_then(|e| u64::from(d).checked_pow(e));
    match degree {
        Some(k) if k <= cap => {}
        Some(k) => {
            return Err(Error::DegreeCapExceeded {
                degree: k.to_string(),
                cap,
            })
        }
        None => {
            return Err(Error::DegreeCapExceeded {
                degree: format!("{d}^{}", n - 1),
                cap,
            })
        }
    }
    // Variables: x_1..x_n, then y_1..y_{n-1}.
    let nv = 2 * n - 1;
    let one = Poly::constant(nv, Rational::one());
    let ys = (0..n - 1).fold(Poly::zero(nv), |acc, i| &acc + &Poly::var(nv, n + i));
    let mut p = &(&one - &ys).pow(d) - &Poly::var(nv, n - 1);
    for i in 0..n - 1 {
        let q = &Poly::var(nv, n + i).pow(d) - &Poly::var(nv, i);
        p = resultant(&p, &q, n + i);
    }
    let p = p.truncate_vars(n)?;
    let c = p.constant_term();
    if c.is_zero() {
        return Err(Error::InternalInconsistency(
            "boundary polynomial has no constant term".into(),
        ));
    }
    Ok(p.scale(&(Rational::one() / c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn small_cases() {
        let p = boundary_polynomial(1, 2).unwrap();
        let expect = Poly::from_terms(
            2,
            [
                (vec![0, 0], rat(1, 1)),
                (vec![1, 0], rat(-1, 1)),
                (vec![0, 1], rat(-1, 1)),
            ],
        )
        .unwrap();
        assert_eq!(p, expect);

        let p = boundary_polynomial(2, 2).unwrap();
        let x1 = Poly::var(2, 0);
        let x2 = Poly::var(2, 1);
        let one = Poly::constant(2, rat(1, 1));
        let expect = &(&(&x1 + &x2) - &one).pow(2) - &(&x1 * &x2).scale(&rat(4, 1));
        assert_eq!(p, expect);
        assert_eq!(p.evaluate(&[rat(1, 4), rat(1, 4)]).unwrap(), rat(0, 1));
        assert_eq!(p.evaluate(&[rat(0, 1), rat(0, 1)]).unwrap(), rat(1, 1));

        let p = boundary_polynomial(2, 3).unwrap();
        assert_eq!(p.total_degree(), Some(4));
        assert_eq!(
            p.evaluate(&[rat(1, 4), rat(1, 4), rat(0, 1)]).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(
            boundary_polynomial(2, 40),
            Err(Error::DegreeCapExceeded { cap: 64, .. })
        ));
        assert!(matches!(
            boundary_polynomial_with_cap(3, 3, 8),
            Err(Error::DegreeCapExceeded { .. })
        ));
    }
}
