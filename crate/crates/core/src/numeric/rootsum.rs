//! Exact comparison of `Σ x_i^(1/d)` against a rational threshold.
//!
//! The fast path encloses each root in a dyadic interval and doubles the
//! precision until the sum's enclosure excludes the threshold. Ties are
//! detected exactly through the conjugate-sum polynomial
//! `Q(Y) = Π (Y - Σ ζ_i x_i^(1/d))` (product over all choices of d-th roots of
//! unity ζ_i), which has rational coefficients. The all-real branch is the
//! largest real root of `Q`, and every other branch has real part at most
//! `A - c_d · min_i x_i^(1/d)` with `c_d = 1 - cos(2π/d)`; once the enclosure
//! of `A` is narrower than that gap, vanishing of `Q` at the threshold pins the
//! tie on the all-real branch.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::interval::{AlgebraicInterval, PrecisionPolicy};
use super::rational::{rat, Rational};
use super::upoly::UPoly;

/// Result of a root-sum comparison: the verdict plus the last enclosure of the sum.
#[derive(Debug, Clone)]
pub struct RootSumComparison {
    pub ordering: Ordering,
    pub sum: AlgebraicInterval,
}

/// Monic polynomial whose roots are all conjugate sums `Σ ζ_i x_i^(1/d)`.
///
/// Each step computes the norm `Π_ζ Q(Y - ζ r)` as the determinant of
/// multiplication by `Q(Y - z)` in `Q[Y][z]/(z^d - x)`.
pub fn conjugate_sum_polynomial(values: &[Rational], d: u32) -> UPoly {
    assert!(d >= 1);
    let mut q = UPoly::x();
    for x in values {
        q = norm_step(&q, x, d as usize);
    }
    q
}

fn norm_step(q: &UPoly, x: &Rational, d: usize) -> UPoly {
    // Q(Y - z) = Σ_j z^j · (-1)^j/j! · Q^(j)(Y), folded modulo z^d = x.
    let mut residues = vec![UPoly::zero(); d];
    let mut deriv = q.clone();
    let mut factorial = Rational::one();
    let mut j = 0usize;
    while !deriv.is_zero() {
        if j > 0 {
            factorial *= Rational::from_integer(j.into());
        }
        let mut coeff = deriv.scale(&factorial.recip());
        if j % 2 == 1 {
            coeff = -&coeff;
        }
        let xpow = num_traits::pow(x.clone(), j / d);
        let slot = j % d;
        residues[slot] = &residues[slot] + &coeff.scale(&xpow);
        deriv = deriv.derivative();
        j += 1;
    }
    if d == 1 {
        return residues.pop().unwrap();
    }
    if d == 2 {
        let a0 = &residues[0];
        let a1 = &residues[1];
        return &(a0 * a0) - &(a1 * a1).scale(x);
    }
    // Column c holds the coordinates of z^c · a(z) in the basis 1, z, ..., z^(d-1).
    let mut m = vec![vec![UPoly::zero(); d]; d];
    for c in 0..d {
        for (jj, a) in residues.iter().enumerate() {
            let k = jj + c;
            let (row, factor) = if k >= d {
                (k - d, x.clone())
            } else {
                (k, Rational::one())
            };
            m[row][c] = &m[row][c] + &a.scale(&factor);
        }
    }
    bareiss_det(m)
}

/// Fraction-free determinant over `Q[Y]`.
pub(crate) fn bareiss_det(mut m: Vec<Vec<UPoly>>) -> UPoly {
    let n = m.len();
    let mut sign = Rational::one();
    let mut prev = UPoly::constant(Rational::one());
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return UPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(&sign)
}

/// Lower bound on `1 - cos(2π/d)` for `d >= 2`.
fn branch_gap_constant(d: u32) -> Rational {
    if d == 2 {
        return Rational::from_integer(2.into());
    }
    // x = 2π/d ≤ 2.0944 lies where x²/2 - x⁴/24 is increasing and below 1 - cos x.
    let x = rat(628, 100) / Rational::from_integer(d.into());
    let x2 = &x * &x;
    &x2 / rat(2, 1) - &(&x2 * &x2) / rat(24, 1)
}

/// Certified enclosure of `Σ x_i^(1/d)` at the given precision.
pub fn root_sum_interval(values: &[Rational], d: u32, bits: u32) -> AlgebraicInterval {
    let roots: Vec<_> = values
        .iter()
        .map(|x| AlgebraicInterval::root_of(x, d, bits))
        .collect();
    AlgebraicInterval::sum(roots.iter())
}

fn bracket_sum(values: &[Rational], d: u32, bits: u32, exact_roots: bool) -> AlgebraicInterval {
    if exact_roots {
        return root_sum_interval(values, d, bits);
    }
    let roots: Vec<_> = values
        .iter()
        .map(|x| AlgebraicInterval::root_bracket(x, d, bits))
        .collect();
    AlgebraicInterval::sum(roots.iter())
}

/// Exact trichotomy of `Σ x_i^(1/d)` against `threshold`, with `x_i >= 0`.
pub fn compare_root_sum(
    values: &[Rational],
    d: u32,
    threshold: &Rational,
    policy: PrecisionPolicy,
) -> RootSumComparison {
    compare_root_sum_impl(values, d, threshold, policy, true)
}

fn compare_root_sum_impl(
    values: &[Rational],
    d: u32,
    threshold: &Rational,
    policy: PrecisionPolicy,
    exact_roots: bool,
) -> RootSumComparison {
    assert!(d >= 1, "root degree must be positive");
    assert!(
        values.iter().all(|x| !x.is_negative()),
        "root sums need nonnegative values"
    );
    let nonzero: Vec<Rational> = values.iter().filter(|x| !x.is_zero()).cloned().collect();

    if d == 1 || nonzero.is_empty() {
        let total: Rational = nonzero.iter().fold(Rational::zero(), |a, r| a + r);
        return RootSumComparison {
            ordering: total.cmp(threshold),
            sum: AlgebraicInterval::exact(total),
        };
    }
    if !threshold.is_positive() {
        return RootSumComparison {
            ordering: Ordering::Greater,
            sum: root_sum_interval(&nonzero, d, policy.start_bits),
        };
    }

    let x_min = nonzero.iter().min().expect("non-empty").clone();
    let gap_constant = branch_gap_constant(d);
    let mut vanishes: Option<bool> = None;
    let mut bits = policy.start_bits;
    loop {
        let sum = bracket_sum(&nonzero, d, bits, exact_roots);
        if let Some(ord) = sum.cmp_rational(threshold) {
            return RootSumComparison { ordering: ord, sum };
        }
        let tie_possible = *vanishes.get_or_insert_with(|| {
            conjugate_sum_polynomial(&nonzero, d)
                .eval(threshold)
                .is_zero()
        });
        if tie_possible {
            let gap = &gap_constant * AlgebraicInterval::root_bracket(&x_min, d, bits).lower();
            if gap.is_positive() && sum.upper() - &gap < *threshold {
                return RootSumComparison {
                    ordering: Ordering::Equal,
                    sum,
                };
            }
        } else if bits >= policy.cap_bits {
            // Not a tie; the all-real branch is the largest real root of Q.
            let q = conjugate_sum_polynomial(&nonzero, d);
            let ordering = if q.count_roots_above(threshold) > 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
            return RootSumComparison { ordering, sum };
        }
        bits = bits.saturating_mul(2);
    }
}

/// `Σ √b_i` compared with `threshold`; see [`compare_root_sum`].
pub fn compare_sqrt_sum(b: &[Rational], threshold: &Rational) -> Ordering {
    compare_root_sum(b, 2, threshold, PrecisionPolicy::default()).ordering
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};

    #[test]
    fn conjugate_polynomial_for_square_roots() {
        // roots ±√2 ± √3: Y⁴ - 10Y² + 1
        let q = conjugate_sum_polynomial(&[int(2), int(3)], 2);
        assert_eq!(
            q,
            UPoly::new(vec![int(1), int(0), int(-10), int(0), int(1)])
        );
    }

    #[test]
    fn conjugate_polynomial_for_cube_roots() {
        // single cube root: Y³ - x
        let q = conjugate_sum_polynomial(&[rat(1, 2)], 3);
        assert_eq!(q, UPoly::new(vec![rat(-1, 2), int(0), int(0), int(1)]));
        // ∛2 + ∛4 is a root of Y³ - 6Y - 6, and the full norm has degree 9.
        let q = conjugate_sum_polynomial(&[int(2), int(4)], 3);
        assert_eq!(q.degree(), Some(9));
        let minimal = UPoly::new(vec![int(-6), int(-6), int(0), int(1)]);
        assert!(q.exact_div(&minimal).is_some());
    }

    #[test]
    fn spec_examples() {
        let one = int(1);
        let intro = [rat(4, 25), rat(9, 100), rat(1, 25), rat(1, 100)];
        assert_eq!(compare_sqrt_sum(&intro, &one), Ordering::Equal);
        let quarters = vec![rat(1, 4); 4];
        assert_eq!(compare_sqrt_sum(&quarters, &one), Ordering::Greater);
        assert_eq!(
            compare_sqrt_sum(&[rat(1, 4), rat(1, 25), rat(1, 36)], &one),
            Ordering::Less
        );
    }

    #[test]
    fn tie_is_certified_through_vanishing_polynomial() {
        // With exact roots disabled every root is a width-2^-bits bracket, so the
        // tie can only be settled by the vanishing test plus branch separation.
        let one = int(1);
        let policy = PrecisionPolicy::default();
        let intro = [rat(4, 25), rat(9, 100), rat(1, 25), rat(1, 100)];
        let cmp = compare_root_sum_impl(&intro, 2, &one, policy, false);
        assert_eq!(cmp.ordering, Ordering::Equal);
        assert!(!cmp.sum.is_exact());

        let cubes = [rat(8, 27), rat(1, 27)];
        let cmp = compare_root_sum_impl(&cubes, 3, &one, policy, false);
        assert_eq!(cmp.ordering, Ordering::Equal);

        // 3/2 - 1/2 = 1 is a non-principal branch; the principal sum is 2.
        let other_branch = [rat(9, 4), rat(1, 4)];
        let cmp = compare_root_sum_impl(&other_branch, 2, &one, policy, false);
        assert_eq!(cmp.ordering, Ordering::Greater);
    }

    #[test]
    fn sturm_fallback_agrees_with_intervals() {
        let values = [rat(1, 3), rat(1, 7), rat(1, 11)];
        let tight = PrecisionPolicy::new(8, 8);
        for t in [rat(1, 1), rat(3, 2), rat(6, 5)] {
            let fast = compare_root_sum(&values, 2, &t, PrecisionPolicy::default()).ordering;
            let slow = compare_root_sum(&values, 2, &t, tight).ordering;
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn zero_values_are_ignored() {
        let cmp = compare_sqrt_sum(&[rat(0, 1), rat(1, 4), rat(1, 4)], &int(1));
        assert_eq!(cmp, Ordering::Equal);
        assert_eq!(compare_sqrt_sum(&[], &int(0)), Ordering::Equal);
        assert_eq!(compare_sqrt_sum(&[rat(0, 1)], &int(1)), Ordering::Less);
    }
}
