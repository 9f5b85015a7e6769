//! Exact rational helpers on top of `num_rational::BigRational`.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.16"` or `"-1.5e-3"`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse {text:?} as a rational"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "zero denominator in {text:?}"
            )));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let joined = format!("{whole}{frac}");
    let mut value = Rational::from_integer(joined.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Exact `d`-th root when `q` is a perfect `d`-th power of a rational.
pub fn exact_root(q: &Rational, d: u32) -> Option<Rational> {
    if d == 1 {
        return Some(q.clone());
    }
    if q.is_negative() {
        return None;
    }
    let n = q.numer().magnitude().nth_root(d);
    let m = q.denom().magnitude().nth_root(d);
    if num_traits::pow(n.clone(), d as usize) == *q.numer().magnitude()
        && num_traits::pow(m.clone(), d as usize) == *q.denom().magnitude()
    {
        Some(Rational::new(
            BigInt::from_biguint(Sign::Plus, n),
            BigInt::from_biguint(Sign::Plus, m),
        ))
    } else {
        None
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// `2^k` as a rational; negative `k` gives `2^-|k|`.
pub fn pow2(k: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(2), k.unsigned_abs() as usize);
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Rounds down to a multiple of `2^-bits`.
pub fn floor_dyadic(q: &Rational, bits: u32) -> Rational {
    let scale = num_traits::pow(BigInt::from(2), bits as usize);
    let scaled = q * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Rounds up to a multiple of `2^-bits`.
pub fn ceil_dyadic(q: &Rational, bits: u32) -> Rational {
    let scale = num_traits::pow(BigInt::from(2), bits as usize);
    let scaled = q * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

/// Smallest integer `k` with `10^-k <= width`, clamped to `[0, 40]`: the number of
/// decimal digits certified by an enclosure of that width.
pub fn certified_digits(width: &Rational) -> usize {
    if width.is_zero() {
        return 40;
    }
    let ten = Rational::from_integer(BigInt::from(10));
    let mut bound = Rational::one();
    let mut k = 0;
    while k < 40 {
        let next = &bound / &ten;
        if &next < width {
            break;
        }
        bound = next;
        k += 1;
    }
    k
}
