//! Scalar traits shared by the polynomial and linear-algebra code.
//!
//! Everything that counts roots or decides a sign condition runs over
//! [`Rational`](crate::Rational). The same code also accepts `f64`/`f32`,
//! which is how the probe and the cutoff evaluation get cheap approximate
//! arithmetic without a second implementation.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Coefficient ring: enough structure for sparse polynomial arithmetic.
pub trait Ring:
    Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Num + Signed + Send + Sync + 'static
{
}

impl<T> Ring for T where
    T: Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Num + Signed + Send + Sync + 'static
{
}

/// An ordered field. Division is exact for the rational implementation.
pub trait Scalar: Ring + FromPrimitive + ToPrimitive {
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// -1, 0 or 1.
    fn sign_i8(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_bigint(n: &BigInt) -> Self {
        Ratio::from_integer(n.clone())
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            const EXACT: bool = false;

            fn from_ratio(num: i64, den: i64) -> Self {
                num as $f / den as $f
            }

            fn from_bigint(n: &BigInt) -> Self {
                n.to_f64().unwrap_or(f64::NAN) as $f
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

/// Exact conversion of a finite float into a rational.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Parses `"3"`, `"-5/2"`, `"0.125"` or `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(Ratio::from_integer(n));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        Ratio::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Ratio::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

/// Rational approximation with the smallest denominator inside the closed
/// interval `[lo, hi]` (Stern–Brocot descent over continued fractions).
pub fn simplest_rational_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi, "empty interval");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_rational_between(&-hi, &-lo);
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl + BigRational::from_integer(1.into()) <= *hi {
        return lo.ceil();
    }
    // same integer part: recurse on reciprocals of the fractional parts
    let int = lo.floor();
    let lo_frac = lo - &int;
    let hi_frac = hi - &int;
    let inner = simplest_positive(&hi_frac.recip(), &lo_frac.recip());
    int + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("5/2"), Some(q(5, 2)));
        assert_eq!(parse_rational("-3"), Some(q(-3, 1)));
        assert_eq!(parse_rational("2.5"), Some(q(5, 2)));
        assert_eq!(parse_rational("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_rational(".25"), Some(q(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_rational_between(&q(49, 100), &q(51, 100)), q(1, 2));
        assert_eq!(simplest_rational_between(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_rational_between(&q(-51, 100), &q(-49, 100)), q(-1, 2));
        assert_eq!(simplest_rational_between(&q(-1, 100), &q(1, 100)), q(0, 1));
        assert_eq!(simplest_rational_between(&q(7, 3), &q(7, 3)), q(7, 3));
        assert_eq!(simplest_rational_between(&q(1, 1), &q(5, 2)), q(1, 1));
    }

    #[test]
    fn float_scalars() {
        assert_eq!(<f64 as Scalar>::from_ratio(1, 4), 0.25);
        assert_eq!((-2.0f64).sign_i8(), -1);
        assert_eq!(q(0, 1).sign_i8(), 0);
    }
}
