//! Scalar abstractions shared by every series operation.
//!
//! Algebraic products only need ring operations, so they are generic over
//! [`Scalar`]. Shuffle inversion needs division ([`FieldScalar`]); norms and
//! the numerical modules need an ordered field with an absolute value
//! ([`RealScalar`]).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Commutative ring element usable as a series coefficient.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Send
        + Sync
        + 'static
        + Zero
        + One
        + FromPrimitive
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Scalars with exact or floating division.
pub trait FieldScalar: Scalar + Div<Output = Self> {}

impl<T> FieldScalar for T where T: Scalar + Div<Output = T> {}

/// Ordered fields: the rationals and the IEEE floats.
pub trait RealScalar: FieldScalar + PartialOrd + Signed + ToPrimitive {}

impl<T> RealScalar for T where T: FieldScalar + PartialOrd + Signed + ToPrimitive {}

/// `n!` as a scalar.
pub fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * from_usize::<T>(k))
}

/// Integer power by repeated multiplication.
pub fn pow<T: Scalar>(base: &T, exp: usize) -> T {
    let mut out = T::one();
    for _ in 0..exp {
        out = out * base.clone();
    }
    out
}

pub(crate) fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_u64(n as u64).expect("integer fits the scalar type")
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Text conversion for coefficients in the series file format.
///
/// Rationals print exactly as `p/q` (or `p` when integral); floats print with
/// 17 significant digits.
pub trait ScalarText: Sized {
    fn parse_scalar(text: &str) -> Option<Self>;
    fn format_scalar(&self) -> String;
}

impl ScalarText for BigRational {
    fn parse_scalar(text: &str) -> Option<Self> {
        parse_rational(text)
    }

    fn format_scalar(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl ScalarText for f64 {
    fn parse_scalar(text: &str) -> Option<Self> {
        if let Some((p, q)) = text.split_once('/') {
            let p: f64 = p.parse().ok()?;
            let q: f64 = q.parse().ok()?;
            if q == 0.0 {
                return None;
            }
            return Some(p / q);
        }
        let v: f64 = text.parse().ok()?;
        v.is_finite().then_some(v)
    }

    fn format_scalar(&self) -> String {
        format!("{:.16e}", self)
    }
}

impl ScalarText for f32 {
    fn parse_scalar(text: &str) -> Option<Self> {
        f64::parse_scalar(text).map(|v| v as f32)
    }

    fn format_scalar(&self) -> String {
        format!("{:.8e}", self)
    }
}

/// Parses an integer, `p/q`, or a decimal (with optional exponent) exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.parse().ok()?;
        let q: BigInt = q.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if shift >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-shift) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(value: f64) -> Option<BigRational> {
    BigRational::from_float(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_text_forms() {
        assert_eq!(parse_rational("3/2"), Some(q(3, 2)));
        assert_eq!(parse_rational("-4"), Some(q(-4, 1)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("-1.5e-1"), Some(q(-3, 20)));
        assert_eq!(parse_rational("2e3"), Some(q(2000, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(q(6, 4).format_scalar(), "3/2");
        assert_eq!(q(-8, 2).format_scalar(), "-4");
    }

    #[test]
    fn float_text_has_17_significant_digits() {
        let s = (1.0f64 / 3.0).format_scalar();
        assert_eq!(s, "3.3333333333333331e-1");
        assert_eq!(f64::parse_scalar(&s), Some(1.0 / 3.0));
        assert_eq!(f64::parse_scalar("1/4"), Some(0.25));
    }

    #[test]
    fn small_combinatorics() {
        assert_eq!(factorial::<BigRational>(5), q(120, 1));
        assert_eq!(pow(&q(2, 3), 3), q(8, 27));
        assert_eq!(binomial(23, 11), BigInt::from(1352078));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }
}
