//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Exact types (big rationals) treat zero literally. Floating-point types use
//! a small absolute tolerance wherever a routine has to decide whether a
//! quantity vanishes, so the same pivoting and feasibility code runs on both.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// A field element usable by the linear-algebra and LP routines.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` for types where arithmetic never rounds.
    const EXACT: bool;

    /// Whether the value should be treated as zero.
    fn is_negligible(&self) -> bool;

    /// Converts an exact rational into this scalar type.
    fn from_rational(value: &BigRational) -> Self;

    /// Canonical textual form used in documents.
    fn format_scalar(&self) -> String;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(&BigRational::new(numer.into(), denom.into()))
    }

    /// Parses `"p/q"`, `"k"` or a decimal literal such as `"0.05"`.
    fn parse_scalar(text: &str) -> Result<Self, Error> {
        parse_rational(text).map(|r| Self::from_rational(&r))
    }

    fn is_strictly_positive(&self) -> bool {
        !self.is_negligible() && *self > Self::zero()
    }

    fn is_strictly_negative(&self) -> bool {
        !self.is_negligible() && *self < Self::zero()
    }

    /// Equality up to the type's zero test.
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable as scalar")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }

    fn format_scalar(&self) -> String {
        // Ratio's Display already prints "k" for integers and "p/q" otherwise.
        self.to_string()
    }
}

macro_rules! float_scalar {
    ($ty:ty, $eps:expr) => {
        impl Scalar for $ty {
            const EXACT: bool = false;

            fn is_negligible(&self) -> bool {
                self.abs() <= $eps
            }

            fn from_rational(value: &BigRational) -> Self {
                value.to_f64().unwrap_or(f64::NAN) as $ty
            }

            fn format_scalar(&self) -> String {
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f64, 1e-10);
float_scalar!(f32, 1e-5);

/// Parses an exact rational from `"p/q"`, an integer, or a finite decimal.
pub fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let numer = BigInt::from_str_radix(num.trim(), 10).map_err(|_| bad())?;
        let denom = BigInt::from_str_radix(den.trim(), 10).map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(numer, denom));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (sign, digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if !digits.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if digits.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let joined = format!("{digits}{frac_part}");
        let numer = BigInt::from_str_radix(&joined, 10).map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(BigRational::new(numer * sign, denom));
    }
    let numer = BigInt::from_str_radix(s, 10).map_err(|_| bad())?;
    Ok(BigRational::from_integer(numer))
}

/// Shorthand for building exact rationals in code and tests.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(numer.into(), denom.into())
}

/// Sum of a slice of scalars.
pub fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().cloned().fold(T::zero(), |acc, v| acc + v)
}

/// Inner product of two equally long slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}
