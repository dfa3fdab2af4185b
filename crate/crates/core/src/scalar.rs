//! Scalar backends.
//!
//! Everything algebraic in the crate is generic over [`Scalar`]. Two
//! implementations exist: [`Rational`], an exact arbitrary-size fraction, and
//! [`Real`], a binary floating point number carried at a process-wide
//! precision (224 bits, roughly 67 significant digits, unless changed with
//! [`set_precision_digits`]).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use dashu::base::{Abs, SquareRoot};
use dashu::float::{round::mode::HalfEven, FBig};
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

use crate::error::{Error, Result};

/// Smallest precision accepted by [`set_precision_digits`].
pub const MIN_PRECISION_DIGITS: usize = 30;

const DEFAULT_PRECISION_BITS: usize = 224;

static PRECISION_BITS: AtomicUsize = AtomicUsize::new(DEFAULT_PRECISION_BITS);

/// Working precision of [`Real`] in bits.
pub fn precision_bits() -> usize {
    PRECISION_BITS.load(AtomicOrdering::Relaxed)
}

/// Decimal digits carried by [`Real`] at the current precision.
pub fn precision_digits() -> usize {
    (precision_bits() as f64 * std::f64::consts::LOG10_2).floor() as usize
}

/// Sets the working precision of [`Real`] to at least `digits` decimal
/// digits. Values created before the call keep their own precision.
pub fn set_precision_digits(digits: usize) -> Result<()> {
    if digits < MIN_PRECISION_DIGITS {
        return Err(Error::Invalid(format!(
            "precision_digits = {digits} is below the minimum of {MIN_PRECISION_DIGITS}"
        )));
    }
    let bits = (digits as f64 / std::f64::consts::LOG10_2).ceil() as usize + 8;
    PRECISION_BITS.store(bits, AtomicOrdering::Relaxed);
    Ok(())
}

/// Field operations shared by the exact and the extended-precision backend.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether zero tests on this scalar are exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn is_zero(&self) -> bool;

    fn to_f64(&self) -> f64;

    fn to_real(&self) -> Real;

    fn zero() -> Self {
        Self::from_ratio(0, 1)
    }

    fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Exact rational number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(RBig);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(RBig::from_parts_signed(IBig::from(num), IBig::from(den)))
    }

    pub fn from_parts(num: IBig, den: UBig) -> Self {
        Rational(RBig::from_parts(num, den))
    }

    pub fn numerator(&self) -> &IBig {
        self.0.numerator()
    }

    pub fn denominator(&self) -> &UBig {
        self.0.denominator()
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denominator() == UBig::ONE
    }

    pub fn inner(&self) -> &RBig {
        &self.0
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numerator())
        } else {
            write!(f, "{}/{}", self.0.numerator(), self.0.denominator())
        }
    }
}

/// Accepts integers, fractions `p/q`, and decimals with an optional
/// exponent (`-0.75`, `1.5e-3`). Decimals are converted exactly.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not a rational number"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: IBig = num.trim().parse().map_err(|_| bad())?;
            let den: IBig = den.trim().parse().map_err(|_| bad())?;
            if den == IBig::ZERO {
                return Err(Error::Parse(format!("`{s}` has a zero denominator")));
            }
            return Ok(Rational(RBig::from_parts_signed(num, den)));
        }

        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(pos) => {
                let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
                (&s[..pos], exp)
            }
            None => (s, 0),
        };
        let (negative, mantissa) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: IBig = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let scale = exponent - frac_part.len() as i64;
        let ten = IBig::from(10u8);
        let value = if scale >= 0 {
            RBig::from(num * ten.pow(scale as usize))
        } else {
            let den = ten.pow((-scale) as usize);
            RBig::from_parts_signed(num, den)
        };
        Ok(Rational(value))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn is_zero(&self) -> bool {
        self.0 == RBig::ZERO
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn to_real(&self) -> Real {
        Real::from_ibig(self.0.numerator().clone()) / Real::from_ibig(self.0.denominator().clone().into())
    }
}

type Float = FBig<HalfEven, 2>;

/// Extended-precision real number at the process-wide working precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    fn wrap(value: Float) -> Self {
        let bits = precision_bits();
        if value.precision() == bits {
            Real(value)
        } else {
            Real(value.with_precision(bits).value())
        }
    }

    pub fn from_ibig(n: IBig) -> Self {
        Real::wrap(Float::from(n))
    }

    /// Exact conversion; every finite `f64` is representable.
    pub fn from_f64(x: f64) -> Self {
        let value = Float::try_from(x).expect("finite f64");
        Real::wrap(value)
    }

    /// `2^k` exactly.
    pub fn pow2(k: isize) -> Self {
        Real::wrap(Float::from_parts(IBig::ONE, k))
    }

    /// `self^e` for `self > 0`.
    pub fn powf(&self, e: &Real) -> Real {
        Real(self.0.powf(&e.0))
    }

    pub fn powi(&self, e: i32) -> Real {
        let mut acc = Real::from_ratio(1, 1);
        let base = if e < 0 { Real::from_ratio(1, 1) / self.clone() } else { self.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = acc * base.clone();
        }
        acc
    }

    pub fn ln(&self) -> Real {
        Real(self.0.ln())
    }

    pub fn exp(&self) -> Real {
        Real(self.0.exp())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.sqrt())
    }

    /// Decimal scientific notation with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.0.repr().is_zero() {
            return "0".to_string();
        }
        let decimal = self.0.to_decimal().value().with_precision(digits).value();
        let repr = decimal.repr();
        let sig = repr.significand().to_string();
        let (sign, sig) = match sig.strip_prefix('-') {
            Some(rest) => ("-", rest.to_string()),
            None => ("", sig),
        };
        let exp = repr.exponent() + sig.len() as isize - 1;
        let sig = sig.trim_end_matches('0');
        let sig = if sig.is_empty() { "0" } else { sig };
        let (head, tail) = sig.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(precision_digits()))
    }
}

impl Scalar for Real {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        let n = Real::wrap(Float::from(num));
        if den == 1 {
            n
        } else {
            n / Real::wrap(Float::from(den))
        }
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_real()
    }

    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn to_real(&self) -> Real {
        self.clone()
    }

    fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }
}

macro_rules! forward_binop {
    ($ty:ident, $trait:ident, $method:ident) => {
        impl $trait for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                $ty($trait::$method(self.0, rhs.0))
            }
        }

        impl<'a> $trait<&'a $ty> for &'a $ty {
            type Output = $ty;
            fn $method(self, rhs: &'a $ty) -> $ty {
                $ty($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Rational, Add, add);
forward_binop!(Rational, Sub, sub);
forward_binop!(Rational, Mul, mul);
forward_binop!(Rational, Div, div);
forward_binop!(Real, Add, add);
forward_binop!(Real, Sub, sub);
forward_binop!(Real, Mul, mul);
forward_binop!(Real, Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

/// Total order for sorting scalars known not to be NaN.
pub fn cmp_scalars<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/4".parse::<Rational>().unwrap(), Rational::new(3, 4));
        assert_eq!("-0.75".parse::<Rational>().unwrap(), Rational::new(-3, 4));
        assert_eq!("1.5e-3".parse::<Rational>().unwrap(), Rational::new(3, 2000));
        assert_eq!("2E2".parse::<Rational>().unwrap(), Rational::new(200, 1));
        assert_eq!(".5".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("6/-4".parse::<Rational>().unwrap(), Rational::new(-3, 2));
        assert!("abc".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("1.2.3".parse::<Rational>().is_err());
    }

    #[test]
    fn rational_display() {
        assert_eq!(Rational::new(-6, 4).to_string(), "-3/2");
        assert_eq!(Rational::new(8, 4).to_string(), "2");
        assert_eq!(Rational::zero().to_string(), "0");
    }

    #[test]
    fn real_carries_extended_precision() {
        let third = Real::from_ratio(1, 3);
        let back = third.clone() * Real::from_int(3) - Real::one();
        assert!(back.abs().to_f64() < 1e-60);
        let two = Real::from_int(2);
        let root = two.sqrt();
        let err = (root.clone() * root - two).abs();
        assert!(err.to_f64() < 1e-60);
        assert!(precision_digits() >= 50);
    }

    #[test]
    fn real_transcendentals() {
        let x = Real::from_ratio(3, 2);
        let y = x.powf(&Real::from_ratio(1, 2));
        assert!((y.to_f64() - 1.5f64.sqrt()).abs() < 1e-15);
        let e = Real::one().exp();
        assert!((e.ln() - Real::one()).abs().to_f64() < 1e-60);
        assert_eq!(Real::pow2(-40).to_f64(), 2f64.powi(-40));
        assert_eq!(Real::from_ratio(2, 1).powi(-3).to_f64(), 0.125);
    }

    #[test]
    fn real_decimal_string() {
        assert_eq!(Real::from_ratio(1, 4).to_decimal_string(10), "2.5e-1");
        assert_eq!(Real::from_ratio(-3, 1).to_decimal_string(10), "-3e0");
        let s = Real::from_ratio(1, 3).to_decimal_string(40);
        assert!(s.starts_with("3.333333333333333333333333333333333333333e-1"), "{s}");
    }

    #[test]
    fn rational_to_real_and_f64() {
        let r = Rational::new(-5, 8);
        assert_eq!(r.to_f64(), -0.625);
        assert_eq!(r.to_real().to_f64(), -0.625);
        assert_eq!(Rational::new(7, 2).abs(), Rational::new(7, 2));
        assert_eq!(Rational::new(-7, 2).abs(), Rational::new(7, 2));
    }
}
