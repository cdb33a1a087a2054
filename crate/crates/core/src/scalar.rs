//! Number-field abstraction shared by all computational modules.
//!
//! Two scalar types implement [`Scalar`]:
//!
//! - [`Rational`] (arbitrary-precision rationals) — the default. Every
//!   comparison, pivot and identity check is exact; this is the mode the
//!   verification suites require.
//! - `f64` — floating point for large instances. A process-global tolerance
//!   (default `1e-9`, see [`set_float_tolerance`]) defines when a value is
//!   treated as zero.
//!
//! Model and policy files always carry numbers as strings parsed exactly by
//! [`parse_rational`] ("2/3", "0.5", "-7"); floating-point runs convert those
//! rationals on entry. Conversions back out of a floating run go through
//! [`Scalar::to_rational`], which is exact because every finite `f64` is a
//! dyadic rational.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational number.
pub type Rational = num::rational::BigRational;

/// Default tolerance used by floating-point runs: `|x| <= 1e-9` is zero.
pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

static FLOAT_TOLERANCE_BITS: AtomicU64 = AtomicU64::new(DEFAULT_FLOAT_TOLERANCE.to_bits());

/// Sets the process-global zero tolerance for `f64` scalars.
///
/// Intended to be called once at startup (the CLI does this from `--eps`);
/// the pipelines themselves never change it mid-run.
pub fn set_float_tolerance(eps: f64) {
    assert!(eps.is_finite() && eps >= 0.0, "tolerance must be finite and nonnegative");
    FLOAT_TOLERANCE_BITS.store(eps.to_bits(), AtomicOrdering::Relaxed);
}

/// Current zero tolerance for `f64` scalars.
pub fn float_tolerance() -> f64 {
    f64::from_bits(FLOAT_TOLERANCE_BITS.load(AtomicOrdering::Relaxed))
}

/// The number field the pipelines are generic over.
///
/// Implementations must form an ordered field without NaNs in practice: the
/// algorithms only divide by values that passed `!is_zero_tol()`, so
/// [`Scalar::cmp_total`] may panic on NaN without loss.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    /// Name used in reports ("exact" / "float").
    const MODE_NAME: &'static str;

    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self;

    /// Exact rational value of this scalar. For `f64` this is the dyadic
    /// rational the float denotes exactly; `None` for non-finite floats.
    fn to_rational(&self) -> Option<Rational>;

    fn to_f64(&self) -> f64;

    /// Zero test honoring the active tolerance in floating mode.
    fn is_zero_tol(&self) -> bool;

    /// `self > 0` beyond tolerance.
    fn is_positive_tol(&self) -> bool {
        !self.is_zero_tol() && *self > Self::zero()
    }

    /// `self < 0` beyond tolerance.
    fn is_negative_tol(&self) -> bool {
        !self.is_zero_tol() && *self < Self::zero()
    }

    fn abs(&self) -> Self;

    /// Total order; panics on incomparable values (NaN), which the pipelines
    /// never produce.
    fn cmp_total(&self, other: &Self) -> Ordering;

    /// Text form for reports: exact fraction in exact mode ("2/3"), shortest
    /// round-trip decimal in floating mode.
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE_NAME: &'static str = "exact";

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero_tol(&self) -> bool {
        self.is_zero()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        Ord::cmp(self, other)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE_NAME: &'static str = "float";

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero_tol(&self) -> bool {
        f64::abs(*self) <= float_tolerance()
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other)
            .expect("NaN reached a comparison; pipelines must guard divisions")
    }
}

/// Shorthand for an exact rational from a numerator/denominator pair.
///
/// Panics on a zero denominator; intended for literals in code and tests.
pub fn rat(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses an exact rational from its file representation.
///
/// Accepted forms: integers ("-7"), fractions ("2/3", "-1/3"), and finite
/// decimals ("0.5", "-12.25") which are read exactly (no binary rounding).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::InvalidInput("empty number".into()));
    }
    let bad = |s: &str| Error::InvalidInput(format!("malformed rational number {s:?}"));
    if let Some((numer, denom)) = s.split_once('/') {
        let n = BigInt::from_str(numer.trim()).map_err(|_| bad(s))?;
        let d = BigInt::from_str(denom.trim()).map_err(|_| bad(s))?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part == "-" || int_part.is_empty() { "0" } else { int_part };
        let whole = BigInt::from_str(int_digits).map_err(|_| bad(s))?;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(s));
        }
        let frac = BigInt::from_str(frac_part).map_err(|_| bad(s))?;
        let scale = num::pow::pow(BigInt::from(10), frac_part.len());
        let frac = Rational::new(frac, scale);
        let whole = Rational::from_integer(whole);
        return Ok(if negative { whole - frac } else { whole + frac });
    }
    let n = BigInt::from_str(s).map_err(|_| bad(s))?;
    Ok(Rational::from_integer(n))
}

/// Canonical file representation: "n" for integers, "n/d" otherwise.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Serde adapter keeping [`Rational`] fields in the exact-string file syntax
/// ("2/3"): `#[serde(with = "serde_rational")]`.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses a bracketed vector of rationals: `[1, 4/5, -0.5]`.
pub fn parse_rational_vector(text: &str) -> Result<Vec<Rational>> {
    let s = text.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidInput(format!("expected a bracketed vector, got {s:?}")))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(parse_rational).collect()
}

/// Dot product.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational(" -1/3 ").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("4/-6").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7, 1));
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-12.25").unwrap(), rat(-49, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("10").unwrap(), rat(10, 1));
    }

    #[test]
    fn rejects_malformed_numbers() {
        for bad in ["", "1/0", "a", "1.2.3", "1/ ", "0x2", "1.5e3", ".", "2."] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format_rational(&rat(4, 6)), "2/3");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(0, 5)), "0");
        assert_eq!(format_rational(&rat(-1, 2)), "-1/2");
    }

    #[test]
    fn parse_format_roundtrip() {
        for s in ["2/3", "-7", "0", "14/15", "-49/4"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(format_rational(&q), s);
        }
    }

    #[test]
    fn parses_vectors() {
        assert_eq!(
            parse_rational_vector("[1, 4/5]").unwrap(),
            vec![rat(1, 1), rat(4, 5)]
        );
        assert_eq!(parse_rational_vector("[]").unwrap(), Vec::<Rational>::new());
        assert!(parse_rational_vector("1, 2").is_err());
    }

    #[test]
    fn float_tolerance_controls_zero_test() {
        assert!(Scalar::is_zero_tol(&1e-12));
        assert!(!Scalar::is_zero_tol(&1e-6));
        assert!(!Scalar::is_zero_tol(&-1e-6));
        assert!(Scalar::is_zero_tol(&-1e-12));
    }

    #[test]
    fn f64_to_rational_is_exact_dyadic() {
        let q = Scalar::to_rational(&0.375f64).unwrap();
        assert_eq!(q, rat(3, 8));
        assert!(Scalar::to_rational(&f64::INFINITY).is_none());
    }

    #[test]
    fn rational_scalar_is_exact() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!(a.clone() - b.clone() - b.clone(), Rational::zero());
        assert!(Scalar::is_zero_tol(&(a - rat(2, 6) - Rational::zero())));
    }
}
