//! Numeric flavors shared by the exact solver and the simulation side.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

/// Tolerance for "sums to one" on float lotteries.
pub const FLOAT_NORMALIZATION_TOL: f64 = 1e-12;

/// Field operations the generic algorithms need.
///
/// `BigRational` is exact: zero means zero. `f64` treats anything below a small
/// absolute threshold as zero when pivoting and checking signs.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_ratio(r: &Rational) -> Self;

    fn from_i64(v: i64) -> Self;

    fn from_counts(num: u64, den: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Pivot magnitude for elimination.
    fn magnitude(&self) -> f64;

    fn is_negligible(&self) -> bool;

    /// Whether a probability total counts as one.
    fn is_unit_total(&self) -> bool;
}

impl Scalar for Rational {
    fn from_ratio(r: &Rational) -> Self {
        r.clone()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_counts(num: u64, den: u64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn magnitude(&self) -> f64 {
        // Any nonzero pivot is exact; prefer small ones to keep numbers short.
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn is_unit_total(&self) -> bool {
        self.is_one()
    }
}

impl Scalar for f64 {
    fn from_ratio(r: &Rational) -> Self {
        ratio_to_f64(r)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_counts(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= 1e-13
    }

    fn is_unit_total(&self) -> bool {
        (self - 1.0).abs() <= FLOAT_NORMALIZATION_TOL
    }
}

/// Nearest-ish `f64` for a big rational, robust to huge numerators and denominators.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both sides down to ~60 significant bits before dividing.
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(60);
    let n = (r.numer().abs() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    let v = if d == 0.0 { f64::INFINITY } else { n / d };
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Parse `"3"`, `"-1/4"` or a finite decimal like `"0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Some(if negative { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// `num/den` text form.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
