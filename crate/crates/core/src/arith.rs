//! Exact rational arithmetic and the circle seminorm `‖x‖ = min_k |x - k|`.
//!
//! Everything here is exact. The seminorm kernels are generic over the
//! integer type so that exhaustive sweeps can run on `Ratio<i64>` while the
//! public API works on arbitrary-precision [`Rational`]s through the same code.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default precision (in bits) for dyadic enclosures.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Arbitrary-precision reduced fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::ParseRational("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `p/q` from machine integers; panics on `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn half() -> Self {
        Rational::ratio(1, 2)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Canonical circle representative `x mod 1 ∈ [0, 1)`.
    pub fn frac(&self) -> Rational {
        Rational(&self.0 - self.0.floor())
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Rational {
        Rational(self.0.recip())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn scale(&self, v: &BigUint) -> Rational {
        Rational(&self.0 * BigRational::from_integer(BigInt::from(v.clone())))
    }

    /// Lossy conversion for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.0).unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p/q"` or a bare integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Rational::new(p, q).map_err(|_| bad())
            }
            None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// A value of the seminorm; always in `[0, 1/2]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeminormValue(Rational);

impl SeminormValue {
    pub(crate) fn new_unchecked(value: Rational) -> Self {
        debug_assert!(!value.0.is_negative() && value <= Rational::half());
        SeminormValue(value)
    }

    /// `num/den` for a residue `num` already folded into `[0, den/2]`.
    pub(crate) fn from_residue(num: u64, den: u64) -> Self {
        SeminormValue::new_unchecked(Rational::new(num, den).expect("nonzero modulus"))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for SeminormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for SeminormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "‖·‖={}", self.0)
    }
}

/// Seminorm kernel shared by every integer width: `min(frac, 1 - frac)`.
pub fn seminorm_ratio<T>(x: &Ratio<T>) -> Ratio<T>
where
    T: Clone + Integer,
{
    // A reduced p/q has fractional part (p mod q)/q, again reduced.
    let den = x.denom().clone();
    let r = x.numer().mod_floor(&den);
    let rest = den.clone() - r.clone();
    if r <= rest {
        Ratio::new_raw(r, den)
    } else {
        Ratio::new_raw(rest, den)
    }
}

/// `(‖v z‖, ‖v ‖z‖‖)` over any integer width.
pub fn scaled_seminorm_ratio<T>(v: &T, z: &Ratio<T>) -> (Ratio<T>, Ratio<T>)
where
    T: Clone + Integer,
{
    let direct = seminorm_ratio(&(z.clone() * v.clone()));
    let folded = seminorm_ratio(&(seminorm_ratio(z) * v.clone()));
    (direct, folded)
}

pub fn seminorm(x: &Rational) -> SeminormValue {
    SeminormValue::new_unchecked(Rational(seminorm_ratio(&x.0)))
}

/// Returns `(‖v z‖, ‖v ‖z‖‖)`. The two components always agree, and both equal
/// `v ‖z‖` when that product is at most 1/2.
pub fn scaled_seminorm(v: &BigUint, z: &Rational) -> (SeminormValue, SeminormValue) {
    let v = BigInt::from_biguint(Sign::Plus, v.clone());
    let (direct, folded) = scaled_seminorm_ratio(&v, &z.0);
    (
        SeminormValue::new_unchecked(Rational(direct)),
        SeminormValue::new_unchecked(Rational(folded)),
    )
}

/// `‖a/m‖` for a residue `a mod m`, as an exact fraction over `m`.
pub fn residue_seminorm(residue: u64, modulus: u64) -> SeminormValue {
    let r = residue % modulus;
    SeminormValue::from_residue(r.min(modulus - r), modulus)
}

fn is_dyadic(r: &Rational) -> bool {
    let d = r.denom();
    d.is_one() || (d.trailing_zeros() == Some(d.bits() - 1))
}

/// Closed interval with dyadic-rational endpoints, used to enclose non-rational
/// points at a chosen precision.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DyadicInterval {
    low: Rational,
    high: Rational,
}

impl DyadicInterval {
    pub fn new(low: Rational, high: Rational) -> Result<Self> {
        if !is_dyadic(&low) || !is_dyadic(&high) {
            return Err(Error::Hypothesis(format!("endpoints {low}, {high} are not dyadic")));
        }
        if low > high {
            return Err(Error::Hypothesis(format!("low {low} exceeds high {high}")));
        }
        Ok(DyadicInterval { low, high })
    }

    /// Outward-rounded enclosure of `[low, high]` on the grid `2^-bits`.
    pub fn enclose(low: &Rational, high: &Rational, bits: u32) -> Result<Self> {
        if low > high {
            return Err(Error::Hypothesis(format!("low {low} exceeds high {high}")));
        }
        let scale = BigInt::one() << bits;
        let grid = Rational::from_integer(scale.clone());
        let lo = (low * &grid).floor();
        let hi = (high * &grid).ceil();
        Ok(DyadicInterval {
            low: Rational::new(lo, scale.clone())?,
            high: Rational::new(hi, scale)?,
        })
    }

    pub fn point(x: &Rational, bits: u32) -> Result<Self> {
        Self::enclose(x, x, bits)
    }

    pub fn low(&self) -> &Rational {
        &self.low
    }

    pub fn high(&self) -> &Rational {
        &self.high
    }

    pub fn width(&self) -> Rational {
        &self.high - &self.low
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.low <= x && x <= &self.high
    }

    /// Exact image under multiplication by a positive integer.
    pub fn scale(&self, v: &BigUint) -> DyadicInterval {
        DyadicInterval { low: self.low.scale(v), high: self.high.scale(v) }
    }
}

/// Encloses `{‖y‖ : y ∈ x}`. The seminorm is a 1-Lipschitz tent, so the output
/// is never wider than the input.
pub fn seminorm_enclosure(x: &DyadicInterval) -> Result<DyadicInterval> {
    let width = x.width();
    if width >= Rational::half() {
        return Err(Error::ImpreciseInput { width: width.to_string() });
    }
    // Translate so that low ∈ [0, 1); then high < 3/2 and the tent has at most
    // one peak (1/2) and one valley (1) inside the interval.
    let shift = Rational::from_integer(x.low.floor());
    let lo = &x.low - &shift;
    let hi = &x.high - &shift;
    let tent = |y: &Rational| -> Rational {
        let one = Rational::one();
        if y <= &Rational::half() {
            y.clone()
        } else if y <= &one {
            &one - y
        } else {
            y - &one
        }
    };
    let (f_lo, f_hi) = (tent(&lo), tent(&hi));
    let (mut min, mut max) = match f_lo.cmp(&f_hi) {
        Ordering::Greater => (f_hi, f_lo),
        _ => (f_lo, f_hi),
    };
    let half = Rational::half();
    if lo <= half && half <= hi {
        max = half;
    }
    let one = Rational::one();
    if lo <= one && one <= hi {
        min = Rational::zero();
    }
    DyadicInterval::new(min, max)
}
