//! Exact rational enclosures of real numbers.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An irrational number known only through an open rational interval
/// `(lo, hi)` with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedReal {
    lo: BigRational,
    hi: BigRational,
}

impl CertifiedReal {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInput(format!(
                "enclosure needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigInt::from(2)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Smallest enclosure with dyadic endpoints `m / 2^bits` that contains
    /// this one. Used for fast exact linear forms in the harmonic searches.
    pub fn dyadic_hull(&self, bits: u32) -> DyadicInterval {
        let scale = BigInt::one() << bits as usize;
        let lo = (&self.lo * &scale).floor().to_integer();
        let hi = (&self.hi * &scale).ceil().to_integer();
        DyadicInterval { lo, hi, bits }
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.17e}, {:.17e}]",
            rational_to_f64(&self.lo),
            rational_to_f64(&self.hi)
        )
    }
}

/// A closed rational interval `[lo, hi]`, possibly degenerate. Holds
/// derived quantities such as numerators `gamma_k` and `nu_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigInt::from(2)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Width relative to the midpoint magnitude, as a float.
    pub fn relative_width(&self) -> f64 {
        let mid = self.midpoint();
        if mid.is_zero() {
            return f64::INFINITY;
        }
        rational_to_f64(&(self.width() / mid.abs()))
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        match BigRational::from_float(x) {
            Some(r) => self.lo <= r && r <= self.hi,
            None => false,
        }
    }
}

/// Dyadic interval `[lo / 2^bits, hi / 2^bits]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

/// Relative width above which a linear form is rejected as unresolved.
const MAX_DIVISOR_RELATIVE_WIDTH: f64 = 1e-24;

impl DyadicInterval {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo_numerator(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_numerator(&self) -> &BigInt {
        &self.hi
    }

    /// Signed value of `k1 + k2 * x` for `x` in the interval, as an `f64`.
    ///
    /// Fails when the sign is not certified or when the interval is too
    /// wide for the result to be accurate to double precision.
    pub fn linear_form(&self, k1: i128, k2: i128) -> Result<f64> {
        let base = BigInt::from(k1) << self.bits as usize;
        let k2 = BigInt::from(k2);
        let a = &base + &k2 * &self.lo;
        let b = &base + &k2 * &self.hi;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo.sign() != hi.sign() || lo.is_zero() {
            return Err(Error::UnresolvedDivisor {
                k1: k1.to_string(),
                k2: k2.to_string(),
            });
        }
        let width = &hi - &lo;
        let mid: BigInt = (&lo + &hi) >> 1usize;
        let rel = ratio_f64(&width, &mid).abs();
        if rel.is_nan() || rel > MAX_DIVISOR_RELATIVE_WIDTH {
            return Err(Error::UnresolvedDivisor {
                k1: k1.to_string(),
                k2: k2.to_string(),
            });
        }
        Ok(ratio_f64(&mid, &(BigInt::one() << self.bits as usize)))
    }
}

/// Converts an exact rational to the nearest-ish `f64` (within one ulp).
pub fn rational_to_f64(x: &BigRational) -> f64 {
    ratio_f64(x.numer(), x.denom())
}

/// `num / den` as an `f64`, robust for operands far outside the `f64` range.
pub fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.abs();
    let d = den.abs();
    // Bring both operands to 64 significant bits, then divide in floating point.
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let nt = (&n >> ns as usize).to_f64().unwrap_or(f64::NAN);
    let dt = (&d >> ds as usize).to_f64().unwrap_or(f64::NAN);
    let exp = ns - ds;
    let mut v = nt / dt;
    // powi in two steps keeps intermediate scales finite.
    let half = (exp / 2) as i32;
    v *= 2f64.powi(half);
    v *= 2f64.powi(exp as i32 - half);
    if negative {
        -v
    } else {
        v
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.6328"` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse rational number {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() {
        return Err(bad());
    } else {
        digits
    };
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Nearest integer to `x`; `None` when `x` is exactly half-way.
pub(crate) fn round_unambiguous(x: &BigRational) -> Option<BigInt> {
    let two = BigInt::from(2);
    let doubled = x * BigRational::from_integer(two.clone());
    if doubled.is_integer() && doubled.to_integer().is_odd() {
        return None;
    }
    Some(x.round().to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(CertifiedReal::new(r(1, 2), r(1, 2)).is_err());
        assert!(CertifiedReal::new(r(2, 3), r(1, 2)).is_err());
    }

    #[test]
    fn width_is_positive() {
        let x = CertifiedReal::new(r(1, 3), r(1, 2)).unwrap();
        assert_eq!(x.width(), r(1, 6));
        assert!((x.to_f64() - 5.0 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn dyadic_hull_contains_original() {
        let x = CertifiedReal::new(r(1, 3), r(2, 5)).unwrap();
        let h = x.dyadic_hull(40);
        let scale = BigRational::from_integer(BigInt::one() << 40usize);
        assert!(BigRational::from_integer(h.lo.clone()) / &scale <= *x.lo());
        assert!(BigRational::from_integer(h.hi.clone()) / &scale >= *x.hi());
    }

    #[test]
    fn linear_form_needs_a_certified_sign() {
        let delta = BigRational::new(BigInt::one(), BigInt::one() << 100usize);
        let x = CertifiedReal::new(r(5, 8) - &delta, r(5, 8) + &delta).unwrap();
        let h = x.dyadic_hull(128);
        assert!(matches!(h.linear_form(-5, 8), Err(Error::UnresolvedDivisor { .. })));
        let v = h.linear_form(-1, 2).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ratio_handles_huge_operands() {
        let n = BigInt::one() << 5000usize;
        let d = (BigInt::one() << 5001usize) + BigInt::one();
        assert!((ratio_f64(&n, &d) - 0.5).abs() < 1e-15);
        assert_eq!(ratio_f64(&BigInt::from(-3), &BigInt::from(4)), -0.75);
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("5/8").unwrap(), r(5, 8));
        assert_eq!(parse_rational("0.625").unwrap(), r(5, 8));
        assert_eq!(parse_rational("-1.5e-1").unwrap(), r(-3, 20));
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn rounding_detects_ties() {
        assert_eq!(round_unambiguous(&r(7, 4)), Some(BigInt::from(2)));
        assert_eq!(round_unambiguous(&r(3, 2)), None);
    }
}
