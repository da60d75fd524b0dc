//! Continued fractions, convergents and resonant convergents.

use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::real::CertifiedReal;
use crate::error::{Error, Result};

/// Partial quotients `a_1, a_2, ...` of a number in `(0, 1)` (so `a_0 = 0`),
/// together with the depth up to which they are proven correct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialQuotients {
    quotients: Vec<u64>,
    certified_depth: usize,
}

impl PartialQuotients {
    pub fn new(quotients: Vec<u64>, certified_depth: usize) -> Result<Self> {
        if let Some(i) = quotients.iter().position(|&a| a == 0) {
            return Err(Error::InvalidInput(format!(
                "partial quotient a_{} is zero; all quotients must be positive",
                i + 1
            )));
        }
        if certified_depth > quotients.len() {
            return Err(Error::InvalidInput(format!(
                "certified depth {certified_depth} exceeds the {} quotients given",
                quotients.len()
            )));
        }
        Ok(Self {
            quotients,
            certified_depth,
        })
    }

    /// A quotient list taken at face value: every entry is certified.
    pub fn certified(quotients: Vec<u64>) -> Result<Self> {
        let n = quotients.len();
        Self::new(quotients, n)
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn certified_depth(&self) -> usize {
        self.certified_depth
    }

    /// `a_n` for `1 <= n <= len`.
    pub fn get(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.quotients.get(i).copied())
    }

    /// Certified prefix only.
    pub fn certified_quotients(&self) -> &[u64] {
        &self.quotients[..self.certified_depth]
    }

    /// `1 + max a_n` over the certified quotients.
    pub fn growth_bound(&self) -> u64 {
        1 + self.certified_quotients().iter().copied().max().unwrap_or(0)
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n > self.certified_depth {
            return Err(Error::InsufficientDepth {
                required: n,
                available: self.certified_depth,
            });
        }
        Ok(())
    }
}

/// One step of the Euclidean algorithm on `num/den` in `(0, 1)`.
struct Euclid {
    num: BigInt,
    den: BigInt,
}

impl Euclid {
    fn new(x: &BigRational) -> Self {
        Self {
            num: x.numer().clone(),
            den: x.denom().clone(),
        }
    }

    /// Next partial quotient and whether it is the terminating one.
    fn next_quotient(&mut self) -> Option<(BigInt, bool)> {
        if self.num.is_zero() {
            return None;
        }
        let (a, r) = self.den.div_rem(&self.num);
        let last = r.is_zero();
        self.den = std::mem::replace(&mut self.num, r);
        Some((a, last))
    }
}

/// Certified continued-fraction expansion of the irrational enclosed by `x`.
///
/// Both endpoints are expanded exactly. A quotient is accepted only when
/// both endpoints agree on it and neither expansion terminates there, so
/// every accepted quotient belongs to every number strictly inside the
/// enclosure.
pub fn expand_continued_fraction(x: &CertifiedReal, depth_limit: usize) -> Result<PartialQuotients> {
    if depth_limit == 0 {
        return Err(Error::InvalidInput("depth limit must be at least 1".into()));
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    if x.lo() <= &zero || x.hi() >= &one {
        return Err(Error::InvalidInput(
            "continued-fraction expansion needs 0 < lo < hi < 1".into(),
        ));
    }
    let mut lo = Euclid::new(x.lo());
    let mut hi = Euclid::new(x.hi());
    let mut quotients = Vec::new();
    while quotients.len() < depth_limit {
        let (Some((a, a_last)), Some((b, b_last))) = (lo.next_quotient(), hi.next_quotient()) else {
            break;
        };
        if a != b || a_last || b_last {
            break;
        }
        let a = a.to_u64().ok_or_else(|| {
            Error::InvalidInput(format!(
                "partial quotient a_{} = {a} exceeds 64 bits",
                quotients.len() + 1
            ))
        })?;
        quotients.push(a);
    }
    if quotients.is_empty() {
        return Err(Error::EnclosureTooWide { index: 1 });
    }
    PartialQuotients::certified(quotients)
}

/// Enclosure of `2 * sum_{k >= 1} 2^(-2^k)` from the first `truncation`
/// terms plus the geometric tail bound `4 * 2^(-2^(K+1))`.
pub fn shallit_number(truncation: u32) -> Result<CertifiedReal> {
    if truncation == 0 {
        return Err(Error::InvalidInput("Shallit truncation order must be >= 1".into()));
    }
    if truncation > 24 {
        return Err(Error::InvalidInput(format!(
            "Shallit truncation order {truncation} is too large (max 24)"
        )));
    }
    let top = 1usize << truncation;
    let mut numer = BigInt::zero();
    for k in 1..=truncation {
        numer += BigInt::from(2) << (top - (1usize << k));
    }
    let lo = BigRational::new(numer, BigInt::one() << top);
    let tail = BigRational::new(BigInt::from(4), BigInt::one() << (2 * top));
    let hi = &lo + tail;
    CertifiedReal::new(lo, hi)
}

/// Principal convergent `p_n / q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub n: i64,
    #[serde(serialize_with = "serialize_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub q: BigInt,
}

/// Convergents for `n = -1 ..= last`, starting from `(p_-1, q_-1) = (1, 0)`
/// and `(p_0, q_0) = (0, 1)`.
pub fn convergents(pq: &PartialQuotients, last: usize) -> Result<Vec<Convergent>> {
    pq.check_depth(last)?;
    let mut out = Vec::with_capacity(last + 2);
    out.push(Convergent {
        n: -1,
        p: BigInt::one(),
        q: BigInt::zero(),
    });
    out.push(Convergent {
        n: 0,
        p: BigInt::zero(),
        q: BigInt::one(),
    });
    for n in 1..=last {
        let a = BigInt::from(pq.quotients[n - 1]);
        let (prev, prev2) = (&out[n], &out[n - 1]);
        let p = &a * &prev.p + &prev2.p;
        let q = &a * &prev.q + &prev2.q;
        out.push(Convergent { n: n as i64, p, q });
    }
    Ok(out)
}

/// Integer vector `v(n) = (-p_n, q_n)` approximating the resonance line
/// orthogonal to `(1, omega)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResonantVector {
    pub n: i64,
    #[serde(serialize_with = "serialize_pair")]
    pub k: [BigInt; 2],
}

impl ResonantVector {
    /// The vector as machine integers, when it fits.
    pub fn to_i128(&self) -> Option<[i128; 2]> {
        Some([self.k[0].to_i128()?, self.k[1].to_i128()?])
    }
}

/// Resonant convergents for `n = -1 ..= last`.
pub fn resonant_convergents(pq: &PartialQuotients, last: usize) -> Result<Vec<ResonantVector>> {
    Ok(convergents(pq, last)?
        .into_iter()
        .map(|c| ResonantVector { n: c.n, k: [-c.p, c.q] })
        .collect())
}

/// 2x2 integer matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// `A_m = [[a_m, 1], [1, 0]]`.
    pub fn quotient(a: u64) -> Self {
        Self::new(a, 1, 1, 0)
    }

    /// `A_m^{-1} = [[0, 1], [1, -a_m]]`.
    pub fn quotient_inverse(a: u64) -> Self {
        Self::new(0, 1, 1, -BigInt::from(a))
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        [&self.a * &v[0] + &self.b * &v[1], &self.c * &v[0] + &self.d * &v[1]]
    }

    pub fn scaled(&self, s: &BigInt) -> Self {
        Self {
            a: &self.a * s,
            b: &self.b * s,
            c: &self.c * s,
            d: &self.d * s,
        }
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

/// `(A_1 ... A_n, A_1^{-1} ... A_n^{-1})` as exact integer matrices.
pub fn unimodular_products(pq: &PartialQuotients, n: usize) -> Result<(Mat2, Mat2)> {
    if n == 0 {
        return Err(Error::InvalidInput("unimodular products need n >= 1".into()));
    }
    pq.check_depth(n)?;
    let mut forward = Mat2::identity();
    let mut inverse = Mat2::identity();
    for &a in &pq.quotients[..n] {
        forward = &forward * &Mat2::quotient(a);
        inverse = &inverse * &Mat2::quotient_inverse(a);
    }
    Ok((forward, inverse))
}

/// `(-1)^n` as a big integer.
pub fn alternating_sign(n: usize) -> BigInt {
    if n % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Exact enclosure of the irrational whose expansion starts with `quotients`:
/// the cylinder between `[a_1..a_N]` and `[a_1..a_N, 1]`.
pub fn cylinder(quotients: &[u64]) -> Result<CertifiedReal> {
    if quotients.is_empty() {
        return Err(Error::InvalidInput("cylinder of an empty quotient list".into()));
    }
    let pq = PartialQuotients::certified(quotients.to_vec())?;
    let c = convergents(&pq, quotients.len())?;
    let last = &c[c.len() - 1];
    let prev = &c[c.len() - 2];
    let a = BigRational::new(last.p.clone(), last.q.clone());
    let b = BigRational::new(&last.p + &prev.p, &last.q + &prev.q);
    if a < b {
        CertifiedReal::new(a, b)
    } else {
        CertifiedReal::new(b, a)
    }
}

fn serialize_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn serialize_pair<S: serde::Serializer>(x: &[BigInt; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&x[0].to_string())?;
    t.serialize_element(&x[1].to_string())?;
    t.end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    const SHALLIT_PREFIX: [u64; 15] = [1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 1, 2, 1, 1, 1];

    #[test]
    fn shallit_low_orders() {
        let x = shallit_number(1).unwrap();
        assert_eq!(x.lo(), &r(1, 2));
        let x = shallit_number(2).unwrap();
        assert_eq!(x.lo(), &r(5, 8));
        assert!(x.width() <= r(1, 64));
        assert!(shallit_number(0).is_err());
    }

    #[test]
    fn shallit_encloses_reported_value() {
        let x = shallit_number(8).unwrap();
        let v: BigRational = crate::number_theory::parse_rational("0.632843018043786").unwrap();
        assert!((x.lo() - &v).abs() < r(1, 1_000_000_000_000_000));
        assert!((x.to_f64() - 0.632843018043786).abs() < 1e-15);
    }

    #[test]
    fn shallit_prefix_at_order_six() {
        let pq = expand_continued_fraction(&shallit_number(6).unwrap(), 15).unwrap();
        assert_eq!(pq.quotients(), &SHALLIT_PREFIX);
        assert_eq!(pq.certified_depth(), 15);
    }

    #[test]
    fn pinned_rational_stops_before_terminal_quotient() {
        let delta = BigRational::new(BigInt::one(), BigInt::one() << 40usize);
        let x = CertifiedReal::new(r(5, 8) - &delta, r(5, 8) + &delta).unwrap();
        let pq = expand_continued_fraction(&x, 50).unwrap();
        assert_eq!(pq.quotients(), &[1, 1, 1]);
    }

    #[test]
    fn wide_enclosure_is_a_precision_error() {
        let x = CertifiedReal::new(r(1, 3), r(2, 3)).unwrap();
        assert_eq!(
            expand_continued_fraction(&x, 5),
            Err(Error::EnclosureTooWide { index: 1 })
        );
        let x = CertifiedReal::new(r(1, 2), r(3, 2)).unwrap();
        assert!(matches!(expand_continued_fraction(&x, 5), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn convergent_basics() {
        let pq = PartialQuotients::certified(SHALLIT_PREFIX.to_vec()).unwrap();
        let c = convergents(&pq, 4).unwrap();
        assert_eq!((c[1].p.clone(), c[1].q.clone()), (BigInt::zero(), BigInt::one()));
        assert_eq!((c[5].p.clone(), c[5].q.clone()), (BigInt::from(5), BigInt::from(8)));
        assert!(matches!(
            convergents(&pq, 16),
            Err(Error::InsufficientDepth {
                required: 16,
                available: 15
            })
        ));
    }

    #[test]
    fn golden_denominators_are_fibonacci() {
        let pq = PartialQuotients::certified(vec![1; 12]).unwrap();
        let q: Vec<i64> = convergents(&pq, 12)
            .unwrap()
            .iter()
            .skip(1)
            .map(|c| c.q.to_i64().unwrap())
            .collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233]);
    }

    #[test]
    fn resonant_vectors() {
        let pq = PartialQuotients::certified(SHALLIT_PREFIX.to_vec()).unwrap();
        let v = resonant_convergents(&pq, 4).unwrap();
        assert_eq!(v[1].k, [BigInt::zero(), BigInt::one()]);
        assert_eq!(v[5].k, [BigInt::from(-5), BigInt::from(8)]);
        // v(2) = a_2 v(1) + v(0)
        let a2 = BigInt::from(pq.get(2).unwrap());
        assert_eq!(v[3].k[0], &a2 * &v[2].k[0] + &v[1].k[0]);
        assert_eq!(v[3].k[1], &a2 * &v[2].k[1] + &v[1].k[1]);
    }

    #[test]
    fn first_unimodular_product() {
        let pq = PartialQuotients::certified(vec![1, 2]).unwrap();
        let (p, q) = unimodular_products(&pq, 1).unwrap();
        assert_eq!(p, Mat2::new(1, 1, 1, 0));
        assert_eq!(q, Mat2::new(0, 1, 1, -1));
        assert!(unimodular_products(&pq, 0).is_err());
        assert!(unimodular_products(&pq, 3).is_err());
    }

    #[test]
    fn products_match_convergent_columns() {
        let pq = PartialQuotients::certified(SHALLIT_PREFIX.to_vec()).unwrap();
        let c = convergents(&pq, 15).unwrap();
        for n in 1..=15usize {
            let (p, q) = unimodular_products(&pq, n).unwrap();
            let (cn, cm) = (&c[n + 1], &c[n]);
            assert_eq!(p, Mat2::new(cn.q.clone(), cm.q.clone(), cn.p.clone(), cm.p.clone()));
            let s = alternating_sign(n);
            let expected = Mat2::new(cm.p.clone(), -cn.p.clone(), -cm.q.clone(), cn.q.clone()).scaled(&s);
            assert_eq!(q, expected);
            assert_eq!(p.det(), s);
            assert_eq!(q.det(), s);
        }
    }

    #[test]
    fn cylinder_brackets_the_prefix() {
        let x = cylinder(&[1, 1, 1]).unwrap();
        // [1,1,1] = 2/3 and [1,1,1,1] = 3/5
        assert_eq!(x.lo(), &r(3, 5));
        assert_eq!(x.hi(), &r(2, 3));
        let pq = expand_continued_fraction(&cylinder(&[2, 1, 3, 1, 4]).unwrap(), 10).unwrap();
        assert_eq!(pq.quotients(), &[2, 1, 3, 1]);
    }

    #[test]
    fn zero_quotient_rejected() {
        assert!(PartialQuotients::certified(vec![1, 0, 2]).is_err());
        assert!(PartialQuotients::new(vec![1, 2], 3).is_err());
    }
}
