//! Small divisors and the Diophantine numerators `gamma_k` and `nu_q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::real::{round_unambiguous, CertifiedReal, Enclosure};
use crate::error::{Error, Result};

/// Enclosure of the small divisor `k1 + k2 * omega`, certified sign-definite.
pub fn divisor_enclosure(k: [i128; 2], omega: &CertifiedReal) -> Result<Enclosure> {
    let k1 = BigRational::from_integer(BigInt::from(k[0]));
    let k2 = BigRational::from_integer(BigInt::from(k[1]));
    let a = &k1 + &k2 * omega.lo();
    let b = &k1 + &k2 * omega.hi();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo.is_zero() || hi.is_zero() || (lo.is_negative() != hi.is_negative()) {
        return Err(Error::UnresolvedDivisor {
            k1: k[0].to_string(),
            k2: k[1].to_string(),
        });
    }
    Ok(Enclosure { lo, hi })
}

/// `gamma_k = |<k, (1, omega)>| * |k|_1` for `k != 0`.
pub fn gamma_numerator(k: [i128; 2], omega: &CertifiedReal) -> Result<Enclosure> {
    if k == [0, 0] {
        return Err(Error::InvalidInput("gamma_k is undefined for k = 0".into()));
    }
    let d = divisor_enclosure(k, omega)?;
    let norm = BigRational::from_integer(BigInt::from(k[0]).abs() + BigInt::from(k[1]).abs());
    let (lo, hi) = if d.lo.is_negative() {
        (-d.hi, -d.lo)
    } else {
        (d.lo, d.hi)
    };
    Ok(Enclosure {
        lo: lo * &norm,
        hi: hi * &norm,
    })
}

/// `nu_q = q * ||q omega||` together with `p = rint(q omega)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuValue {
    pub q: BigInt,
    pub p: BigInt,
    pub value: Enclosure,
}

pub fn nu_numerator(q: &BigInt, omega: &CertifiedReal) -> Result<NuValue> {
    if !q.is_positive() {
        return Err(Error::InvalidInput(format!("nu_q needs q >= 1, got {q}")));
    }
    let qr = BigRational::from_integer(q.clone());
    let x_lo = &qr * omega.lo();
    let x_hi = &qr * omega.hi();
    let ambiguous = || Error::AmbiguousNearestInteger { q: q.to_string() };
    let p = round_unambiguous(&x_lo).ok_or_else(ambiguous)?;
    if round_unambiguous(&x_hi).as_ref() != Some(&p) {
        return Err(ambiguous());
    }
    // Both endpoints round to p, so no half-integer lies inside (q lo, q hi).
    let pr = BigRational::from_integer(p.clone());
    let a = x_lo - &pr;
    let b = x_hi - &pr;
    if a.is_zero() || b.is_zero() || (a.is_negative() != b.is_negative()) {
        return Err(Error::UnresolvedDivisor {
            k1: (-&p).to_string(),
            k2: q.to_string(),
        });
    }
    let (lo, hi) = if a.is_negative() { (-b, -a) } else { (a, b) };
    Ok(NuValue {
        q: q.clone(),
        p,
        value: Enclosure {
            lo: lo * &qr,
            hi: hi * &qr,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::{convergents, expand_continued_fraction, shallit_number};
    use num_traits::ToPrimitive;

    fn shallit() -> CertifiedReal {
        shallit_number(8).unwrap()
    }

    #[test]
    fn gamma_simple_vectors() {
        let om = shallit();
        let w = om.to_f64();
        let g = gamma_numerator([0, 1], &om).unwrap();
        assert!((g.to_f64() - w).abs() < 1e-15);
        let g = gamma_numerator([-1, 1], &om).unwrap();
        assert!((g.to_f64() - 2.0 * (1.0 - w)).abs() < 1e-15);
        assert!(gamma_numerator([0, 0], &om).is_err());
    }

    #[test]
    fn gamma_of_fourth_resonant_convergent() {
        // |8 omega - 5| * 13
        let g = gamma_numerator([-5, 8], &shallit()).unwrap().to_f64();
        let w = 0.632843018043786_f64;
        assert!((g - (8.0 * w - 5.0).abs() * 13.0).abs() < 1e-12);
        assert!((g - 0.8157).abs() < 5e-5);
    }

    #[test]
    fn nu_first_values() {
        let om = shallit();
        let w = om.to_f64();
        let nu = nu_numerator(&BigInt::from(1), &om).unwrap();
        assert!((nu.value.to_f64() - w.min(1.0 - w)).abs() < 1e-15);
        assert_eq!(nu.p, BigInt::from(1));
        let nu8 = nu_numerator(&BigInt::from(8), &om).unwrap();
        assert_eq!(nu8.p, BigInt::from(5));
        assert!((nu8.value.to_f64() - 0.502).abs() < 1e-3);
        assert!(nu_numerator(&BigInt::from(0), &om).is_err());
    }

    #[test]
    fn gamma_of_resonant_convergent_matches_nu() {
        let om = shallit();
        let pq = expand_continued_fraction(&om, 40).unwrap();
        for c in convergents(&pq, 40).unwrap().iter().skip(2) {
            let k = [-c.p.to_i128().unwrap(), c.q.to_i128().unwrap()];
            let g = gamma_numerator(k, &om).unwrap().to_f64();
            let nu = nu_numerator(&c.q, &om).unwrap();
            assert_eq!(nu.p, c.p);
            let ratio = (c.p.to_f64().unwrap() + c.q.to_f64().unwrap()) / c.q.to_f64().unwrap();
            assert!((g - nu.value.to_f64() * ratio).abs() <= 1e-13 * g);
        }
    }

    #[test]
    fn ambiguous_rounding_is_reported() {
        let om = CertifiedReal::new(
            BigRational::new(1.into(), 4.into()),
            BigRational::new(3.into(), 4.into()),
        )
        .unwrap();
        assert!(matches!(
            nu_numerator(&BigInt::from(1), &om),
            Err(Error::AmbiguousNearestInteger { .. })
        ));
    }
}
