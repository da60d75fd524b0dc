//! Sweep of `nu_q = q ||q omega||` over all denominators up to `Q`.

use num_traits::ToPrimitive;
use serde::Serialize;

use ctsplit_core::number_theory::CertifiedReal;

use crate::error::{OracleError, OracleResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuHit {
    pub q: u64,
    pub p: u64,
    pub nu: f64,
    pub is_convergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuScan {
    pub q_max: u64,
    /// Every `q` with `nu_q < 1/2`.
    pub hits: Vec<NuHit>,
    pub all_hits_convergent: bool,
    /// Convergent denominators up to `q_max`.
    pub convergent_denominators: Vec<u64>,
    /// `nu_1 = ||omega||`.
    pub nu_one: f64,
    /// `[ceil(sqrt(Q)), Q]`.
    pub window: (u64, u64),
    pub window_min: f64,
    pub window_argmin: u64,
    pub window_max: f64,
}

/// `omega` in fixed point with `frac` fractional bits, rounded down and up.
fn fixed(omega: &CertifiedReal, frac: u32) -> OracleResult<(u128, u128)> {
    let scale = num_bigint::BigInt::from(1u8) << frac as usize;
    let lo = (omega.lo() * &scale).floor().to_integer().to_u128();
    let hi = (omega.hi() * &scale).ceil().to_integer().to_u128();
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(OracleError::InvalidInput("omega must lie in (0, 1)".into())),
    }
}

/// Quotients and denominators `(a_i, q_i)` of `x / 2^frac`, stopping after
/// the first `q_i > q_max`; the flag is set when the expansion terminated.
fn expansion(x: u128, frac: u32, q_max: u64) -> (Vec<(u128, u128)>, bool) {
    let (mut num, mut den) = (1u128 << frac, x);
    let (mut q0, mut q1) = (0u128, 1u128);
    let mut out = Vec::new();
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num - a * den);
        let q = a * q1 + q0;
        out.push((a, q));
        if q > q_max as u128 {
            break;
        }
        (q0, q1) = (q1, q);
    }
    (out, den == 0)
}

/// Convergent denominators of `omega` up to `q_max`, certified by agreement
/// of both endpoint expansions.
fn certified_denominators(lo: u128, hi: u128, frac: u32, q_max: u64) -> OracleResult<Vec<u64>> {
    let (el, tl) = expansion(lo, frac, q_max);
    let (eh, th) = expansion(hi, frac, q_max);
    let mut agree = el.iter().zip(&eh).take_while(|(a, b)| a == b).count();
    // a terminal quotient of a rational endpoint says nothing about omega
    if (tl && agree == el.len()) || (th && agree == eh.len()) {
        agree = agree.saturating_sub(1);
    }
    if agree == 0 || el[agree - 1].1 <= q_max as u128 {
        return Err(OracleError::Precision(format!("convergent denominators up to {q_max}")));
    }
    Ok(std::iter::once(1)
        .chain(el[..agree].iter().map(|&(_, q)| q as u64))
        .filter(|&q| q <= q_max)
        .collect())
}

pub fn brute_force_nu_scan(omega: &CertifiedReal, q_max: u64) -> OracleResult<NuScan> {
    if q_max < 2 {
        return Err(OracleError::InvalidInput(format!("Q must be at least 2, got {q_max}")));
    }
    let qbits = 64 - q_max.leading_zeros();
    let frac = 126 - qbits;
    let (lo, hi) = fixed(omega, frac)?;
    let one = 1u128 << frac;
    let half = one >> 1;
    let certified = certified_denominators(lo, hi, frac, q_max)?;
    let mut hits = Vec::new();
    let wlo = (q_max as f64).sqrt().ceil() as u64;
    let (mut wmin, mut wargmin, mut wmax) = (f64::INFINITY, 0, 0.0f64);
    let mut nu_one = 0.0;
    for q in 1..=q_max {
        let (xl, xh) = (lo * q as u128, hi * q as u128);
        let pl = (xl + half) >> frac;
        let ph = (xh + half) >> frac;
        if pl != ph {
            return Err(OracleError::Precision(format!("rounding q omega at q = {q}")));
        }
        let base = pl << frac;
        let (dl, dh) = (xl.abs_diff(base), xh.abs_diff(base));
        if (xl < base) != (xh < base) {
            return Err(OracleError::Precision(format!("sign of q omega - p at q = {q}")));
        }
        let dist = ((dl + dh) / 2) as f64 / one as f64;
        let nu = q as f64 * dist;
        if q == 1 {
            nu_one = nu;
        }
        if q >= wlo {
            if nu < wmin {
                wmin = nu;
                wargmin = q;
            }
            wmax = wmax.max(nu);
        }
        if nu < 0.5 {
            hits.push(NuHit {
                q,
                p: pl as u64,
                nu,
                is_convergent: certified.contains(&q),
            });
        }
    }
    Ok(NuScan {
        q_max,
        all_hits_convergent: hits.iter().all(|h| h.is_convergent),
        hits,
        convergent_denominators: certified,
        nu_one,
        window: (wlo, q_max),
        window_min: wmin,
        window_argmin: wargmin,
        window_max: wmax,
    })
}
