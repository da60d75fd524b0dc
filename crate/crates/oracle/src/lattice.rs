//! Exhaustive minimum of `g_k(eps)` over a box of harmonics.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use ctsplit_core::number_theory::CertifiedReal;
use ctsplit_core::splitting::{ConstantsBundle, Harmonic};

use crate::error::{OracleError, OracleResult};

const FIXED_BITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteForceMin {
    pub eps: f64,
    pub argmin: Harmonic,
    pub min: f64,
    pub runner_up: Harmonic,
    pub runner_up_value: f64,
    pub scanned: usize,
}

struct Entry {
    k: Harmonic,
    norm: f64,
    ln_eps_k: f64,
    sqrt_gt: f64,
}

/// All `k` with `|k|_1 <= k_max` and `k2 > 0` or `k2 = 0, k1 > 0`, with
/// numerators from fixed-point integer arithmetic.
pub struct LatticeOracle {
    entries: Vec<Entry>,
}

impl LatticeOracle {
    pub fn new(constants: &ConstantsBundle, omega: &CertifiedReal, k_max: i128) -> OracleResult<Self> {
        if k_max < 1 {
            return Err(OracleError::InvalidInput(format!(
                "K_max must be at least 1, got {k_max}"
            )));
        }
        let scale = BigInt::from(1) << FIXED_BITS;
        let lo = (omega.lo() * &scale).floor().to_integer();
        let hi = (omega.hi() * &scale).ceil().to_integer();
        let slack = &hi - &lo;
        let mid: BigInt = (&lo + &hi) >> 1usize;
        let mut entries = Vec::new();
        for k2 in 0..=k_max {
            let span = k_max - k2;
            for k1 in -span..=span {
                if k2 == 0 && k1 <= 0 {
                    continue;
                }
                // (k1 + k2 omega) 2^FIXED_BITS
                let fixed = (BigInt::from(k1) << FIXED_BITS) + BigInt::from(k2) * &mid;
                if fixed.abs() <= BigInt::from(k2) * &slack * 2 {
                    return Err(OracleError::Precision(format!("the divisor of ({k1}, {k2})")));
                }
                let d = shift_to_f64(&fixed.abs(), FIXED_BITS);
                let norm = (k1.abs() + k2) as f64;
                let gt = d * norm / constants.gamma_star;
                entries.push(Entry {
                    k: [k1, k2],
                    norm,
                    ln_eps_k: constants.d0.ln() + 2.0 * gt.ln() - 4.0 * norm.ln(),
                    sqrt_gt: gt.sqrt(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Minimum and runner-up of `g_k(eps)`. Values within a relative
    /// `1e-12` count as tied and go to the smaller `|k|_1`.
    pub fn min_g(&self, eps: f64) -> BruteForceMin {
        let le = eps.ln();
        let g = |e: &Entry| {
            let r = ((le - e.ln_eps_k) / 4.0).exp();
            e.sqrt_gt / 2.0 * (r + 1.0 / r)
        };
        let values: Vec<f64> = self.entries.par_iter().map(g).collect();
        let h = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mut best: Option<usize> = None;
        for (i, &v) in values.iter().enumerate() {
            if v <= h * (1.0 + 1e-12) {
                let better = match best {
                    None => true,
                    Some(b) => (self.entries[i].norm, self.entries[i].k) < (self.entries[b].norm, self.entries[b].k),
                };
                if better {
                    best = Some(i);
                }
            }
        }
        let b = best.expect("nonempty lattice");
        let mut second: Option<usize> = None;
        for (i, &v) in values.iter().enumerate() {
            if i != b && second.is_none_or(|s| v < values[s]) {
                second = Some(i);
            }
        }
        let s = second.unwrap_or(b);
        BruteForceMin {
            eps,
            argmin: self.entries[b].k,
            min: values[b],
            runner_up: self.entries[s].k,
            runner_up_value: values[s],
            scanned: self.entries.len(),
        }
    }
}

/// `x / 2^bits` for a nonnegative integer.
fn shift_to_f64(x: &BigInt, bits: usize) -> f64 {
    let excess = (x.bits() as usize).saturating_sub(64);
    let head = (x >> excess).to_f64().unwrap_or(f64::NAN);
    head * 2f64.powi(excess as i32 - bits as i32)
}

pub fn brute_force_min_g(
    eps: f64,
    constants: &ConstantsBundle,
    omega: &CertifiedReal,
    k_max: i128,
) -> OracleResult<BruteForceMin> {
    Ok(LatticeOracle::new(constants, omega, k_max)?.min_g(eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctsplit_core::number_theory::{shallit_number, Window};

    fn bundle() -> ConstantsBundle {
        ConstantsBundle::from_parts(0.4887, 0.2993, 1.3761, 3, 1.0, Window { start: 31, end: 60 }).unwrap()
    }

    #[test]
    fn tiny_lattice() {
        let om = shallit_number(8).unwrap();
        let o = LatticeOracle::new(&bundle(), &om, 1).unwrap();
        // only (1, 0) and (0, 1)
        assert_eq!(o.len(), 2);
        let r = o.min_g(1.0);
        assert_eq!(r.argmin, [0, 1]);
    }

    #[test]
    fn counts_canonical_half() {
        let om = shallit_number(8).unwrap();
        let o = LatticeOracle::new(&bundle(), &om, 10).unwrap();
        // 2r harmonics of each norm r
        assert_eq!(o.len(), (1..=10).map(|r| 2 * r).sum::<usize>());
        assert!(brute_force_min_g(1.0, &bundle(), &om, 0).is_err());
    }

    #[test]
    fn fixed_point_conversion() {
        let x = BigInt::from(3) << 300usize;
        assert_eq!(shift_to_f64(&x, 301), 1.5);
    }
}
