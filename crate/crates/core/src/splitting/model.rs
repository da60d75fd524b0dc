use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::constants::{ConstantsBundle, HarmonicProfile};
use super::melnikov::ln_coefficient;
use super::params::ModelParams;
use super::{canonical, Harmonic};
use crate::error::{Error, Result};
use crate::number_theory::{resonant_convergents, Frequency};

/// A resonant convergent `v(n)` with its data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonantEntry {
    pub n: i64,
    /// `v(n) = (-p_n, q_n)` as produced by the recurrences.
    pub vector: Harmonic,
    /// `<v(n), (1, omega)>`, signed.
    pub divisor: f64,
    pub profile: HarmonicProfile,
}

/// A harmonic found by a lattice search, with `beta_k` at the search `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub profile: HarmonicProfile,
    pub beta: f64,
}

/// Upper limit on the rows of one lattice search.
const MAX_ROWS: f64 = 5e7;

/// Everything needed to evaluate the Melnikov landscape of one frequency.
#[derive(Debug, Clone)]
pub struct SplittingModel {
    freq: Frequency,
    constants: ConstantsBundle,
    params: ModelParams,
    entries: Vec<ResonantEntry>,
    index: HashMap<Harmonic, i64>,
}

impl SplittingModel {
    /// Tabulates `v(-1), ..., v(depth)`. Deep vectors that do not fit in
    /// machine integers, or whose divisors the enclosure cannot resolve,
    /// end the table early.
    pub fn new(freq: Frequency, depth: usize, constants: ConstantsBundle, params: ModelParams) -> Result<Self> {
        if constants.rho != params.rho {
            return Err(Error::InvalidInput(format!(
                "constants were computed for rho = {}, parameters have rho = {}",
                constants.rho, params.rho
            )));
        }
        let last = depth.min(freq.quotients().certified_depth());
        let mut entries = Vec::with_capacity(last + 2);
        for v in resonant_convergents(freq.quotients(), last)? {
            let Some(vector) = v.to_i128() else { break };
            let (Ok(divisor), Ok(k)) = (freq.divisor(vector), canonical(vector)) else {
                break;
            };
            let Ok(d) = freq.divisor(k) else { break };
            entries.push(ResonantEntry {
                n: v.n,
                vector,
                divisor,
                profile: HarmonicProfile::new(k, d, &constants),
            });
        }
        if entries.len() < 3 {
            return Err(Error::InsufficientDepth {
                required: 1,
                available: entries.len().saturating_sub(2),
            });
        }
        let index = entries.iter().map(|e| (e.profile.k, e.n)).collect();
        Ok(Self {
            freq,
            constants,
            params,
            entries,
            index,
        })
    }

    /// The same model at another width, with phases and exponent kept.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        let constants = self.constants.with_rho(rho)?;
        let params = ModelParams::new(rho, self.params.p_exponent, self.params.phases)?;
        Self::new(self.freq.clone(), self.depth(), constants, params)
    }

    pub fn frequency(&self) -> &Frequency {
        &self.freq
    }

    pub fn constants(&self) -> &ConstantsBundle {
        &self.constants
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Table of `v(n)` for `n = -1 ..= depth()`.
    pub fn entries(&self) -> &[ResonantEntry] {
        &self.entries
    }

    /// Deepest tabulated convergent index.
    pub fn depth(&self) -> usize {
        self.entries.last().map_or(0, |e| e.n.max(0) as usize)
    }

    pub fn entry(&self, n: i64) -> Option<&ResonantEntry> {
        usize::try_from(n + 1).ok().and_then(|i| self.entries.get(i))
    }

    /// `n` with `v(n) = ±k`, if `k` is a resonant convergent.
    pub fn convergent_index(&self, k: Harmonic) -> Option<i64> {
        canonical(k).ok().and_then(|k| self.index.get(&k).copied())
    }

    /// `eps_{v(n)}` for the deepest tabulated `n`: the smallest `eps` the
    /// dominant-harmonic search accepts.
    pub fn min_eps(&self) -> f64 {
        self.entries.last().map_or(f64::INFINITY, |e| e.profile.eps_k)
    }

    pub fn profile(&self, k: Harmonic) -> Result<HarmonicProfile> {
        let k = canonical(k)?;
        Ok(HarmonicProfile::new(k, self.freq.divisor(k)?, &self.constants))
    }

    /// `ln L_k` at `eps`.
    pub fn ln_coefficient(&self, p: &HarmonicProfile, eps: f64) -> f64 {
        ln_coefficient(p.norm, p.divisor, self.params.rho, eps)
    }

    /// All canonical `k` with `beta_k(eps) <= bound`, in no particular order.
    ///
    /// Harmonics are written in the unimodular basis `v(n), v(n+1)`; both
    /// coordinates are bounded through `|k|_1 <= bound / rho` and
    /// `|<k, omega>| <= 2 sqrt(eps) bound / pi`, and `n` is chosen to make
    /// the coordinate box smallest.
    pub fn ball(&self, eps: f64, bound: f64) -> Result<Vec<Candidate>> {
        let rho = self.params.rho;
        let radius = bound / rho;
        let delta = 2.0 * eps.sqrt() * bound / PI;
        if radius < 1.0 {
            return Ok(Vec::new());
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..self.entries.len() - 1 {
            let (v, w) = (&self.entries[i], &self.entries[i + 1]);
            let ri = (delta * w.vector[1] as f64 + radius * w.divisor.abs()).floor() + 1.0;
            let rj = (radius * v.divisor.abs() + delta * v.vector[1] as f64).floor() + 1.0;
            let size = (2.0 * ri + 1.0) * (2.0 * rj + 1.0);
            if best.is_none_or(|(_, a, b)| size < (2.0 * a + 1.0) * (2.0 * b + 1.0)) {
                best = Some((i, ri, rj));
            }
        }
        let (i0, ri, rj) = best.expect("at least two table entries");
        if 2.0 * ri + 1.0 > MAX_ROWS {
            return Err(Error::InsufficientDepth {
                required: self.depth() + 1,
                available: self.depth(),
            });
        }
        let (v, w) = (&self.entries[i0], &self.entries[i0 + 1]);
        let (dv, dw) = (v.divisor, w.divisor);
        let (ri, rj) = (ri as i128, rj as i128);
        let slack = delta * (1.0 + 1e-9);
        let mut out = Vec::new();
        for i in -ri..=ri {
            // j-range where |i dv + j dw| <= delta
            let c = i as f64 * dv;
            let tol = slack + 1e-12 * c.abs();
            let (a, b) = ((-tol - c) / dw, (tol - c) / dw);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let lo = (lo.floor() as i128).max(-rj);
            let hi = (hi.ceil() as i128).min(rj);
            for j in lo..=hi {
                let Some(k) = combine(i, j, v.vector, w.vector) else {
                    continue;
                };
                if !(k[1] > 0 || (k[1] == 0 && k[0] > 0)) {
                    continue;
                }
                if super::norm1(k) > radius * (1.0 + 1e-12) {
                    continue;
                }
                let d = self.freq.divisor(k)?;
                let profile = HarmonicProfile::new(k, d, &self.constants);
                let beta = profile.beta(eps, rho);
                if beta <= bound {
                    out.push(Candidate { profile, beta });
                }
            }
        }
        Ok(out)
    }
}

fn combine(i: i128, j: i128, v: Harmonic, w: Harmonic) -> Option<Harmonic> {
    let k1 = i.checked_mul(v[0])?.checked_add(j.checked_mul(w[0])?)?;
    let k2 = i.checked_mul(v[1])?.checked_add(j.checked_mul(w[1])?)?;
    Some([k1, k2])
}
