use serde::Serialize;

use super::model::{Candidate, SplittingModel};
use super::{canonical, Harmonic};
use crate::error::{Error, Result};
use crate::sci::{LogMagnitude, Scientific};

/// Which harmonics enter a truncated Melnikov potential.
#[derive(Debug, Clone, PartialEq)]
pub enum Truncation {
    /// Every `k` with `L_k >= floor * L_S`.
    RelativeFloor(f64),
    /// The `n` largest coefficients.
    TopN(usize),
    /// Exactly these harmonics, with no tail accounting.
    Explicit(Vec<Harmonic>),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::RelativeFloor(1e-20)
    }
}

/// One Fourier mode `L_k cos(<k, theta> - sigma_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub k: Harmonic,
    pub norm: f64,
    pub ln_coefficient: f64,
    pub phase: f64,
}

/// Upper bounds on `sum L_k` and `sum |k| L_k` over the omitted harmonics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub ln_potential: f64,
    pub ln_gradient: f64,
}

/// A finite harmonic set at one `eps`, referenced to the dominant `L_S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSet {
    pub eps: f64,
    #[serde(rename = "S")]
    pub s: Harmonic,
    /// `ln L_S`.
    pub ln_reference: f64,
    pub terms: Vec<Term>,
    pub tail: Option<TailBound>,
}

/// `L(theta)` and `M(theta) = grad L(theta)`, both divided by `exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldValue {
    pub ln_scale: f64,
    pub potential: f64,
    pub gradient: [f64; 2],
}

impl FieldValue {
    /// `|M|_1`, matching the norm used for harmonics.
    pub fn gradient_norm(&self) -> f64 {
        self.gradient[0].abs() + self.gradient[1].abs()
    }
}

/// `sum_{k != S} |k| L_k` against `|S| L_S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondSum {
    pub eps: f64,
    #[serde(rename = "S")]
    pub s: Harmonic,
    /// `ln(|S| L_S)`.
    pub ln_dominant: f64,
    /// Log of the sum including the tail bound; `-inf` for an empty sum.
    pub ln_sum: f64,
    pub ratio: f64,
    pub terms: usize,
    pub tail_included: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub eps: f64,
    pub mu: Scientific,
    pub h1: f64,
    #[serde(rename = "S")]
    pub s: Harmonic,
    /// `(mu / sqrt(eps)) exp(-C0 h1 / eps^(1/4))`.
    pub estimate: Scientific,
    /// `(mu / sqrt(eps)) exp(-C / eps^(1/4))`.
    pub floor: Scientific,
    pub ln_estimate: f64,
    pub ln_floor: f64,
    /// `ln(mu |S| L_S)`.
    pub ln_dominant_term: f64,
}

/// `ln sum exp(x_i)`.
fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln((4 + 8 b) e^{-b})`, an upper bound for `ln L_k` when `beta_k >= b`.
fn ln_envelope(b: f64) -> f64 {
    (4.0 + 8.0 * b).ln() - b
}

/// Bounds on `sum L_k` and `sum |k| L_k` over canonical `k` with
/// `beta_k > b`, valid for `b >= 1`.
///
/// There are `2r` canonical harmonics of norm `r`. Those with
/// `rho r < b` are bounded by the envelope at `b`, the rest by the
/// envelope at `rho r`, summed explicitly until the terms decay
/// geometrically.
fn tail_bound(b: f64, rho: f64) -> TailBound {
    let b = b.max(1.0);
    let r0 = (b / rho).ceil().max(1.0);
    let near = ln_envelope(b);
    let inner_pot = if r0 > 1.0 {
        (r0 * (r0 - 1.0)).ln() + near
    } else {
        f64::NEG_INFINITY
    };
    let inner_grad = if r0 > 1.0 {
        (r0 * (r0 - 1.0) * (2.0 * r0 - 1.0) / 3.0).ln() + near
    } else {
        f64::NEG_INFINITY
    };
    let outer = |w: i32| -> f64 {
        let term = |r: f64| (2.0 * r.powi(w)).ln() + ln_envelope(rho * r);
        let ratio =
            |r: f64| ((r + 1.0) / r).powi(w) * (4.0 + 8.0 * rho * (r + 1.0)) / (4.0 + 8.0 * rho * r) * (-rho).exp();
        let mut acc = Vec::new();
        let mut r = r0;
        let mut steps = 0;
        // past 2^53 `r` stops moving; repeating a term of a decreasing sum still bounds it
        while ratio(r) > 0.5 && (ratio(r) >= 1.0 || steps < 100_000) {
            acc.push(term(r));
            r += 1.0;
            steps += 1;
        }
        let q = ratio(r);
        acc.push(term(r) - (1.0 - q).ln());
        log_sum_exp(acc)
    };
    TailBound {
        ln_potential: log_sum_exp([inner_pot, outer(1)]),
        ln_gradient: log_sum_exp([inner_grad, outer(2)]),
    }
}

impl SplittingModel {
    fn term(&self, c: &Candidate, eps: f64) -> Term {
        Term {
            k: c.profile.k,
            norm: c.profile.norm,
            ln_coefficient: self.ln_coefficient(&c.profile, eps),
            phase: self.params().phase(c.profile.k),
        }
    }

    /// Resolves `truncation` at `eps` into explicit terms with a certified
    /// bound on everything left out.
    pub fn harmonic_set(&self, eps: f64, truncation: &Truncation) -> Result<HarmonicSet> {
        let d = self.dominance(eps)?;
        let s = d.s;
        let ln_ref = self.ln_coefficient(&s.profile, eps);
        let rho = self.params().rho;
        let (terms, tail) = match truncation {
            Truncation::Explicit(list) => {
                let mut terms = Vec::with_capacity(list.len());
                for &k in list {
                    let k = canonical(k)?;
                    if terms.iter().any(|t: &Term| t.k == k) {
                        continue;
                    }
                    let profile = self.profile(k)?;
                    let beta = profile.beta(eps, rho);
                    terms.push(self.term(&Candidate { profile, beta }, eps));
                }
                (terms, None)
            }
            Truncation::RelativeFloor(f) => {
                if !(*f > 0.0 && *f <= 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "relative floor must lie in (0, 1], got {f}"
                    )));
                }
                let cut = ln_ref + f.ln();
                // the omitted remainder should sit well below the floor itself
                let mut b = s.beta + (-f.ln()).max(1.0);
                while tail_bound(b, rho).ln_gradient > cut - 7.0 {
                    b += 2f64.max(4.0 * b * f64::EPSILON);
                }
                let all: Vec<Term> = self.ball(eps, b)?.iter().map(|c| self.term(c, eps)).collect();
                split(all, |t| t.ln_coefficient >= cut, tail_bound(b, rho))
            }
            Truncation::TopN(n) => {
                if *n == 0 {
                    return Err(Error::InvalidInput("TopN needs at least one harmonic".into()));
                }
                let mut delta = 10.0;
                loop {
                    let b = s.beta + delta;
                    let mut all: Vec<Term> = self.ball(eps, b)?.iter().map(|c| self.term(c, eps)).collect();
                    all.sort_by(|x, y| y.ln_coefficient.total_cmp(&x.ln_coefficient).then(x.k.cmp(&y.k)));
                    if all.len() >= *n && all[*n - 1].ln_coefficient >= ln_envelope(b) {
                        let rest = all.split_off(*n);
                        let tb = tail_bound(b, rho);
                        break (all, Some(add_to_tail(tb, &rest)));
                    }
                    delta *= 1.5;
                    if delta > (64.0 * s.beta).max(1e5) {
                        return Err(Error::InvalidInput(format!(
                            "cannot certify the top {n} harmonics at eps = {eps:e}"
                        )));
                    }
                }
            }
        };
        Ok(HarmonicSet {
            eps,
            s: s.profile.k,
            ln_reference: ln_ref,
            terms,
            tail,
        })
    }

    /// Truncated `L(theta)` and `M(theta)` scaled by `L_S`.
    pub fn melnikov_field(&self, theta: [f64; 2], set: &HarmonicSet) -> FieldValue {
        field_with(set, |k| k[0] as f64 * theta[0] + k[1] as f64 * theta[1])
    }

    /// The field at the grid point `theta = 2 pi (i, j) / n`. `<k, theta>` is
    /// reduced modulo `2 pi` in integers, so huge harmonics stay accurate.
    pub fn melnikov_field_at_grid(&self, index: [u64; 2], n: u64, set: &HarmonicSet) -> FieldValue {
        let n = n.max(1) as i128;
        let (i, j) = (index[0] as i128 % n, index[1] as i128 % n);
        field_with(set, |k| {
            let m = (k[0].rem_euclid(n) * i + k[1].rem_euclid(n) * j).rem_euclid(n);
            std::f64::consts::TAU * m as f64 / n as f64
        })
    }

    pub fn second_sum_estimate(&self, eps: f64, truncation: &Truncation) -> Result<SecondSum> {
        let set = self.harmonic_set(eps, truncation)?;
        Ok(second_sum_of(&set))
    }

    pub fn lower_bound_estimate(&self, eps: f64) -> Result<LowerBound> {
        let d = self.dominance(eps)?;
        let c = self.constants();
        let ln_mu = self.params().ln_mu(eps);
        let pre = ln_mu - 0.5 * eps.ln();
        let q = eps.powf(0.25);
        let ln_estimate = pre - c.c0 * d.h1 / q;
        let ln_floor = pre - c.c / q;
        let ln_dominant_term = ln_mu + d.s.profile.norm.ln() + self.ln_coefficient(&d.s.profile, eps);
        Ok(LowerBound {
            eps,
            mu: LogMagnitude(ln_mu).scientific(),
            h1: d.h1,
            s: d.s.profile.k,
            estimate: LogMagnitude(ln_estimate).scientific(),
            floor: LogMagnitude(ln_floor).scientific(),
            ln_estimate,
            ln_floor,
            ln_dominant_term,
        })
    }
}

fn field_with(set: &HarmonicSet, angle: impl Fn(Harmonic) -> f64) -> FieldValue {
    let mut potential = 0.0;
    let mut gradient = [0.0; 2];
    for t in &set.terms {
        let a = (t.ln_coefficient - set.ln_reference).exp();
        let (sn, cs) = (angle(t.k) - t.phase).sin_cos();
        potential += a * cs;
        gradient[0] -= a * t.k[0] as f64 * sn;
        gradient[1] -= a * t.k[1] as f64 * sn;
    }
    FieldValue {
        ln_scale: set.ln_reference,
        potential,
        gradient,
    }
}

/// Second sum of an already resolved set.
pub(crate) fn second_sum_of(set: &HarmonicSet) -> SecondSum {
    let s_norm = super::norm1(set.s);
    let ln_dominant = s_norm.ln() + set.ln_reference;
    let mut parts: Vec<f64> = set
        .terms
        .iter()
        .filter(|t| t.k != set.s)
        .map(|t| t.norm.ln() + t.ln_coefficient)
        .collect();
    let terms = parts.len();
    if let Some(t) = set.tail {
        parts.push(t.ln_gradient);
    }
    let ln_sum = log_sum_exp(parts);
    SecondSum {
        eps: set.eps,
        s: set.s,
        ln_dominant,
        ln_sum,
        ratio: (ln_sum - ln_dominant).exp(),
        terms,
        tail_included: set.tail.is_some(),
    }
}

fn split(all: Vec<Term>, keep: impl Fn(&Term) -> bool, tail: TailBound) -> (Vec<Term>, Option<TailBound>) {
    let (mut kept, rest): (Vec<Term>, Vec<Term>) = all.into_iter().partition(keep);
    kept.sort_by(|x, y| y.ln_coefficient.total_cmp(&x.ln_coefficient).then(x.k.cmp(&y.k)));
    (kept, Some(add_to_tail(tail, &rest)))
}

fn add_to_tail(tail: TailBound, rest: &[Term]) -> TailBound {
    TailBound {
        ln_potential: log_sum_exp(std::iter::once(tail.ln_potential).chain(rest.iter().map(|t| t.ln_coefficient))),
        ln_gradient: log_sum_exp(
            std::iter::once(tail.ln_gradient).chain(rest.iter().map(|t| t.norm.ln() + t.ln_coefficient)),
        ),
    }
}
