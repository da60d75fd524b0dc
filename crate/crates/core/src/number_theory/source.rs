//! Ways of specifying the frequency ratio and resolving them to a certified
//! enclosure plus certified partial quotients.

use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::cf::{convergents, cylinder, expand_continued_fraction, shallit_number, PartialQuotients};
use super::real::{CertifiedReal, DyadicInterval};
use crate::error::{Error, Result};

/// Extra quotients requested beyond the analysis depth so that numerators
/// at the deepest convergents are still resolved.
const PRECISION_MARGIN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OmegaSpec {
    Shallit { truncation: u32 },
    Golden,
    Quotients(Vec<u64>),
    Periodic { preperiod: Vec<u64>, period: Vec<u64> },
    Enclosure { lo: BigRational, hi: BigRational },
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            OmegaSpec::Shallit { truncation } => write!(f, "shallit(K={truncation})"),
            OmegaSpec::Golden => write!(f, "golden"),
            OmegaSpec::Quotients(q) => write!(f, "quotients({})", join(q)),
            OmegaSpec::Periodic { preperiod, period } if preperiod.is_empty() => {
                write!(f, "periodic({})", join(period))
            }
            OmegaSpec::Periodic { preperiod, period } => {
                write!(f, "periodic({}/{})", join(preperiod), join(period))
            }
            OmegaSpec::Enclosure { lo, hi } => write!(f, "enclosure({lo}, {hi})"),
        }
    }
}

impl OmegaSpec {
    /// Purely periodic quotient list when the input has one.
    pub fn pure_period(&self) -> Option<&[u64]> {
        match self {
            OmegaSpec::Golden => Some(&[1]),
            OmegaSpec::Periodic { preperiod, period } if preperiod.is_empty() => Some(period),
            _ => None,
        }
    }
}

/// A frequency ratio `0 < omega < 1` resolved to a given depth.
#[derive(Debug, Clone)]
pub struct Frequency {
    spec: OmegaSpec,
    omega: CertifiedReal,
    quotients: PartialQuotients,
    hull: DyadicInterval,
}

impl Frequency {
    /// Resolves `spec` so that at least `depth` partial quotients are
    /// certified. Fails with a precision error instead of guessing.
    pub fn resolve(spec: &OmegaSpec, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidInput("depth must be at least 1".into()));
        }
        let (omega, quotients) = match spec {
            OmegaSpec::Shallit { truncation } => expand(shallit_number(*truncation)?, depth)?,
            OmegaSpec::Enclosure { lo, hi } => expand(CertifiedReal::new(lo.clone(), hi.clone())?, depth)?,
            OmegaSpec::Golden => periodic(&[], &[1], depth)?,
            OmegaSpec::Periodic { preperiod, period } => periodic(preperiod, period, depth)?,
            OmegaSpec::Quotients(list) => {
                if list.len() < depth {
                    return Err(Error::InsufficientDepth {
                        required: depth,
                        available: list.len(),
                    });
                }
                let pq = PartialQuotients::certified(list.clone())?;
                (cylinder(list)?, pq)
            }
        };
        Ok(Self::from_parts(spec.clone(), omega, quotients))
    }

    /// Wraps an already certified enclosure and quotient list.
    pub fn from_parts(spec: OmegaSpec, omega: CertifiedReal, quotients: PartialQuotients) -> Self {
        let hull = omega.dyadic_hull(hull_bits(&omega, &quotients));
        Self {
            spec,
            omega,
            quotients,
            hull,
        }
    }

    pub fn spec(&self) -> &OmegaSpec {
        &self.spec
    }

    pub fn omega(&self) -> &CertifiedReal {
        &self.omega
    }

    pub fn quotients(&self) -> &PartialQuotients {
        &self.quotients
    }

    pub fn hull(&self) -> &DyadicInterval {
        &self.hull
    }

    pub fn to_f64(&self) -> f64 {
        self.omega.to_f64()
    }

    /// Signed small divisor `k1 + k2 * omega`.
    pub fn divisor(&self, k: [i128; 2]) -> Result<f64> {
        self.hull.linear_form(k[0], k[1])
    }
}

fn expand(omega: CertifiedReal, depth: usize) -> Result<(CertifiedReal, PartialQuotients)> {
    let pq = expand_continued_fraction(&omega, depth + PRECISION_MARGIN)?;
    if pq.certified_depth() < depth {
        return Err(Error::EnclosureTooWide {
            index: pq.certified_depth() + 1,
        });
    }
    Ok((omega, pq))
}

fn periodic(preperiod: &[u64], period: &[u64], depth: usize) -> Result<(CertifiedReal, PartialQuotients)> {
    if period.is_empty() {
        return Err(Error::InvalidInput("periodic quotient list has an empty period".into()));
    }
    let total = depth + PRECISION_MARGIN;
    let list: Vec<u64> = preperiod
        .iter()
        .copied()
        .chain(period.iter().copied().cycle())
        .take(total.max(preperiod.len()))
        .collect();
    let pq = PartialQuotients::certified(list.clone())?;
    Ok((cylinder(&list)?, pq))
}

/// Dyadic precision for the fast divisor evaluations: as fine as the
/// enclosure itself, but no finer than what denominators up to the
/// certified depth can use.
fn hull_bits(omega: &CertifiedReal, pq: &PartialQuotients) -> u32 {
    let width = omega.width();
    let width_bits = width.denom().bits().saturating_sub(width.numer().bits()) + 8;
    let q_bits = convergents(pq, pq.certified_depth())
        .ok()
        .and_then(|c| c.last().map(|c| c.q.bits()))
        .unwrap_or(0);
    let useful = 4 * q_bits + 256;
    width_bits.clamp(128, useful.max(128)).to_u32().unwrap_or(u32::MAX)
}
