//! Windowed estimates of the asymptotic Diophantine constants.

use serde::{Deserialize, Serialize};

use super::cf::{convergents, PartialQuotients};
use super::numerators::nu_numerator;
use super::real::CertifiedReal;
use crate::error::{Error, Result};

/// Inclusive range of convergent indices `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start == 0 || start > end {
            return Err(Error::InvalidInput(format!(
                "convergent window [{start}, {end}] must satisfy 1 <= start <= end"
            )));
        }
        Ok(Self { start, end })
    }

    /// Upper half of `1..=depth`.
    pub fn upper_half(depth: usize) -> Result<Self> {
        Self::new(depth / 2 + 1, depth)
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.start..=self.end).contains(&n)
    }
}

/// Finite-depth estimates of `nu*`, `limsup nu_{q_n}`, `gamma*`, `E` and `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophantineLimits {
    pub nu_star_est: f64,
    pub nu_limsup_est: f64,
    pub gamma_star_est: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub window: Window,
    /// Indices attaining the windowed minimum and maximum.
    pub argmin: usize,
    pub argmax: usize,
    pub omega: f64,
}

/// Relative enclosure width above which `nu_q` is not trusted as an `f64`.
const MAX_NU_RELATIVE_WIDTH: f64 = 1e-15;

/// `nu_{q_n}` as floats for `n = 1 ..= last`, index 0 holding `n = 1`.
pub fn nu_convergent_values(pq: &PartialQuotients, omega: &CertifiedReal, last: usize) -> Result<Vec<f64>> {
    let conv = convergents(pq, last)?;
    conv.iter()
        .skip(2)
        .map(|c| {
            let nu = nu_numerator(&c.q, omega)?;
            if nu.value.relative_width() > MAX_NU_RELATIVE_WIDTH {
                return Err(Error::AmbiguousNearestInteger { q: c.q.to_string() });
            }
            Ok(nu.value.to_f64())
        })
        .collect()
}

pub fn estimate_diophantine_limits(
    pq: &PartialQuotients,
    omega: &CertifiedReal,
    window: Window,
) -> Result<DiophantineLimits> {
    if window.end > pq.certified_depth() {
        return Err(Error::InsufficientDepth {
            required: window.end,
            available: pq.certified_depth(),
        });
    }
    let values = nu_convergent_values(pq, omega, window.end)?;
    let mut argmin = window.start;
    let mut argmax = window.start;
    for n in window.start..=window.end {
        let v = values[n - 1];
        if v < values[argmin - 1] {
            argmin = n;
        }
        if v > values[argmax - 1] {
            argmax = n;
        }
    }
    let nu_star = values[argmin - 1];
    let nu_sup = values[argmax - 1];
    let w = omega.to_f64();
    Ok(DiophantineLimits {
        nu_star_est: nu_star,
        nu_limsup_est: nu_sup,
        gamma_star_est: nu_star * (1.0 + w),
        e: (nu_sup / nu_star).sqrt(),
        m: pq.growth_bound(),
        window,
        argmin,
        argmax,
        omega: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::{cylinder, expand_continued_fraction, shallit_number};

    #[test]
    fn window_validation() {
        assert!(Window::new(0, 3).is_err());
        assert!(Window::new(4, 3).is_err());
        assert_eq!(Window::upper_half(60).unwrap(), Window { start: 31, end: 60 });
        assert_eq!(Window::upper_half(1).unwrap(), Window { start: 1, end: 1 });
    }

    #[test]
    fn shallit_reference_constants() {
        let om = shallit_number(8).unwrap();
        let pq = expand_continued_fraction(&om, 60).unwrap();
        let lim = estimate_diophantine_limits(&pq, &om, Window::upper_half(60).unwrap()).unwrap();
        assert_eq!(lim.m, 3);
        assert!((lim.e - 1.3761).abs() < 5e-4, "E = {}", lim.e);
        assert!(lim.e >= 1.0 && lim.e <= 3f64.sqrt());
        let ratio = lim.gamma_star_est / (lim.nu_star_est * (1.0 + lim.omega));
        assert!((ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_limits_approach_hurwitz() {
        let om = cylinder(&[1; 140]).unwrap();
        let pq = PartialQuotients::certified(vec![1; 60]).unwrap();
        let lim = estimate_diophantine_limits(&pq, &om, Window::upper_half(60).unwrap()).unwrap();
        assert_eq!(lim.m, 2);
        assert!((lim.nu_star_est - 1.0 / 5f64.sqrt()).abs() < 1e-10);
        assert!((lim.e - 1.0).abs() < 1e-10);
    }

    #[test]
    fn window_past_certified_depth() {
        let om = shallit_number(5).unwrap();
        let pq = expand_continued_fraction(&om, 200).unwrap();
        let d = pq.certified_depth();
        let err = estimate_diophantine_limits(&pq, &om, Window::new(1, d + 1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InsufficientDepth { .. }));
    }
}
