use std::f64::consts::PI;

use serde::Serialize;

use super::Harmonic;
use crate::error::{Error, Result};
use crate::number_theory::{DiophantineLimits, Window};

/// The constants of the splitting estimates for one frequency and width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsBundle {
    pub gamma_star: f64,
    pub nu_star: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub rho: f64,
    pub window: Window,
}

impl ConstantsBundle {
    /// Builds the bundle from explicit numerator limits.
    pub fn from_parts(gamma_star: f64, nu_star: f64, e: f64, m: u64, rho: f64, window: Window) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        if !(gamma_star > 0.0 && e >= 1.0 && m >= 1) {
            return Err(Error::InvalidInput(format!(
                "invalid limits: gamma* = {gamma_star}, E = {e}, M = {m}"
            )));
        }
        let c0 = (2.0 * PI * rho * gamma_star).sqrt();
        let d0 = (PI * gamma_star / (2.0 * rho)).powi(2);
        let em = (e * m as f64).sqrt();
        let b = e / 2.0 * (em + 1.0 / em);
        Ok(Self {
            gamma_star,
            nu_star,
            e,
            m,
            c0,
            d0,
            b,
            c: c0 * b,
            rho,
            window,
        })
    }

    /// The same frequency data at a different width `rho`.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::from_parts(self.gamma_star, self.nu_star, self.e, self.m, rho, self.window)
    }

    /// `eps_k` for a harmonic with normalized numerator `gamma_tilde` and
    /// norm `norm`, in log space.
    pub fn ln_eps_k(&self, gamma_tilde: f64, norm: f64) -> f64 {
        self.d0.ln() + 2.0 * gamma_tilde.ln() - 4.0 * norm.ln()
    }
}

pub fn constants_bundle(limits: &DiophantineLimits, rho: f64) -> Result<ConstantsBundle> {
    ConstantsBundle::from_parts(
        limits.gamma_star_est,
        limits.nu_star_est,
        limits.e,
        limits.m,
        rho,
        limits.window,
    )
}

/// `G(eps; X, Y) = (sqrt(Y)/2) ((eps/X)^(1/4) + (X/eps)^(1/4))`.
pub fn g_function(eps: f64, x: f64, y: f64) -> f64 {
    g_function_ln(eps.ln(), x.ln(), y)
}

/// [`g_function`] with `eps` and `X` given by their logarithms.
pub fn g_function_ln(ln_eps: f64, ln_x: f64, y: f64) -> f64 {
    let r = ((ln_eps - ln_x) / 4.0).exp();
    y.sqrt() / 2.0 * (r + 1.0 / r)
}

/// Per-harmonic data entering `g_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicProfile {
    pub k: Harmonic,
    /// `|k|_1`.
    pub norm: f64,
    /// Signed small divisor `<k, (1, omega)>`.
    pub divisor: f64,
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub eps_k: f64,
    pub ln_eps_k: f64,
}

impl HarmonicProfile {
    pub fn new(k: Harmonic, divisor: f64, constants: &ConstantsBundle) -> Self {
        let norm = super::norm1(k);
        let gamma = divisor.abs() * norm;
        let gamma_tilde = gamma / constants.gamma_star;
        let ln_eps_k = constants.ln_eps_k(gamma_tilde, norm);
        Self {
            k,
            norm,
            divisor,
            gamma,
            gamma_tilde,
            eps_k: ln_eps_k.exp(),
            ln_eps_k,
        }
    }

    /// `g_k(eps) = G(eps; eps_k, gamma_tilde_k)`.
    pub fn g(&self, eps: f64) -> f64 {
        g_function_ln(eps.ln(), self.ln_eps_k, self.gamma_tilde)
    }

    /// Envelope `G(eps; eps_k, E^2)`.
    pub fn g_plus(&self, eps: f64, constants: &ConstantsBundle) -> f64 {
        g_function_ln(eps.ln(), self.ln_eps_k, constants.e * constants.e)
    }

    /// `beta_k(eps) = rho |k| + pi |<k, omega>| / (2 sqrt(eps))`.
    pub fn beta(&self, eps: f64, rho: f64) -> f64 {
        rho * self.norm + PI * self.divisor.abs() / (2.0 * eps.sqrt())
    }
}

/// Profile of `k` for the frequency `omega`, with `k` normalized to the
/// upper half-plane.
pub fn harmonic_profile(
    k: Harmonic,
    constants: &ConstantsBundle,
    omega: &crate::number_theory::Frequency,
) -> Result<HarmonicProfile> {
    let k = super::canonical(k)?;
    Ok(HarmonicProfile::new(k, omega.divisor(k)?, constants))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::{Frequency, OmegaSpec};

    fn bundle(e: f64, m: u64, rho: f64) -> ConstantsBundle {
        ConstantsBundle::from_parts(0.5, 0.3, e, m, rho, Window { start: 1, end: 2 }).unwrap()
    }

    #[test]
    fn shallit_constant_b() {
        let c = bundle(1.3761, 3, 1.0);
        assert!((c.b - 1.7366).abs() < 5e-4, "B = {}", c.b);
        assert!(c.b >= c.e);
        assert_eq!(bundle(1.0, 1, 1.0).b, 1.0);
        assert!((c.c - c.c0 * c.b).abs() < 1e-15);
        assert!((c.c0 - (PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn g_examples() {
        assert!((g_function(0.3, 0.3, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((g_function(16.0 * 0.01, 0.01, 1.0) - 1.25).abs() < 1e-14);
        let (x, e) = (0.02, 0.5);
        assert!((g_function(e, x, 1.7) - g_function(x * x / e, x, 1.7)).abs() < 1e-14);
    }

    #[test]
    fn halving_rho_scales_eps_k() {
        let f = Frequency::resolve(&OmegaSpec::Golden, 20).unwrap();
        let a = harmonic_profile([-5, 8], &bundle(1.2, 2, 1.0), &f).unwrap();
        let b = harmonic_profile([5, -8], &bundle(1.2, 2, 0.5), &f).unwrap();
        assert_eq!(b.k, [-5, 8]);
        assert!((b.eps_k / a.eps_k - 4.0).abs() < 1e-12);
    }

    #[test]
    fn beta_of_first_vector() {
        let f = Frequency::resolve(&OmegaSpec::Golden, 20).unwrap();
        let w = f.to_f64();
        let p = harmonic_profile([0, 1], &bundle(1.2, 2, 1.3), &f).unwrap();
        let eps = 0.07;
        assert!((p.beta(eps, 1.3) - (1.3 + PI * w / (2.0 * eps.sqrt()))).abs() < 1e-14);
    }
}
