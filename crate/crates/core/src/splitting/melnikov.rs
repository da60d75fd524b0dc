use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use super::constants::HarmonicProfile;
use super::params::ModelParams;
use super::Harmonic;
use crate::error::Result;
use crate::number_theory::Frequency;
use crate::sci::LogMagnitude;

/// `ln(2 pi x / sinh(pi x / 2))` for `x >= 0`, stable at both ends.
pub fn ln_residue_factor(x: f64) -> f64 {
    let x = x.abs();
    let y = PI * x / 2.0;
    if y < 1e-4 {
        // 2 pi x / sinh(pi x / 2) = 4 y / sinh y
        let y2 = y * y;
        return 4f64.ln() - y2 / 6.0 + y2 * y2 / 180.0;
    }
    let ln_sinh = if y > 20.0 {
        y - LN_2 + (-(-2.0 * y).exp()).ln_1p()
    } else {
        y.sinh().ln()
    };
    (2.0 * PI * x).ln() - ln_sinh
}

/// `ln L_k` for a harmonic of norm `norm` and signed divisor `divisor`.
pub fn ln_coefficient(norm: f64, divisor: f64, rho: f64, eps: f64) -> f64 {
    ln_residue_factor(divisor / eps.sqrt()) - rho * norm
}

/// The Fourier coefficient
/// `L_k = 2 pi |x| e^{-rho |k|} / sinh(pi |x| / 2)` with `x = <k, omega> / sqrt(eps)`.
pub fn melnikov_coefficient(k: Harmonic, params: &ModelParams, eps: f64, omega: &Frequency) -> Result<LogMagnitude> {
    let k = super::canonical(k)?;
    let d = omega.divisor(k)?;
    Ok(LogMagnitude(ln_coefficient(super::norm1(k), d, params.rho, eps)))
}

/// `L_k = alpha_k exp(-beta_k)` up to the factor `1 / (1 - exp(-pi |x|))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub alpha: f64,
    pub beta: f64,
}

impl Exponents {
    pub fn of_profile(p: &HarmonicProfile, rho: f64, eps: f64) -> Self {
        let s = eps.sqrt();
        Self {
            alpha: 4.0 * PI * p.gamma / (p.norm * s),
            beta: p.beta(eps, rho),
        }
    }

    /// `ln(alpha) - beta`.
    pub fn ln_leading(&self) -> f64 {
        self.alpha.ln() - self.beta
    }
}

pub fn exponent_decomposition(k: Harmonic, params: &ModelParams, eps: f64, omega: &Frequency) -> Result<Exponents> {
    let k = super::canonical(k)?;
    let d = omega.divisor(k)?;
    let norm = super::norm1(k);
    let s = eps.sqrt();
    Ok(Exponents {
        alpha: 4.0 * PI * d.abs() / s,
        beta: params.rho * norm + PI * d.abs() / (2.0 * s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::OmegaSpec;
    use crate::number_theory::Window;
    use crate::splitting::constants::ConstantsBundle;
    use proptest::prelude::*;

    fn shallit() -> Frequency {
        Frequency::resolve(&OmegaSpec::Shallit { truncation: 8 }, 60).unwrap()
    }

    #[test]
    fn small_divisor_limit() {
        assert!((ln_residue_factor(0.0) - 4f64.ln()).abs() < 1e-15);
        assert!((ln_residue_factor(1e-9) - 4f64.ln()).abs() < 1e-15);
        // continuity across the series switch
        let x = 2e-4 / PI;
        let direct = (2.0 * PI * x / (PI * x / 2.0).sinh()).ln();
        assert!((ln_residue_factor(x) - direct).abs() < 1e-12);
    }

    #[test]
    fn closed_form_at_two() {
        let v = ln_residue_factor(2.0).exp();
        assert!((v - 4.0 * PI / PI.sinh()).abs() < 1e-14);
        assert!((v - 1.0881).abs() < 1e-4);
    }

    #[test]
    fn huge_arguments_stay_finite() {
        let l = ln_residue_factor(1e6);
        assert!(l.is_finite());
        let y = PI * 1e6 / 2.0;
        assert!((l - ((2.0 * PI * 1e6).ln() - y + LN_2)).abs() < 1e-6);
    }

    #[test]
    fn first_vector_beta() {
        let f = shallit();
        let params = ModelParams::with_rho(1.0).unwrap();
        let w = f.to_f64();
        let ex = exponent_decomposition([0, 1], &params, 0.25, &f).unwrap();
        assert!((ex.beta - (1.0 + PI * w / (2.0 * 0.5))).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn coefficient_matches_alpha_beta(k1 in -40i128..40, k2 in 1i128..40, ln_eps in -12.0f64..2.0) {
            let f = shallit();
            let params = ModelParams::with_rho(1.0).unwrap();
            let eps = ln_eps.exp();
            let l = melnikov_coefficient([k1, k2], &params, eps, &f).unwrap();
            let ex = exponent_decomposition([k1, k2], &params, eps, &f).unwrap();
            let x = f.divisor([k1, k2]).unwrap().abs() / eps.sqrt();
            let gap = (l.ln() - ex.ln_leading()).abs();
            // L = alpha e^{-beta} / (1 - e^{-pi x}); the gap is -ln(1 - e^{-pi x}).
            let expected = -(-(-PI * x).exp()).ln_1p();
            prop_assert!((gap - expected).abs() <= 1e-9 * (1.0 + expected));
            if PI * x > 5.0 {
                prop_assert!(gap <= 2.0 * (-PI * x).exp() + 1e-13 * l.ln().abs());
            }
        }

        #[test]
        fn beta_is_c0_g_over_quarter_power(k1 in -60i128..60, k2 in 1i128..60, ln_eps in -20.0f64..1.0, rho in 0.1f64..4.0) {
            let f = shallit();
            let c = ConstantsBundle::from_parts(0.6, 0.3, 1.3, 3, rho, Window { start: 1, end: 1 }).unwrap();
            let p = super::super::harmonic_profile([k1, k2], &c, &f).unwrap();
            let eps = ln_eps.exp();
            let beta = p.beta(eps, rho);
            let rhs = c.c0 * p.g(eps) / eps.powf(0.25);
            prop_assert!((beta - rhs).abs() <= 1e-10 * beta);
            // minimum over eps is attained at eps_k
            let at_min = p.beta(p.eps_k, rho);
            prop_assert!((at_min - c.c0 * p.gamma_tilde.sqrt() / p.eps_k.powf(0.25)).abs() <= 1e-10 * at_min);
        }
    }
}
