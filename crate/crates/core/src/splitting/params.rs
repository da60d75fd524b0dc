use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Harmonic;
use crate::error::{Error, Result};

/// Phases `sigma_k` of the perturbation's Fourier modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum PhasePolicy {
    Zero,
    Random { seed: u64 },
}

/// Model parameters: analyticity width `rho`, the exponent `p` in
/// `mu = eps^p`, and the phase policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub rho: f64,
    pub p_exponent: f64,
    pub phases: PhasePolicy,
}

impl ModelParams {
    pub const DEFAULT_P: f64 = 3.5;

    pub fn new(rho: f64, p_exponent: f64, phases: PhasePolicy) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        if !(p_exponent > 3.0 && p_exponent.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "the exponent p in mu = eps^p must exceed 3, got {p_exponent}"
            )));
        }
        Ok(Self {
            rho,
            p_exponent,
            phases,
        })
    }

    pub fn with_rho(rho: f64) -> Result<Self> {
        Self::new(rho, Self::DEFAULT_P, PhasePolicy::Zero)
    }

    /// `ln mu = p ln eps`.
    pub fn ln_mu(&self, eps: f64) -> f64 {
        self.p_exponent * eps.ln()
    }

    /// `sigma_k` in `[0, 2 pi)`. Random phases are a pure function of the
    /// seed and `k`.
    pub fn phase(&self, k: Harmonic) -> f64 {
        match self.phases {
            PhasePolicy::Zero => 0.0,
            PhasePolicy::Random { seed } => {
                let mut bytes = [0u8; 32];
                bytes[..8].copy_from_slice(&seed.to_le_bytes());
                bytes[8..20].copy_from_slice(&k[0].to_le_bytes()[..12]);
                bytes[20..].copy_from_slice(&k[1].to_le_bytes()[..12]);
                let mut rng = ChaCha8Rng::from_seed(bytes);
                rng.random::<f64>() * std::f64::consts::TAU
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelParams::new(0.0, 3.5, PhasePolicy::Zero).is_err());
        assert!(ModelParams::new(1.0, 3.0, PhasePolicy::Zero).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, PhasePolicy::Zero).is_err());
    }

    #[test]
    fn random_phases_are_reproducible() {
        let a = ModelParams::new(1.0, 3.5, PhasePolicy::Random { seed: 7 }).unwrap();
        let b = ModelParams::new(2.0, 4.0, PhasePolicy::Random { seed: 7 }).unwrap();
        let c = ModelParams::new(1.0, 3.5, PhasePolicy::Random { seed: 8 }).unwrap();
        assert_eq!(a.phase([3, 5]), b.phase([3, 5]));
        assert_ne!(a.phase([3, 5]), a.phase([5, 3]));
        assert_ne!(a.phase([3, 5]), c.phase([3, 5]));
        let s = a.phase([-7, 11]);
        assert!((0.0..std::f64::consts::TAU).contains(&s));
        assert_eq!(ModelParams::with_rho(1.0).unwrap().phase([1, 1]), 0.0);
    }
}
