//! Melnikov coefficients, the dominant harmonic and the splitting estimates.

mod constants;
mod dominance;
mod field;
mod melnikov;
mod model;
mod params;

pub use constants::{constants_bundle, g_function, g_function_ln, harmonic_profile, ConstantsBundle, HarmonicProfile};
pub use dominance::{DominanceReport, EpsWindow, ScanRow, ScanTable};
pub use field::{FieldValue, HarmonicSet, LowerBound, SecondSum, TailBound, Term, Truncation};
pub use melnikov::{exponent_decomposition, ln_coefficient, ln_residue_factor, melnikov_coefficient, Exponents};
pub use model::{Candidate, ResonantEntry, SplittingModel};
pub use params::{ModelParams, PhasePolicy};

use crate::error::{Error, Result};

/// Integer harmonic `k = (k1, k2)`.
pub type Harmonic = [i128; 2];

/// `|k|_1` as a float.
pub fn norm1(k: Harmonic) -> f64 {
    (k[0].unsigned_abs() + k[1].unsigned_abs()) as f64
}

/// Representative of `{k, -k}` with `k2 > 0`, or `k2 = 0` and `k1 > 0`.
pub fn canonical(k: Harmonic) -> Result<Harmonic> {
    match k {
        [0, 0] => Err(Error::InvalidInput("the harmonic k = 0 is excluded".into())),
        [k1, k2] if k2 > 0 || (k2 == 0 && k1 > 0) => Ok(k),
        [k1, k2] => Ok([-k1, -k2]),
    }
}
