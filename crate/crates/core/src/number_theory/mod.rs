//! Certified continued fractions and the Diophantine quantities built on
//! them: convergents, resonant convergents, numerators and their limits.

mod cf;
mod limits;
mod numerators;
mod real;
mod source;

pub use cf::{
    alternating_sign, convergents, cylinder, expand_continued_fraction, resonant_convergents, shallit_number,
    unimodular_products, Convergent, Mat2, PartialQuotients, ResonantVector,
};
pub use limits::{estimate_diophantine_limits, nu_convergent_values, DiophantineLimits, Window};
pub use numerators::{divisor_enclosure, gamma_numerator, nu_numerator, NuValue};
pub use real::{parse_rational, ratio_f64, rational_to_f64, CertifiedReal, DyadicInterval, Enclosure};
pub use source::{Frequency, OmegaSpec};
