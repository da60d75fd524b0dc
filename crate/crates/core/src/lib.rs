//! Certified number theory and Melnikov-level splitting estimates for
//! whiskered tori whose frequency ratio is a number of constant type.
//!
//! [`number_theory`] certifies continued-fraction data of the frequency
//! ratio from exact rational enclosures. [`splitting`] builds the Melnikov
//! coefficient landscape on top of it: dominant harmonics, the oscillating
//! exponent `h1`, the constants `B` and `C`, and the exponentially small
//! lower-bound estimate.

pub mod error;
pub mod number_theory;
pub mod sci;
pub mod splitting;

pub use error::{Error, Result};
