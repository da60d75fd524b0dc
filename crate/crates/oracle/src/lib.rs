//! Slow, independent checks for `ctsplit-core`: direct quadrature of the
//! Melnikov integral, exhaustive lattice and denominator sweeps, the
//! periodic resonance identity and finite-difference gradients.

pub mod error;
pub mod gradient;
pub mod lattice;
pub mod nu_scan;
pub mod periodic;
pub mod quadrature;

pub use error::{OracleError, OracleResult};
pub use gradient::finite_difference_gradient;
pub use lattice::{brute_force_min_g, BruteForceMin, LatticeOracle};
pub use nu_scan::{brute_force_nu_scan, NuHit, NuScan};
pub use periodic::{periodic_cf_resonance_check, ResonanceCheck};
pub use quadrature::{
    quadrature_at_frequency, quadrature_melnikov_coefficient, QuadratureResult, QuadratureSpec, Scheme,
};
