//! Central differences of the truncated Melnikov potential.

use ctsplit_core::splitting::{HarmonicSet, SplittingModel};

use crate::error::{OracleError, OracleResult};

/// `(L(theta + h e_i) - L(theta - h e_i)) / 2h`, in the same `L_S` units as
/// the field.
pub fn finite_difference_gradient(
    model: &SplittingModel,
    set: &HarmonicSet,
    theta: [f64; 2],
    step: f64,
) -> OracleResult<[f64; 2]> {
    if step.is_nan() || step <= 0.0 {
        return Err(OracleError::InvalidInput(format!("step must be positive, got {step}")));
    }
    let l = |t: [f64; 2]| model.melnikov_field(t, set).potential;
    let gx = (l([theta[0] + step, theta[1]]) - l([theta[0] - step, theta[1]])) / (2.0 * step);
    let gy = (l([theta[0], theta[1] + step]) - l([theta[0], theta[1] - step])) / (2.0 * step);
    Ok([gx, gy])
}
