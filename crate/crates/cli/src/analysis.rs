//! Resolution of a run configuration into certified data and a model.

use ctsplit_core::number_theory::{estimate_diophantine_limits, DiophantineLimits, Frequency, Window};
use ctsplit_core::splitting::{constants_bundle, EpsWindow, ModelParams, SplittingModel};

use crate::config::{OmegaInput, RunConfig};
use crate::error::{CliError, CliResult};

/// Shallit truncation orders tried when none is given.
const SHALLIT_K_RANGE: std::ops::RangeInclusive<u32> = 6..=24;

pub struct Analysis {
    /// The configuration with every default filled in.
    pub config: RunConfig,
    pub freq: Frequency,
    pub limits: DiophantineLimits,
    pub model: SplittingModel,
    pub window: EpsWindow,
    pub grid: EpsWindow,
}

impl Analysis {
    pub fn build(config: &RunConfig) -> CliResult<Self> {
        match &config.omega {
            OmegaInput::Shallit { k: None } => {
                let mut last = None;
                for k in SHALLIT_K_RANGE {
                    let mut c = config.clone();
                    c.omega = OmegaInput::Shallit { k: Some(k) };
                    match Self::build_exact(c) {
                        Ok(a) => return Ok(a),
                        Err(CliError::Core(e)) if e.is_precision() => last = Some(e),
                        Err(e) => return Err(e),
                    }
                }
                Err(CliError::Core(last.expect("nonempty range")))
            }
            _ => Self::build_exact(config.clone()),
        }
    }

    fn build_exact(mut config: RunConfig) -> CliResult<Self> {
        let k = match config.omega {
            OmegaInput::Shallit { k } => k.unwrap_or(8),
            _ => 0,
        };
        let spec = config.omega.to_spec(k)?;
        let freq = Frequency::resolve(&spec, config.depth)?;
        let limits = estimate_diophantine_limits(freq.quotients(), freq.omega(), Window::upper_half(config.depth)?)?;
        let constants = constants_bundle(&limits, config.rho)?;
        let params = ModelParams::new(config.rho, config.p_exponent, config.phases)?;
        let model = SplittingModel::new(freq.clone(), config.depth, constants, params)?;
        let window = match config.window {
            Some(w) => w,
            None => model.default_window()?,
        };
        config.window = Some(window);
        let grid = EpsWindow::new(
            config.grid.eps_min.unwrap_or(window.min),
            config.grid.eps_max.unwrap_or(window.max),
        )?;
        config.grid.eps_min = Some(grid.min);
        config.grid.eps_max = Some(grid.max);
        Ok(Self {
            config,
            freq,
            limits,
            model,
            window,
            grid,
        })
    }

    pub fn eps_grid(&self) -> CliResult<Vec<f64>> {
        Ok(self.grid.log_grid(self.config.grid.points)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CommonArgs;

    fn args(omega: &[&str]) -> CommonArgs {
        CommonArgs {
            omega: Some(omega.iter().map(|s| s.to_string()).collect()),
            ..CommonArgs::default()
        }
    }

    #[test]
    fn shallit_order_is_escalated_and_recorded() {
        let a = Analysis::build(&RunConfig::resolve(&args(&["shallit"]), None).unwrap()).unwrap();
        let OmegaInput::Shallit { k: Some(k) } = a.config.omega else {
            panic!("K not recorded")
        };
        assert!(SHALLIT_K_RANGE.contains(&k));
        assert_eq!(a.config.window, Some(a.window));
        assert_eq!(a.grid, a.window);
    }

    #[test]
    fn fixed_order_too_small_is_a_precision_error() {
        let mut c = args(&["shallit"]);
        c.k = Some(3);
        let err = Analysis::build(&RunConfig::resolve(&c, None).unwrap()).err().unwrap();
        assert_eq!(err.exit_code(), 3);
    }
}
