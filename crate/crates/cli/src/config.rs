//! Run configuration: TOML file, command-line flags (which win) and the
//! output directory from the environment.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use ctsplit_core::number_theory::{parse_rational, OmegaSpec};
use ctsplit_core::splitting::{EpsWindow, PhasePolicy};

use crate::error::{CliError, CliResult};

pub const OUT_ENV: &str = "CTSPLIT_OUT";
pub const DEFAULT_DEPTH: usize = 60;
pub const DEFAULT_GRID_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Zero,
    Random,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Frequency ratio: shallit | golden | quotients <a1,a2,...> |
    /// periodic <pre/period or period> | enclosure <lo> <hi>
    #[arg(long, num_args = 1..=3, value_name = "KIND [ARGS]")]
    pub omega: Option<Vec<String>>,
    /// Truncation order of the Shallit series (escalated automatically when absent)
    #[arg(long = "K", value_name = "K")]
    pub k: Option<u32>,
    /// Number of certified partial quotients to analyse
    #[arg(long)]
    pub depth: Option<usize>,
    /// Analyticity width rho
    #[arg(long)]
    pub rho: Option<f64>,
    /// Exponent p in mu = eps^p
    #[arg(long = "p", value_name = "P")]
    pub p_exponent: Option<f64>,
    #[arg(long, value_enum)]
    pub phases: Option<PhaseKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eps_min: Option<f64>,
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Asymptotic eps window as "min,max"
    #[arg(long, value_name = "MIN,MAX")]
    pub window: Option<String>,
    /// Output directory (default: $CTSPLIT_OUT, else no files)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML configuration file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub omega: OmegaSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub window: WindowSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSection {
    pub kind: Option<String>,
    #[serde(rename = "K")]
    pub k: Option<u32>,
    pub quotients: Option<Vec<u64>>,
    pub preperiod: Option<Vec<u64>>,
    pub period: Option<Vec<u64>>,
    pub lo: Option<String>,
    pub hi: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub depth: Option<usize>,
    pub rho: Option<f64>,
    pub p: Option<f64>,
    pub phases: Option<PhaseKind>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// How `omega` is specified, before resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OmegaInput {
    Shallit {
        #[serde(rename = "K")]
        k: Option<u32>,
    },
    Golden,
    Quotients {
        quotients: Vec<u64>,
    },
    Periodic {
        preperiod: Vec<u64>,
        period: Vec<u64>,
    },
    Enclosure {
        lo: String,
        hi: String,
    },
}

impl OmegaInput {
    pub fn to_spec(&self, k: u32) -> CliResult<OmegaSpec> {
        Ok(match self {
            OmegaInput::Shallit { .. } => OmegaSpec::Shallit { truncation: k },
            OmegaInput::Golden => OmegaSpec::Golden,
            OmegaInput::Quotients { quotients } => OmegaSpec::Quotients(quotients.clone()),
            OmegaInput::Periodic { preperiod, period } => OmegaSpec::Periodic {
                preperiod: preperiod.clone(),
                period: period.clone(),
            },
            OmegaInput::Enclosure { lo, hi } => OmegaSpec::Enclosure {
                lo: parse_rational(lo)?,
                hi: parse_rational(hi)?,
            },
        })
    }
}

/// Log-spaced grid request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRequest {
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub points: usize,
}

/// Fully merged configuration. Grid and window entries left `None` take
/// defaults that depend on the resolved frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub omega: OmegaInput,
    pub depth: usize,
    pub rho: f64,
    pub p_exponent: f64,
    pub phases: PhasePolicy,
    pub grid: GridRequest,
    pub window: Option<EpsWindow>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_list(s: &str) -> CliResult<Vec<u64>> {
    s.split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| usage(format!("bad partial quotient {t:?}")))
        })
        .collect()
}

fn parse_omega_flag(values: &[String], k: Option<u32>) -> CliResult<OmegaInput> {
    let kind = values[0].to_ascii_lowercase();
    let rest = &values[1..];
    let want = |n: usize| {
        if rest.len() == n {
            Ok(())
        } else {
            Err(usage(format!(
                "--omega {kind} takes {n} argument(s), got {}",
                rest.len()
            )))
        }
    };
    Ok(match kind.as_str() {
        "shallit" => {
            want(0)?;
            OmegaInput::Shallit { k }
        }
        "golden" => {
            want(0)?;
            OmegaInput::Golden
        }
        "quotients" => {
            want(1)?;
            OmegaInput::Quotients {
                quotients: parse_list(&rest[0])?,
            }
        }
        "periodic" => {
            want(1)?;
            let (pre, per) = rest[0].split_once('/').unwrap_or(("", &rest[0]));
            OmegaInput::Periodic {
                preperiod: parse_list(pre)?,
                period: parse_list(per)?,
            }
        }
        "enclosure" => {
            want(2)?;
            OmegaInput::Enclosure {
                lo: rest[0].clone(),
                hi: rest[1].clone(),
            }
        }
        other => return Err(usage(format!("unknown --omega kind {other:?}"))),
    })
}

fn omega_from_file(s: &OmegaSection, k: Option<u32>) -> CliResult<Option<OmegaInput>> {
    let Some(kind) = &s.kind else { return Ok(None) };
    let missing = |what: &str| usage(format!("[omega] kind = {kind:?} needs {what}"));
    Ok(Some(match kind.to_ascii_lowercase().as_str() {
        "shallit" => OmegaInput::Shallit { k },
        "golden" => OmegaInput::Golden,
        "quotients" => OmegaInput::Quotients {
            quotients: s.quotients.clone().ok_or_else(|| missing("quotients"))?,
        },
        "periodic" => OmegaInput::Periodic {
            preperiod: s.preperiod.clone().unwrap_or_default(),
            period: s.period.clone().ok_or_else(|| missing("period"))?,
        },
        "enclosure" => OmegaInput::Enclosure {
            lo: s.lo.clone().ok_or_else(|| missing("lo"))?,
            hi: s.hi.clone().ok_or_else(|| missing("hi"))?,
        },
        other => return Err(usage(format!("unknown omega kind {other:?} in config file"))),
    }))
}

pub fn load_file(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

fn parse_window(s: &str) -> CliResult<EpsWindow> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| usage(format!("--window expects MIN,MAX, got {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("bad number {t:?} in --window")))
    };
    Ok(EpsWindow::new(parse(a)?, parse(b)?)?)
}

impl RunConfig {
    /// Merges file values, flags and the environment.
    pub fn resolve(args: &CommonArgs, env_out: Option<PathBuf>) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => load_file(p)?,
            None => FileConfig::default(),
        };
        let k = args.k.or(file.omega.k);
        let omega = match &args.omega {
            Some(v) => parse_omega_flag(v, k)?,
            None => omega_from_file(&file.omega, k)?.unwrap_or(OmegaInput::Shallit { k }),
        };
        if args.k.is_some() && !matches!(omega, OmegaInput::Shallit { .. }) {
            return Err(usage("--K only applies to --omega shallit"));
        }
        let depth = args.depth.or(file.model.depth).unwrap_or(DEFAULT_DEPTH);
        if depth < 5 {
            return Err(usage(format!("--depth must be at least 5, got {depth}")));
        }
        let rho = args.rho.or(file.model.rho).unwrap_or(1.0);
        let p_exponent = args.p_exponent.or(file.model.p).unwrap_or(3.5);
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(usage(format!("--rho must be positive, got {rho}")));
        }
        if !(p_exponent > 3.0 && p_exponent.is_finite()) {
            return Err(usage(format!("--p must exceed 3, got {p_exponent}")));
        }
        let seed = args.seed.or(file.model.seed).unwrap_or(0);
        let phases = match args.phases.or(file.model.phases).unwrap_or(PhaseKind::Zero) {
            PhaseKind::Zero => PhasePolicy::Zero,
            PhaseKind::Random => PhasePolicy::Random { seed },
        };
        let grid = GridRequest {
            eps_min: args.eps_min.or(file.grid.eps_min),
            eps_max: args.eps_max.or(file.grid.eps_max),
            points: args.grid_points.or(file.grid.points).unwrap_or(DEFAULT_GRID_POINTS),
        };
        if grid.points < 2 {
            return Err(usage(format!("--grid-points must be at least 2, got {}", grid.points)));
        }
        if let (Some(a), Some(b)) = (grid.eps_min, grid.eps_max) {
            if !(a > 0.0 && a < b) {
                return Err(usage(format!("grid needs 0 < eps-min < eps-max, got {a}, {b}")));
            }
        }
        let window = match &args.window {
            Some(w) => Some(parse_window(w)?),
            None => match (file.window.eps_min, file.window.eps_max) {
                (Some(a), Some(b)) => Some(EpsWindow::new(a, b)?),
                (None, None) => None,
                _ => return Err(usage("[window] needs both eps_min and eps_max")),
            },
        };
        Ok(Self {
            omega,
            depth,
            rho,
            p_exponent,
            phases,
            grid,
            window,
            out: args.out.clone().or(file.output.dir).or(env_out),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(omega: &[&str]) -> CommonArgs {
        CommonArgs {
            omega: Some(omega.iter().map(|s| s.to_string()).collect()),
            ..CommonArgs::default()
        }
    }

    #[test]
    fn omega_flag_forms() {
        let c = RunConfig::resolve(&args(&["periodic", "3/1,2"]), None).unwrap();
        assert_eq!(
            c.omega,
            OmegaInput::Periodic {
                preperiod: vec![3],
                period: vec![1, 2]
            }
        );
        let c = RunConfig::resolve(&args(&["enclosure", "0.63", "0.64"]), None).unwrap();
        assert!(matches!(c.omega, OmegaInput::Enclosure { .. }));
        assert!(RunConfig::resolve(&args(&["golden", "1"]), None).is_err());
        assert!(RunConfig::resolve(&args(&["pi"]), None).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "[omega]\nkind = \"golden\"\n[model]\nrho = 2.0\ndepth = 30\n[window]\neps_min = 1e-9\neps_max = 1e-4\n",
        )
        .unwrap();
        let mut a = CommonArgs {
            config: Some(path.clone()),
            ..CommonArgs::default()
        };
        a.depth = Some(40);
        let c = RunConfig::resolve(&a, Some(PathBuf::from("/env"))).unwrap();
        assert_eq!(c.omega, OmegaInput::Golden);
        assert_eq!(c.depth, 40);
        assert_eq!(c.rho, 2.0);
        assert_eq!(c.window, Some(EpsWindow { min: 1e-9, max: 1e-4 }));
        assert_eq!(c.out, Some(PathBuf::from("/env")));
        std::fs::write(&path, "[model]\nrhoo = 2.0\n").unwrap();
        assert!(RunConfig::resolve(&a, None).is_err());
    }

    #[test]
    fn invariants_enforced() {
        let a = CommonArgs {
            depth: Some(4),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve(&a, None).is_err());
        let a = CommonArgs {
            p_exponent: Some(3.0),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve(&a, None).is_err());
        let a = CommonArgs {
            grid_points: Some(1),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve(&a, None).is_err());
        let mut a = args(&["golden"]);
        a.k = Some(6);
        assert!(RunConfig::resolve(&a, None).is_err());
    }
}
