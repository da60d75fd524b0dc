use rayon::prelude::*;
use serde::Serialize;

use super::constants::HarmonicProfile;
use super::field::Truncation;
use super::model::{Candidate, SplittingModel};
use super::Harmonic;
use crate::error::{Error, Result};

/// Relative gap below which two values of `g` are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// The first and second minima of `g_k(eps)` and where they are attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceReport {
    pub eps: f64,
    #[serde(rename = "S")]
    pub s: Harmonic,
    pub h1: f64,
    pub h2: f64,
    pub runner_up: Harmonic,
    /// The runner-up ties with `S` within the tie tolerance.
    pub tied: bool,
    #[serde(rename = "S_is_convergent")]
    pub s_is_convergent: bool,
    /// `n` with `S = v(n)`.
    pub s_convergent_index: Option<i64>,
    /// Largest `|k|_1` the certified search had to consider.
    pub cutoff_norm: f64,
    pub candidates: usize,
    /// `sum_{k != S} |k| L_k / (|S| L_S)`, tail bound included.
    pub spillover: f64,
}

/// Result of the certified search before the spillover is attached.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Dominance {
    pub s: Candidate,
    pub runner_up: Candidate,
    pub h1: f64,
    pub h2: f64,
    pub tied: bool,
    pub cutoff_norm: f64,
    pub candidates: usize,
}

/// Closed range of `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct EpsWindow {
    pub min: f64,
    pub max: f64,
}

impl EpsWindow {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eps window needs 0 < min < max, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, eps: f64) -> bool {
        self.min <= eps && eps <= self.max
    }

    /// `count` log-spaced points from `min` to `max`, both included.
    pub fn log_grid(&self, count: usize) -> Result<Vec<f64>> {
        if count < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 points, got {count}"
            )));
        }
        let (a, b) = (self.min.ln(), self.max.ln());
        Ok((0..count)
            .map(|i| match i {
                0 => self.min,
                i if i == count - 1 => self.max,
                i => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
            })
            .collect())
    }
}

/// One row of an `h1` scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub eps: f64,
    pub h1: f64,
    pub h2: f64,
    #[serde(rename = "S")]
    pub s: Harmonic,
    #[serde(rename = "S_is_convergent")]
    pub s_is_convergent: bool,
    pub h1_hat: f64,
    pub h1_hat_plus: f64,
    /// `g_{v(n)}(eps)` for the table's columns.
    pub g_hat: Vec<f64>,
    /// `G(eps; eps_{v(n)}, E^2)` for the table's columns.
    pub g_hat_plus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    /// Convergent indices `n` of the per-n columns.
    pub columns: Vec<i64>,
    pub rows: Vec<ScanRow>,
    pub window: EpsWindow,
    /// Maximum of `h1` over grid points inside the window.
    pub b_num: Option<f64>,
    pub b_num_eps: Option<f64>,
}

impl SplittingModel {
    /// Default asymptotic window `[eps_{v(N)}, eps_{v(5)}]`.
    pub fn default_window(&self) -> Result<EpsWindow> {
        let lo = self.min_eps();
        let hi = self
            .entry(5)
            .ok_or(Error::InsufficientDepth {
                required: 5,
                available: self.depth(),
            })?
            .profile
            .eps_k;
        EpsWindow::new(lo, hi)
    }

    /// Depth needed for `eps` to lie above `eps_{v(N)}`, extrapolating the
    /// geometric decay of the tabulated `eps_{v(n)}`.
    fn required_depth(&self, eps: f64) -> usize {
        let e = self.entries();
        let last = e.len() - 1;
        let back = last.clamp(1, 10);
        let rate = (e[last - back].profile.ln_eps_k - e[last].profile.ln_eps_k) / back as f64;
        let extra = if rate > 0.0 {
            ((e[last].profile.ln_eps_k - eps.ln()) / rate).ceil().max(1.0) as usize
        } else {
            1
        };
        self.depth() + extra
    }

    pub(crate) fn dominance(&self, eps: f64) -> Result<Dominance> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        if eps < self.min_eps() * (1.0 - 1e-12) {
            return Err(Error::InsufficientDepth {
                required: self.required_depth(eps),
                available: self.depth(),
            });
        }
        let rho = self.params().rho;
        let mut betas: Vec<f64> = self.entries().iter().map(|e| e.profile.beta(eps, rho)).collect();
        betas.sort_by(f64::total_cmp);
        let bound = betas[1] * (1.0 + 1e-12);
        let mut found = self.ball(eps, bound)?;
        let candidates = found.len();
        if candidates < 2 {
            return Err(Error::InvalidInput(format!(
                "lattice search at eps = {eps} found fewer than two harmonics"
            )));
        }
        let g: Vec<f64> = found.iter().map(|c| c.profile.g(eps)).collect();
        let h_min = g.iter().copied().fold(f64::INFINITY, f64::min);
        // among near-ties prefer the smaller |k|, then the lexicographically smaller k
        let key = |c: &Candidate| (c.profile.norm, c.profile.k);
        let si = (0..found.len())
            .filter(|&i| g[i] <= h_min * (1.0 + TIE_TOLERANCE))
            .min_by(|&a, &b| key(&found[a]).partial_cmp(&key(&found[b])).unwrap())
            .unwrap();
        let s = found.swap_remove(si);
        let h1 = g[si];
        let mut g = g;
        g.swap_remove(si);
        let ri = (0..found.len())
            .min_by(|&a, &b| {
                g[a].total_cmp(&g[b])
                    .then(key(&found[a]).partial_cmp(&key(&found[b])).unwrap())
            })
            .unwrap();
        let runner_up = found[ri];
        let h2 = g[ri];
        Ok(Dominance {
            s,
            runner_up,
            h1: h1.min(h2),
            h2: h2.max(h1),
            tied: (h2 - h1).abs() <= TIE_TOLERANCE * h1,
            cutoff_norm: bound / rho,
            candidates,
        })
    }

    /// Certified global minimizer of `g_k(eps)` over `k != 0`.
    pub fn dominant_harmonics(&self, eps: f64) -> Result<DominanceReport> {
        let d = self.dominance(eps)?;
        let spill = self.second_sum_estimate(eps, &Truncation::default())?;
        let idx = self.convergent_index(d.s.profile.k);
        Ok(DominanceReport {
            eps,
            s: d.s.profile.k,
            h1: d.h1,
            h2: d.h2,
            runner_up: d.runner_up.profile.k,
            tied: d.tied,
            s_is_convergent: idx.is_some(),
            s_convergent_index: idx,
            cutoff_norm: d.cutoff_norm,
            candidates: d.candidates,
            spillover: spill.ratio,
        })
    }

    /// Convergent indices whose `eps_{v(n)}` is within `(EM)^4` of `[lo, hi]`.
    fn visible_columns(&self, lo: f64, hi: f64) -> Vec<i64> {
        let c = self.constants();
        let spread = (c.e * c.m as f64).powi(4);
        self.entries()
            .iter()
            .filter(|e| e.n >= 0 && e.profile.eps_k >= lo / spread && e.profile.eps_k <= hi * spread)
            .map(|e| e.n)
            .collect()
    }

    /// Evaluates `h1`, `h2`, `S` and the convergent envelopes on `grid`,
    /// and the maximum of `h1` over grid points inside `window`.
    pub fn h1_scan(&self, grid: &[f64], window: EpsWindow) -> Result<ScanTable> {
        if grid.is_empty() {
            return Err(Error::InvalidInput("empty eps grid".into()));
        }
        let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = grid.iter().copied().fold(0.0, f64::max);
        let columns = self.visible_columns(lo, hi);
        let c = *self.constants();
        let convergents: Vec<&HarmonicProfile> =
            self.entries().iter().filter(|e| e.n >= 0).map(|e| &e.profile).collect();
        let rows = grid
            .par_iter()
            .map(|&eps| {
                let d = self.dominance(eps)?;
                let h1_hat = convergents.iter().map(|p| p.g(eps)).fold(f64::INFINITY, f64::min);
                let h1_hat_plus = convergents
                    .iter()
                    .map(|p| p.g_plus(eps, &c))
                    .fold(f64::INFINITY, f64::min);
                let col = |n: &i64| &self.entry(*n).expect("column from table").profile;
                Ok(ScanRow {
                    eps,
                    h1: d.h1,
                    h2: d.h2,
                    s: d.s.profile.k,
                    s_is_convergent: self.convergent_index(d.s.profile.k).is_some(),
                    h1_hat,
                    h1_hat_plus,
                    g_hat: columns.iter().map(|n| col(n).g(eps)).collect(),
                    g_hat_plus: columns.iter().map(|n| col(n).g_plus(eps, &c)).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let best = rows
            .iter()
            .filter(|r| window.contains(r.eps))
            .max_by(|a, b| a.h1.total_cmp(&b.h1));
        Ok(ScanTable {
            columns,
            b_num: best.map(|r| r.h1),
            b_num_eps: best.map(|r| r.eps),
            rows,
            window,
        })
    }
}
