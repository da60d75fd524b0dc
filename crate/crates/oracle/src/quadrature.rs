//! Direct quadrature of the Melnikov integral
//! `e^{-rho |k|} int 2 sech^2(t) cos(a t) dt`, `a = <k, omega> / sqrt(eps)`.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::BigInt;
use serde::Serialize;

use ctsplit_core::number_theory::CertifiedReal;
use ctsplit_core::splitting::{canonical, norm1, Harmonic};

use crate::error::{OracleError, OracleResult};

const RM: RoundingMode = RoundingMode::ToEven;

/// Fixed composite rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Gauss-Legendre with this many nodes per panel (order `2m`).
    GaussLegendre(usize),
}

impl Scheme {
    pub fn order(&self) -> usize {
        match self {
            Scheme::GaussLegendre(m) => 2 * m,
        }
    }

    fn nodes(&self) -> usize {
        match self {
            Scheme::GaussLegendre(m) => *m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Half-width of the time window.
    pub t: f64,
    /// Minimum number of panels on `[0, T]`.
    pub n_points: usize,
    pub scheme: Scheme,
    /// Working precision in bits.
    pub precision: usize,
    /// Minimum quadrature nodes per period of `cos(a t)`.
    pub points_per_period: usize,
    /// Relative accuracy requested of the total error.
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            t: 30.0,
            n_points: 16,
            scheme: Scheme::GaussLegendre(16),
            precision: 128,
            points_per_period: 32,
            rel_tol: 1e-8,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> OracleResult<()> {
        let Scheme::GaussLegendre(m) = self.scheme;
        if !(self.t > 0.0 && self.t.is_finite()) || self.n_points < 16 || m == 0 || self.precision < 64 {
            return Err(OracleError::InvalidInput(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    /// Panels used on `[0, T]` for frequency `a`.
    pub fn panels_for(&self, a: f64) -> usize {
        let periods = a.abs() * self.t / std::f64::consts::TAU;
        let by_period = (periods * self.points_per_period as f64 / self.scheme.nodes() as f64).ceil() as usize;
        self.n_points.max(by_period)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub k: Harmonic,
    pub eps: f64,
    /// `a = <k, omega> / sqrt(eps)`.
    pub a: f64,
    /// `int_{-T}^{T} 2 sech^2(t) cos(a t) dt`.
    pub integral: f64,
    /// `ln` of the coefficient `e^{-rho |k|} * integral`.
    pub ln_coefficient: f64,
    /// `|I_n - I_2n| / |I_2n|`.
    pub discretization_error: f64,
    /// `8 e^{-2T} / |I_2n|`, bounding the neglected tails.
    pub tail_bound: f64,
    pub panels: usize,
}

impl QuadratureResult {
    pub fn relative_error(&self) -> f64 {
        self.discretization_error + self.tail_bound
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` at precision `p`.
pub fn gauss_legendre(m: usize, p: usize) -> Vec<(BigFloat, BigFloat)> {
    let one = BigFloat::from_u8(1, p);
    let two = BigFloat::from_u8(2, p);
    let mut out = Vec::with_capacity(m);
    for i in 1..=m {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
        let mut x = BigFloat::from_f64(guess, p);
        let mut dp = one.clone();
        for _ in 0..(p / 16 + 8) {
            let (pm, d) = legendre(m, &x, p);
            let step = pm.div(&d, p, RM);
            x = x.sub(&step, p, RM);
            dp = d;
            if step.is_zero() || step.exponent().is_some_and(|e| e < -(p as i32) - 4) {
                break;
            }
        }
        let (_, d) = legendre(m, &x, p);
        if !d.is_zero() {
            dp = d;
        }
        let w = two.div(
            &one.sub(&x.mul(&x, p, RM), p, RM).mul(&dp.mul(&dp, p, RM), p, RM),
            p,
            RM,
        );
        out.push((x, w));
    }
    out
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre(m: usize, x: &BigFloat, p: usize) -> (BigFloat, BigFloat) {
    let one = BigFloat::from_u8(1, p);
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    for j in 2..=m {
        let jf = BigFloat::from_u64(j as u64, p);
        let a = BigFloat::from_u64(2 * j as u64 - 1, p).mul(x, p, RM).mul(&p1, p, RM);
        let b = BigFloat::from_u64(j as u64 - 1, p).mul(&p0, p, RM);
        let p2 = a.sub(&b, p, RM).div(&jf, p, RM);
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (one, BigFloat::from_u8(0, p));
    }
    // P_m' = m (x P_m - P_{m-1}) / (x^2 - 1)
    let num = x
        .mul(&p1, p, RM)
        .sub(&p0, p, RM)
        .mul(&BigFloat::from_u64(m as u64, p), p, RM);
    let den = x.mul(x, p, RM).sub(&one, p, RM);
    (p1, num.div(&den, p, RM))
}

pub(crate) fn bigint_to_bf(x: &BigInt, p: usize, cc: &mut Consts) -> BigFloat {
    BigFloat::parse(&x.to_string(), astro_float::Radix::Dec, p, RM, cc)
}

pub(crate) fn bf_to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// Midpoint of the enclosure as a multiprecision float.
pub(crate) fn omega_bf(omega: &CertifiedReal, p: usize, cc: &mut Consts) -> BigFloat {
    let mid = omega.midpoint();
    bigint_to_bf(mid.numer(), p, cc).div(&bigint_to_bf(mid.denom(), p, cc), p, RM)
}

/// `int_{t0}^{T} 2 sech^2(t) cos(a t) dt` with `panels` equal panels.
fn window_integral(
    a: &BigFloat,
    t0: f64,
    t: f64,
    panels: usize,
    rule: &[(BigFloat, BigFloat)],
    p: usize,
    cc: &mut Consts,
) -> BigFloat {
    let two = BigFloat::from_u8(2, p);
    let one = BigFloat::from_u8(1, p);
    let eight = BigFloat::from_u8(8, p);
    let start = BigFloat::from_f64(t0, p);
    let h = BigFloat::from_f64(t - t0, p).div(&BigFloat::from_u64(panels as u64, p), p, RM);
    let half_h = h.div(&two, p, RM);
    // offsets x_j = (h/2) u_j within a panel; per-offset factors
    let offsets: Vec<(BigFloat, BigFloat, BigFloat, BigFloat)> = rule
        .iter()
        .map(|(u, w)| {
            let x = half_h.mul(u, p, RM);
            let ax = a.mul(&x, p, RM);
            (
                ax.cos(p, RM, cc),
                ax.sin(p, RM, cc),
                x.mul(&two, p, RM).neg().exp(p, RM, cc),
                w.mul(&half_h, p, RM),
            )
        })
        .collect();
    let mut sum = BigFloat::from_u8(0, p);
    for i in 0..panels {
        let c = start.add(&h.mul(&BigFloat::from_f64(i as f64 + 0.5, p), p, RM), p, RM);
        let ac = a.mul(&c, p, RM);
        let (cc_, sc) = (ac.cos(p, RM, cc), ac.sin(p, RM, cc));
        let ec = c.mul(&two, p, RM).neg().exp(p, RM, cc);
        let mut panel = BigFloat::from_u8(0, p);
        for (cx, sx, ex, w) in &offsets {
            // cos(a (c + x)) and e^{-2 (c + x)}
            let cosv = cc_.mul(cx, p, RM).sub(&sc.mul(sx, p, RM), p, RM);
            let e = ec.mul(ex, p, RM);
            let den = one.add(&e, p, RM);
            // 2 sech^2 t = 8 e^{-2t} / (1 + e^{-2t})^2
            let f = eight.mul(&e, p, RM).div(&den.mul(&den, p, RM), p, RM);
            panel = panel.add(&w.mul(&f.mul(&cosv, p, RM), p, RM), p, RM);
        }
        sum = sum.add(&panel, p, RM);
    }
    sum
}

/// Quadrature of the Melnikov coefficient of `k` with an honest error report.
pub fn quadrature_melnikov_coefficient(
    k: Harmonic,
    rho: f64,
    eps: f64,
    omega: &CertifiedReal,
    spec: &QuadratureSpec,
) -> OracleResult<QuadratureResult> {
    spec.validate()?;
    if !(eps > 0.0 && rho > 0.0) {
        return Err(OracleError::InvalidInput(format!(
            "need eps > 0 and rho > 0, got {eps}, {rho}"
        )));
    }
    let k = canonical(k)?;
    let p = spec.precision;
    let mut cc = Consts::new().map_err(|e| OracleError::InvalidInput(format!("{e:?}")))?;
    let w = omega_bf(omega, p, &mut cc);
    let d = BigFloat::from_i128(k[0], p).add(&BigFloat::from_i128(k[1], p).mul(&w, p, RM), p, RM);
    let a = d.div(&BigFloat::from_f64(eps, p).sqrt(p, RM), p, RM).abs();
    let af = bf_to_f64(&a);
    integrate(k, rho, eps, a, af, spec, &mut cc)
}

/// Quadrature at a given frequency `a`, with `rho |k| = 0`.
pub fn quadrature_at_frequency(a: f64, spec: &QuadratureSpec) -> OracleResult<QuadratureResult> {
    spec.validate()?;
    let mut cc = Consts::new().map_err(|e| OracleError::InvalidInput(format!("{e:?}")))?;
    let abf = BigFloat::from_f64(a.abs(), spec.precision);
    integrate([0, 0], 0.0, 1.0, abf, a.abs(), spec, &mut cc)
}

fn integrate(
    k: Harmonic,
    rho: f64,
    eps: f64,
    a: BigFloat,
    af: f64,
    spec: &QuadratureSpec,
    cc: &mut Consts,
) -> OracleResult<QuadratureResult> {
    let p = spec.precision;
    let rule = gauss_legendre(spec.scheme.nodes(), p);
    let n = spec.panels_for(af);
    let two = BigFloat::from_u8(2, p);
    let coarse = window_integral(&a, 0.0, spec.t, n, &rule, p, cc).mul(&two, p, RM);
    let fine = window_integral(&a, 0.0, spec.t, 2 * n, &rule, p, cc).mul(&two, p, RM);
    let diff = bf_to_f64(&coarse.sub(&fine, p, RM).div(&fine, p, RM)).abs();
    let integral = bf_to_f64(&fine);
    let tail = 8.0 * (-2.0 * spec.t).exp() / integral.abs();
    let res = QuadratureResult {
        k,
        eps,
        a: af,
        integral,
        ln_coefficient: integral.ln() - rho * if k == [0, 0] { 0.0 } else { norm1(k) },
        discretization_error: diff,
        tail_bound: tail,
        panels: 2 * n,
    };
    if res.relative_error().is_nan() || res.relative_error() > spec.rel_tol {
        let t_needed = ((8.0 / (0.1 * spec.rel_tol * integral.abs())).ln() / 2.0)
            .max(spec.t)
            .ceil();
        let mut suggestion = *spec;
        suggestion.t = t_needed;
        if diff > 0.5 * spec.rel_tol {
            suggestion.n_points = 4 * spec.n_points.max(n);
        }
        return Err(OracleError::Unresolved {
            achieved: res.relative_error(),
            requested: spec.rel_tol,
            suggestion: format!("T = {}, n_points = {}", suggestion.t, suggestion.n_points),
        });
    }
    Ok(res)
}

/// Observed convergence order `log2((I_n - I_2n) / (I_2n - I_4n))` of the
/// composite rule on `[1/2, T]` at frequency `a`. The window starts off the
/// symmetry point, where the odd derivatives of the integrand would vanish
/// and hide the nominal order.
pub fn observed_order(a: f64, spec: &QuadratureSpec, n: usize) -> OracleResult<f64> {
    spec.validate()?;
    let p = spec.precision;
    let mut cc = Consts::new().map_err(|e| OracleError::InvalidInput(format!("{e:?}")))?;
    let rule = gauss_legendre(spec.scheme.nodes(), p);
    let abf = BigFloat::from_f64(a, p);
    let mut level = |panels: usize| window_integral(&abf, 0.5, spec.t, panels, &rule, p, &mut cc);
    let (i1, i2, i4) = (level(n), level(2 * n), level(4 * n));
    let d1 = bf_to_f64(&i1.sub(&i2, p, RM)).abs();
    let d2 = bf_to_f64(&i2.sub(&i4, p, RM)).abs();
    Ok((d1 / d2).log2())
}
