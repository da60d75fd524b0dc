//! The `cf`, `constants`, `scan` and `bound` subcommands.

use std::fmt::Write;

use num_rational::BigRational;
use serde::Serialize;

use ctsplit_core::number_theory::{convergents, gamma_numerator, nu_numerator, rational_to_f64, Convergent};
use ctsplit_core::splitting::{ConstantsBundle, LowerBound, ScanTable, Truncation};

use crate::analysis::Analysis;
use crate::error::CliResult;
use crate::output::{num, Sink};

fn header(a: &Analysis, out: &mut String) {
    let om = a.freq.omega();
    let w = om.width();
    let width = match rational_to_f64(&w) {
        x if x > 0.0 => format!("{x:.1e}"),
        _ => format!("~2^{}", w.numer().bits() as i64 - w.denom().bits() as i64),
    };
    let _ = writeln!(
        out,
        "omega: {} = {:.17} (enclosure width {width})",
        a.freq.spec(),
        a.freq.to_f64(),
    );
}

#[derive(Serialize)]
struct CfRow {
    n: i64,
    a_n: u64,
    p_n: String,
    q_n: String,
    nu_q: f64,
    gamma_v: Option<f64>,
}

fn cf_row(c: &Convergent, a_n: u64, a: &Analysis) -> CliResult<CfRow> {
    let nu = nu_numerator(&c.q, a.freq.omega())?;
    let gamma = match (i128::try_from(&c.p), i128::try_from(&c.q)) {
        (Ok(p), Ok(q)) => Some(gamma_numerator([-p, q], a.freq.omega())?.to_f64()),
        _ => None,
    };
    Ok(CfRow {
        n: c.n,
        a_n,
        p_n: c.p.to_string(),
        q_n: c.q.to_string(),
        nu_q: nu.value.to_f64(),
        gamma_v: gamma,
    })
}

pub fn cf(a: &Analysis) -> CliResult<String> {
    let depth = a.config.depth;
    let pq = a.freq.quotients();
    let quotients = &pq.quotients()[..depth];
    let conv = convergents(pq, depth)?;
    let rows: Vec<CfRow> = conv[2..]
        .iter()
        .zip(quotients)
        .map(|(c, &q)| cf_row(c, q, a))
        .collect::<CliResult<_>>()?;
    let mut out = String::new();
    header(a, &mut out);
    let _ = writeln!(
        out,
        "certified partial quotients: {} (showing {depth})",
        pq.certified_depth()
    );
    let line: Vec<String> = quotients.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "quotients: {}", line.join(" "));
    let _ = writeln!(
        out,
        "{:>4} {:>4} {:>22} {:>22} {:>12} {:>12}  v(n)",
        "n", "a_n", "p_n", "q_n", "nu_q", "gamma_v(n)"
    );
    for r in &rows {
        let g = r.gamma_v.map_or("-".to_string(), |g| format!("{g:.6}"));
        let _ = writeln!(
            out,
            "{:>4} {:>4} {:>22} {:>22} {:>12.6} {:>12}  (-{}, {})",
            r.n, r.a_n, r.p_n, r.q_n, r.nu_q, g, r.p_n, r.q_n
        );
    }
    let sink = Sink::new("cf", &a.config)?;
    let cols: Vec<String> = ["n", "a_n", "p_n", "q_n", "v_k1", "v_k2", "nu_q", "gamma_v"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.a_n.to_string(),
                r.p_n.clone(),
                r.q_n.clone(),
                format!("-{}", r.p_n).replace("--", ""),
                r.q_n.clone(),
                num(r.nu_q),
                r.gamma_v.map_or(String::new(), num),
            ]
        })
        .collect();
    sink.csv("cf.csv", &[], &cols, &table)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        omega: String,
        omega_lo: String,
        omega_hi: String,
        certified_depth: usize,
        quotients: &'a [u64],
        rows: &'a [CfRow],
    }
    let om = a.freq.omega();
    let show = |x: &BigRational| x.to_string();
    sink.json(
        "cf.json",
        &Summary {
            omega: a.freq.spec().to_string(),
            omega_lo: show(om.lo()),
            omega_hi: show(om.hi()),
            certified_depth: pq.certified_depth(),
            quotients,
            rows: &rows,
        },
    )?;
    Ok(out)
}

fn constants_text(c: &ConstantsBundle, out: &mut String) {
    let _ = writeln!(
        out,
        "C0 = {:.6}  D0 = {:.6}  B = {:.6}  C = C0*B = {:.6}  (rho = {})",
        c.c0, c.d0, c.b, c.c, c.rho
    );
}

pub fn constants(a: &Analysis) -> CliResult<String> {
    let l = &a.limits;
    let c = a.model.constants();
    let mut out = String::new();
    header(a, &mut out);
    let _ = writeln!(
        out,
        "window: n in [{}, {}] (argmin n = {}, argmax n = {})",
        l.window.start, l.window.end, l.argmin, l.argmax
    );
    let _ = writeln!(
        out,
        "nu* = {:.6}  limsup nu = {:.6}  gamma* = {:.6}",
        l.nu_star_est, l.nu_limsup_est, l.gamma_star_est
    );
    let _ = writeln!(out, "M = {}  E = {:.6}", l.m, l.e);
    constants_text(c, &mut out);
    let sink = Sink::new("constants", &a.config)?;
    sink.json("constants.json", &serde_json::json!({ "limits": l, "constants": c }))?;
    Ok(out)
}

/// Runs the `h1` scan; also used by the acceptance suite.
pub fn scan_table(a: &Analysis) -> CliResult<ScanTable> {
    Ok(a.model.h1_scan(&a.eps_grid()?, a.window)?)
}

pub fn scan(a: &Analysis) -> CliResult<String> {
    let t = scan_table(a)?;
    let c = a.model.constants();
    let sink = Sink::new("scan", &a.config)?;
    let mut cols: Vec<String> = [
        "log10_eps",
        "h1",
        "h2",
        "S_k1",
        "S_k2",
        "S_is_convergent",
        "h1_hat",
        "h1_hat_plus",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(t.columns.iter().map(|n| format!("g_hat_{n}")));
    cols.extend(t.columns.iter().map(|n| format!("g_hat_plus_{n}")));
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut v = vec![
                num(r.eps.log10()),
                num(r.h1),
                num(r.h2),
                r.s[0].to_string(),
                r.s[1].to_string(),
                r.s_is_convergent.to_string(),
                num(r.h1_hat),
                num(r.h1_hat_plus),
            ];
            v.extend(r.g_hat.iter().map(|&x| num(x)));
            v.extend(r.g_hat_plus.iter().map(|&x| num(x)));
            v
        })
        .collect();
    let comments = vec![format!("window: eps in [{:e}, {:e}]", t.window.min, t.window.max)];
    sink.csv("scan.csv", &comments, &cols, &rows)?;
    let minima = a
        .model
        .entries()
        .iter()
        .filter(|e| e.n >= 0 && t.window.contains(e.profile.eps_k))
        .count();
    let non_convergent = t.rows.iter().filter(|r| !r.s_is_convergent).count();
    sink.json(
        "scan_summary.json",
        &serde_json::json!({
            "window": t.window,
            "grid": a.grid,
            "grid_points": t.rows.len(),
            "constants": c,
            "limits": a.limits,
            "B_num": t.b_num,
            "B_num_eps": t.b_num_eps,
            "convergent_minima_in_window": minima,
            "rows_with_non_convergent_S": non_convergent,
            "columns": t.columns,
        }),
    )?;
    let mut out = String::new();
    header(a, &mut out);
    let _ = writeln!(
        out,
        "grid: {} points, eps in [{:e}, {:e}]",
        t.rows.len(),
        a.grid.min,
        a.grid.max
    );
    let _ = writeln!(
        out,
        "window: eps in [{:e}, {:e}] ({minima} convergent minima)",
        t.window.min, t.window.max
    );
    let _ = writeln!(out, "E = {:.6}  M = {}  B = {:.6}", c.e, c.m, c.b);
    match (t.b_num, t.b_num_eps) {
        (Some(b), Some(e)) => {
            let _ = writeln!(out, "B_num = {b:.6} (max of h1 over the window, at eps = {e:e})");
        }
        _ => {
            let _ = writeln!(out, "B_num: no grid point inside the window");
        }
    }
    let _ = writeln!(out, "rows with a non-convergent dominant harmonic: {non_convergent}");
    if let Some(d) = sink.dir() {
        let _ = writeln!(out, "wrote {}", d.join("scan.csv").display());
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub eps: f64,
    pub h1: f64,
    #[serde(flatten)]
    pub bound: LowerBound,
    pub spillover: f64,
    pub in_window: bool,
}

pub fn bound_rows(a: &Analysis, eps: &[f64]) -> CliResult<Vec<BoundRow>> {
    eps.iter()
        .map(|&e| {
            let lb = a.model.lower_bound_estimate(e)?;
            let ss = a.model.second_sum_estimate(e, &Truncation::default())?;
            Ok(BoundRow {
                eps: e,
                h1: lb.h1,
                bound: lb,
                spillover: ss.ratio,
                in_window: a.window.contains(e),
            })
        })
        .collect()
}

pub fn bound(a: &Analysis, eps: Option<&[f64]>) -> CliResult<String> {
    let eps = match eps {
        Some(e) => e.to_vec(),
        None => a.window.log_grid(10)?,
    };
    let rows = bound_rows(a, &eps)?;
    let sink = Sink::new("bound", &a.config)?;
    let cols: Vec<String> = [
        "log10_eps",
        "h1",
        "S_k1",
        "S_k2",
        "mu_mantissa",
        "mu_exp10",
        "estimate_mantissa",
        "estimate_exp10",
        "floor_mantissa",
        "floor_exp10",
        "dominant_mantissa",
        "dominant_exp10",
        "spillover",
        "in_window",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let b = &r.bound;
            let dom = ctsplit_core::sci::LogMagnitude(b.ln_dominant_term).scientific();
            vec![
                num(r.eps.log10()),
                num(r.h1),
                b.s[0].to_string(),
                b.s[1].to_string(),
                num(b.mu.mantissa),
                b.mu.exponent.to_string(),
                num(b.estimate.mantissa),
                b.estimate.exponent.to_string(),
                num(b.floor.mantissa),
                b.floor.exponent.to_string(),
                num(dom.mantissa),
                dom.exponent.to_string(),
                num(r.spillover),
                r.in_window.to_string(),
            ]
        })
        .collect();
    let comments = vec![format!("window: eps in [{:e}, {:e}]", a.window.min, a.window.max)];
    sink.csv("bound.csv", &comments, &cols, &table)?;
    sink.json(
        "bound.json",
        &serde_json::json!({ "window": a.window, "constants": a.model.constants(), "rows": rows }),
    )?;
    let mut out = String::new();
    header(a, &mut out);
    constants_text(a.model.constants(), &mut out);
    let _ = writeln!(
        out,
        "{:>12} {:>9} {:>36} {:>12} {:>26} {:>26} {:>10}",
        "eps", "h1", "S", "mu", "estimate", "floor", "spillover"
    );
    let sci = |s: &ctsplit_core::sci::Scientific| format!("{:.4}e{}", s.mantissa, s.exponent);
    for r in &rows {
        let b = &r.bound;
        let _ = writeln!(
            out,
            "{:>12.4e} {:>9.6} {:>36} {:>12} {:>26} {:>26} {:>10.3e}{}",
            r.eps,
            r.h1,
            format!("({}, {})", b.s[0], b.s[1]),
            sci(&b.mu),
            sci(&b.estimate),
            sci(&b.floor),
            r.spillover,
            if r.in_window { "" } else { "  (outside window)" }
        );
    }
    Ok(out)
}
