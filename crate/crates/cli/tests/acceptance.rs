//! Exit criteria, one line each. Runs as a plain binary so that the report
//! is printed even when every criterion passes.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctsplit_cli::analysis::Analysis;
use ctsplit_cli::config::{CommonArgs, RunConfig};
use ctsplit_cli::verify::canonical_ball;
use ctsplit_core::number_theory::{estimate_diophantine_limits, Frequency, OmegaSpec, Window};
use ctsplit_core::splitting::{norm1, EpsWindow, Truncation};
use ctsplit_oracle::{
    brute_force_nu_scan, finite_difference_gradient, quadrature_melnikov_coefficient, LatticeOracle, QuadratureSpec,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ctsplit(args: &[&str]) -> (String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ctsplit"))
        .args(args)
        .env_remove("CTSPLIT_OUT")
        .output()
        .expect("spawn ctsplit");
    let took = start.elapsed();
    assert!(
        out.status.success(),
        "ctsplit {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (String::from_utf8(out.stdout).unwrap(), took)
}

fn analysis(omega: &str, rho: f64) -> Analysis {
    let args = CommonArgs {
        omega: Some(vec![omega.to_string()]),
        rho: Some(rho),
        ..CommonArgs::default()
    };
    Analysis::build(&RunConfig::resolve(&args, None).unwrap()).unwrap()
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn continued_fraction() -> Outcome {
    let (text, took) = ctsplit(&["cf", "--omega", "shallit", "--depth", "15"]);
    let expected = [1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 1, 2, 1, 1, 1];
    let line = text.lines().find_map(|l| l.strip_prefix("quotients: ")).unwrap_or("");
    let got: Vec<u64> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
    let certified: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("certified partial quotients: "))
        .and_then(|l| l.split_whitespace().next())
        .and_then(|x| x.parse().ok())
        .unwrap_or(0);
    verdict(
        got == expected && certified >= 15 && took < Duration::from_secs(1),
        format!("quotients {got:?}, {certified} certified, {took:.2?}"),
    )
}

fn constants() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (_, took) = ctsplit(&["constants", "--omega", "shallit", "--depth", "60", "--out", out]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("constants.json")).unwrap()).unwrap();
    let c = &json["constants"];
    let (m, e, b) = (
        c["M"].as_u64().unwrap(),
        c["E"].as_f64().unwrap(),
        c["B"].as_f64().unwrap(),
    );
    let w = &json["limits"]["window"];
    let upper_half = w["start"] == 31 && w["end"] == 60;
    verdict(
        m == 3
            && (e - 1.3761).abs() <= 0.005
            && (b - 1.7366).abs() <= 0.005
            && upper_half
            && took < Duration::from_secs(10),
        format!("M = {m}, E = {e:.5}, B = {b:.5}, window {w}, {took:.2?}"),
    )
}

fn b_num() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (_, took) = ctsplit(&["scan", "--omega", "shallit", "--out", out]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan_summary.json")).unwrap()).unwrap();
    let b = json["B_num"].as_f64().unwrap();
    let minima = json["convergent_minima_in_window"].as_u64().unwrap();
    verdict(
        (b - 1.2925).abs() <= 0.01 && minima >= 10 && took < Duration::from_secs(120),
        format!("B_num = {b:.6} over {minima} convergent minima, {took:.2?}"),
    )
}

fn markoff_sandwich() -> Outcome {
    let (lo, hi) = (1.0 / 3.0 - 0.01, 1.0 / 5f64.sqrt() + 0.01);
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in [OmegaSpec::Shallit { truncation: 8 }, OmegaSpec::Golden] {
        let f = Frequency::resolve(&spec, 60).unwrap();
        let l = estimate_diophantine_limits(f.quotients(), f.omega(), Window::upper_half(60).unwrap()).unwrap();
        let inside = (lo..=hi).contains(&l.nu_star_est) && l.nu_limsup_est <= 1.01;
        ok &= inside;
        detail.push(format!(
            "{spec}: nu* = {:.5}, limsup = {:.5}{}",
            l.nu_star_est,
            l.nu_limsup_est,
            if inside { "" } else { " (outside)" }
        ));
    }
    let golden = Frequency::resolve(&OmegaSpec::Golden, 60).unwrap();
    let sweep = brute_force_nu_scan(golden.omega(), 100_000).unwrap();
    let gap = (sweep.window_min - 1.0 / 5f64.sqrt()).abs();
    ok &= gap <= 1e-3;
    detail.push(format!(
        "golden sweep to 1e5: nu* = {:.7} (gap {gap:.1e})",
        sweep.window_min
    ));
    verdict(ok, detail.join("; "))
}

fn residue_oracle() -> Outcome {
    let a = analysis("golden", 1.0);
    let model = &a.model;
    let spec = QuadratureSpec {
        t: 40.0,
        ..QuadratureSpec::default()
    };
    let mut ks: Vec<[i128; 2]> = canonical_ball(10);
    ks.extend((1..=10).map(|k1| [-k1, 0]));
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for eps in [0.1, 1.0] {
        for &k in &ks {
            let q = quadrature_melnikov_coefficient(k, 1.0, eps, a.freq.omega(), &spec).unwrap();
            let closed = model.ln_coefficient(&model.profile(k).unwrap(), eps);
            worst = worst.max((q.ln_coefficient - closed).exp_m1().abs());
            count += 1;
        }
    }
    verdict(
        worst <= 1e-8,
        format!("{count} coefficients, max relative gap {worst:.2e}"),
    )
}

fn lattice_equivalence() -> Outcome {
    const K_MAX: i128 = 500;
    let a = analysis("shallit", 1.0);
    let model = &a.model;
    // sub-window whose dominant harmonics all lie inside the exhaustive scan
    let deepest = model
        .entries()
        .iter()
        .filter(|e| e.n >= 5 && e.profile.norm <= K_MAX as f64)
        .map(|e| e.profile.eps_k)
        .fold(f64::INFINITY, f64::min);
    let window = EpsWindow::new(deepest, a.window.max).unwrap();
    let oracle = LatticeOracle::new(model.constants(), a.freq.omega(), K_MAX).unwrap();
    let mut worst: f64 = 0.0;
    let mut mismatched = 0;
    for eps in window.log_grid(100).unwrap() {
        let d = model.dominant_harmonics(eps).unwrap();
        let b = oracle.min_g(eps);
        if b.argmin != d.s {
            mismatched += 1;
        }
        worst = worst.max((b.min - d.h1).abs() / d.h1);
    }
    verdict(
        mismatched == 0 && worst <= 1e-12,
        format!(
            "eps in [{:.3e}, {:.3e}], {} harmonics scanned: {mismatched} argmin mismatches, max h1 gap {worst:.1e}",
            window.min,
            window.max,
            oracle.len()
        ),
    )
}

fn sandwich() -> Outcome {
    let a = analysis("shallit", 1.0);
    let t = a.model.h1_scan(&a.eps_grid().unwrap(), a.window).unwrap();
    let b = a.model.constants().b;
    let tol = 1e-12;
    let unordered = t
        .rows
        .iter()
        .filter(|r| r.h1 > r.h1_hat * (1.0 + tol) || r.h1_hat > r.h1_hat_plus * (1.0 + tol))
        .count();
    let inside: Vec<f64> = t
        .rows
        .iter()
        .filter(|r| a.window.contains(r.eps))
        .map(|r| r.h1)
        .collect();
    let lo = inside.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    verdict(
        unordered == 0 && !inside.is_empty() && lo >= 0.99 && hi <= b + 0.01,
        format!(
            "{} grid points, {unordered} out of order; h1 in [{lo:.6}, {hi:.6}], B = {b:.6}",
            t.rows.len()
        ),
    )
}

fn gradient() -> Outcome {
    let a = analysis("shallit", 1.0);
    let eps = a.window.max;
    let set = a.model.harmonic_set(eps, &Truncation::TopN(200)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = [
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..std::f64::consts::TAU),
        ];
        let m = a.model.melnikov_field(theta, &set);
        let fd = finite_difference_gradient(&a.model, &set, theta, 1e-6).unwrap();
        let err = (fd[0] - m.gradient[0]).abs() + (fd[1] - m.gradient[1]).abs();
        worst = worst.max(err / m.gradient_norm());
    }
    let max_norm = set.terms.iter().map(|t| t.norm).fold(0.0, f64::max);
    verdict(
        worst <= 1e-6 && set.terms.len() == 200,
        format!("eps = {eps:.3e}, 200 harmonics up to |k|_1 = {max_norm}, max relative error {worst:.2e}"),
    )
}

fn dominance_of_gradient() -> Outcome {
    const N: u64 = 512;
    let a = analysis("shallit", 1.0);
    let mut ok = true;
    let mut worst_margin = f64::INFINITY;
    for eps in a.window.log_grid(10).unwrap() {
        let set = a.model.harmonic_set(eps, &Truncation::default()).unwrap();
        let r = a.model.second_sum_estimate(eps, &Truncation::default()).unwrap().ratio;
        let s = norm1(set.s);
        let mut max = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                max = max.max(a.model.melnikov_field_at_grid([i, j], N, &set).gradient_norm());
            }
        }
        let ratio = max / s;
        // floating-point rounding of the sums themselves
        let slack = r + 64.0 * f64::EPSILON;
        ok &= (ratio - 1.0).abs() <= slack;
        worst_margin = worst_margin.min(slack - (ratio - 1.0).abs());
    }
    verdict(
        ok,
        format!("10 eps, {N}x{N} grid: smallest margin to 1 +- r is {worst_margin:.2e}"),
    )
}

fn rho_covariance() -> Outcome {
    let (a1, a2) = (analysis("shallit", 1.0), analysis("shallit", 2.0));
    let grid = a2.window.log_grid(400).unwrap();
    let scaled: Vec<f64> = grid.iter().map(|e| e * 4.0).collect();
    let t2 = a2.model.h1_scan(&grid, a2.window).unwrap();
    let t1 = a1.model.h1_scan(&scaled, a1.window).unwrap();
    let worst = t1
        .rows
        .iter()
        .zip(&t2.rows)
        .map(|(x, y)| (x.h1 - y.h1).abs())
        .fold(0.0, f64::max);
    verdict(
        worst <= 1e-6,
        format!("400 eps, max |h1(eps; 2) - h1(4 eps; 1)| = {worst:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("continued fraction of the Shallit number", continued_fraction),
        ("constants M, E, B", constants),
        ("B_num from the h1 scan", b_num),
        ("Markoff/Hurwitz sandwich", markoff_sandwich),
        ("residue formula vs quadrature", residue_oracle),
        ("dominant harmonic vs exhaustive scan", lattice_equivalence),
        ("sandwich and bounds of h1", sandwich),
        ("gradient vs finite differences", gradient),
        ("dominance of the maximal distance", dominance_of_gradient),
        ("rho covariance", rho_covariance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag}  {name}: {detail} [{:.1?}]",
            i + 1,
            start.elapsed()
        );
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
