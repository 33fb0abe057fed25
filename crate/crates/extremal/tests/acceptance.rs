//! Acceptance criteria. Runs as a plain binary so that every criterion
//! prints one PASS/FAIL line; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use extremal::commands::{cmd_study, Format};
use extremal::experiments::{run_study, CellResult, StudyConfig};
use extremal_core::asymptotics::{
    asymptotic_bias, optimal_alpha, sigma_matrix, v_matrix, variance_fn, AsymptoticParams,
    ALPHA_SEARCH,
};
use extremal_core::blocks::{
    block_maxima, block_stats, theta_hat, window_excess_counts, EstimatorKind,
};
use extremal_core::procedure::{Correction, TauRule};
use extremal_core::processes::{cluster_theory, theoretical_theta_r, ProcessSpec};
use extremal_core::rng::{open_uniform, sim_rng};
use extremal_core::{BlockConfig, Scheme, TimeSeries};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

const E: f64 = std::f64::consts::E;

// ---------------------------------------------------------------- 1

fn c1_hand_example() -> Outcome {
    let s = TimeSeries::new(vec![1.0, 5.0, 2.0, 1.0, 1.0, 1.0]).unwrap();
    let cfg = BlockConfig::for_series(&s, 3, 4.0).unwrap();
    let st = block_stats(&s, &cfg).unwrap();
    let ln2 = std::f64::consts::LN_2;
    let raw = [
        theta_hat(&s, &cfg, Scheme::Disjoint).unwrap().theta_raw,
        theta_hat(&s, &cfg, Scheme::Sliding).unwrap().theta_raw,
    ];
    let checks = [
        ("F_dj", st.f_dj, 0.5),
        ("F_sl", st.f_sl, 0.5),
        ("tau_hat", st.tau_hat, 0.5),
        ("theta_dj", raw[0], 2.0 * ln2),
        ("theta_sl", raw[1], 2.0 * ln2),
        ("sigma2", st.sigma2_hat.unwrap(), 1.0),
        ("c2", st.c2_hat.unwrap(), 4.0 * ln2 - 1.0),
    ];
    let bad: Vec<_> = checks
        .iter()
        .filter(|(_, got, want)| !close(*got, *want, 1e-12))
        .collect();
    check(
        bad.is_empty(),
        format!("7 quantities at 1e-12; mismatches: {bad:?}"),
    )
}

// ---------------------------------------------------------------- 2

fn c2_closed_forms() -> Outcome {
    let p = AsymptoticParams::new(0.5, 1.0, 0.0).unwrap();
    let s = sigma_matrix(&p);
    let q = AsymptoticParams::new(0.5, 1.0, 0.5).unwrap();
    let v = v_matrix(&q);
    let b = asymptotic_bias(&AsymptoticParams::new(1.0, 1.0, 0.0).unwrap());
    let vf = |scheme, a, c2| variance_fn(scheme, a, c2).unwrap();
    let checks = [
        ("sigma11", s.get(1, 1), 0.238652),
        ("sigma31", s.get(3, 1), -0.606531),
        ("v11", v.v11(), 0.398721),
        ("v22", v.v22(), 0.344885),
        ("vf_dj(1,0)", vf(Scheme::Disjoint, 1.0, 0.0), E - 2.0),
        ("vf_sl(1,0)", vf(Scheme::Sliding, 1.0, 0.0), 2.0 * (E - 2.5)),
        ("mu_dj", b.mu_dj, (E - 1.0) / 2.0),
        ("mu_sl", b.mu_sl, E - 2.0),
    ];
    let bad: Vec<_> = checks
        .iter()
        .filter(|(_, got, want)| !close(*got, *want, 1e-6))
        .collect();
    check(
        bad.is_empty(),
        format!("8 values at 1e-6; mismatches: {bad:?}"),
    )
}

// ---------------------------------------------------------------- 3

fn c3_orderings() -> Outcome {
    let thetas = (1..=10).map(|i| i as f64 / 10.0);
    let taus = [0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0];
    let c2s = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let (mut points, mut violations) = (0, 0);
    for t in thetas {
        for &tau in &taus {
            for &c2 in &c2s {
                let p = AsymptoticParams::new(t, tau, c2).unwrap();
                let (s, v, mu) = (sigma_matrix(&p), v_matrix(&p), asymptotic_bias(&p));
                let a = t * tau;
                let ok = v.v22() <= v.v11()
                    && mu.mu_sl <= mu.mu_dj
                    && s.get(2, 2) == s.get(1, 2)
                    && s.get(3, 1) == s.get(3, 2)
                    && variance_fn(Scheme::Sliding, a, c2).unwrap()
                        <= variance_fn(Scheme::Disjoint, a, c2).unwrap();
                points += 1;
                violations += usize::from(!ok);
            }
        }
    }
    check(
        violations == 0,
        format!("{points} grid points, {violations} violations"),
    )
}

// ---------------------------------------------------------------- 4

/// Independent evaluation of the variance function.
fn oracle_variance(sliding: bool, a: f64, c2: f64) -> f64 {
    let t1 = a.exp_m1() - a;
    if sliding {
        2.0 * (t1 - a * a / 2.0) / (a * a * a) + c2 / a
    } else {
        t1 / (a * a) + c2 / a
    }
}

fn c4_optimizer() -> Outcome {
    let (lo, hi) = ALPHA_SEARCH;
    let steps = ((hi - lo) / 1e-4).round() as usize;
    let mut lines = Vec::new();
    let mut ok = true;
    for &c2 in &[0.25, 0.5, 1.0, 2.0] {
        for (scheme, sliding) in [(Scheme::Disjoint, false), (Scheme::Sliding, true)] {
            let (mut best_a, mut best_v) = (lo, f64::INFINITY);
            for i in 0..=steps {
                let a = lo + i as f64 * 1e-4;
                let v = oracle_variance(sliding, a, c2);
                if v < best_v {
                    (best_a, best_v) = (a, v);
                }
            }
            let got = optimal_alpha(scheme, c2);
            let good =
                close(got.alpha, best_a, 2e-4) && close(got.value, best_v, 1e-6) && !got.boundary;
            ok &= good;
            lines.push(format!(
                "{scheme} c2={c2}: {:.4}/{:.6}",
                got.alpha, got.value
            ));
        }
    }
    let reference = optimal_alpha(Scheme::Disjoint, 1.0);
    ok &= close(reference.alpha, 1.59, 0.01) && close(reference.value, 1.544, 1e-3);
    let flags = [
        optimal_alpha(Scheme::Disjoint, 0.0).boundary,
        optimal_alpha(Scheme::Sliding, 0.0).boundary,
    ];
    ok &= flags == [true, true];
    check(
        ok,
        format!("{}; boundary flags at c2=0: {flags:?}", lines.join(", ")),
    )
}

// ---------------------------------------------------------------- 5

fn scaled_error(spec: &ProcessSpec, r: usize, tau: f64, target: f64) -> f64 {
    r as f64 * (theoretical_theta_r(spec, r, tau).unwrap() - target)
}

fn c5_finite_sample_limits() -> Outcome {
    let r = 10_000;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for &tau in &[0.5, 1.0, 2.0] {
        let iid = scaled_error(&ProcessSpec::IidUniform, r, tau, 1.0);
        let rel = (iid / (tau / 2.0) - 1.0).abs();
        worst = worst.max(rel);
        ok &= rel < 0.01;
        for &theta in &[0.25, 0.5, 0.75] {
            let spec = ProcessSpec::mar(theta).unwrap();
            let want = tau * theta / 2.0 + 1.0 - theta;
            let rel = (scaled_error(&spec, r, tau, theta) / want - 1.0).abs();
            worst = worst.max(rel);
            ok &= rel < 0.01;
        }
    }
    let mut mm = Vec::new();
    for &tau in &[0.5, 1.0, 2.0] {
        let seq: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&r| scaled_error(&ProcessSpec::Mm, r as usize, tau, 0.5))
            .collect();
        let steps: Vec<f64> = seq.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let converging = steps.windows(2).all(|s| s[1] < s[0]) && steps[2] < 1e-4 * seq[3].abs();
        ok &= converging;
        mm.push(format!(
            "tau={tau}: r(theta_r-1/2)={:.6} [tau/4={}, 1/2+tau/4={}]",
            seq[3],
            tau / 4.0,
            0.5 + tau / 4.0
        ));
    }
    check(
        ok,
        format!(
            "iid/mar worst relative error {worst:.2e}; mm converges: {}",
            mm.join("; ")
        ),
    )
}

// ---------------------------------------------------------------- 6-8

const MAR_THETAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
const MAR_R: [usize; 5] = [25, 50, 100, 200, 400];

fn mar_grid() -> &'static Vec<CellResult> {
    static GRID: OnceLock<Vec<CellResult>> = OnceLock::new();
    GRID.get_or_init(|| {
        let cfg = StudyConfig {
            processes: MAR_THETAS
                .iter()
                .map(|&t| ProcessSpec::mar(t).unwrap())
                .collect(),
            n: 10_000,
            r_grid: MAR_R.to_vec(),
            tau_rules: vec![TauRule::DEFAULT],
            corrections: vec![Correction::None, Correction::SubtractMu],
            replicates: 2000,
            base_seed: 20_240_601,
            ci_level: 0.90,
            workers: None,
        };
        run_study(&cfg).expect("MAR grid study")
    })
}

fn cell(
    theta: f64,
    r: usize,
    correction: Correction,
    estimator: EstimatorKind,
) -> &'static CellResult {
    mar_grid()
        .iter()
        .find(|c| {
            c.theta_true == theta
                && c.r == r
                && c.correction == correction
                && c.estimator == estimator
        })
        .expect("cell present")
}

fn c6_efficiency() -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for &t in &MAR_THETAS {
        for &r in &MAR_R {
            let dj = cell(t, r, Correction::None, EstimatorKind::Disjoint).stderr;
            let sl = cell(t, r, Correction::None, EstimatorKind::Sliding).stderr;
            worst = worst.max(sl / dj);
            if sl > 1.02 * dj {
                bad.push(format!("theta={t} r={r}: {sl:.4} vs {dj:.4}"));
            }
        }
    }
    check(
        bad.is_empty(),
        format!(
            "20 cells x 2000 replicates, max sl/dj stderr ratio {worst:.3}; violations: {bad:?}"
        ),
    )
}

fn c7_variance_calibration() -> Outcome {
    let c2 = cluster_theory(&ProcessSpec::mar(0.5).unwrap()).unwrap().c2;
    let v = v_matrix(&AsymptoticParams::new(0.5, 1.0, c2).unwrap());
    let k = 100.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, var) in [
        (EstimatorKind::Disjoint, v.v11()),
        (EstimatorKind::Sliding, v.v22()),
    ] {
        let mc = cell(0.5, 100, Correction::None, kind).stderr;
        let ratio = mc / (var / k).sqrt();
        ok &= (0.85..=1.15).contains(&ratio);
        parts.push(format!(
            "{kind}: MC {mc:.4} / asymptotic {:.4} = {ratio:.3}",
            (var / k).sqrt()
        ));
    }
    check(ok, format!("c2={c2}; {}", parts.join("; ")))
}

fn c8_bias_correction() -> Outcome {
    let mut bad = Vec::new();
    let mut clipped_worse = Vec::new();
    for &t in &MAR_THETAS {
        for &r in &[25, 200, 400] {
            for kind in [EstimatorKind::Disjoint, EstimatorKind::Sliding] {
                let plain = cell(t, r, Correction::None, kind);
                let corr = cell(t, r, Correction::SubtractMu, kind);
                let improves = |before: f64, after: f64| {
                    if r == 25 {
                        after.abs() <= 1.2 * before.abs()
                    } else {
                        after.abs() < before.abs()
                    }
                };
                if !improves(plain.bias_unclipped, corr.bias_unclipped) {
                    bad.push(format!(
                        "theta={t} r={r} {kind}: {:.4} -> {:.4}",
                        plain.bias_unclipped, corr.bias_unclipped
                    ));
                }
                if !improves(plain.bias, corr.bias) {
                    clipped_worse.push(format!(
                        "theta={t} r={r} {kind}: {:.4} -> {:.4}",
                        plain.bias, corr.bias
                    ));
                }
            }
        }
    }
    check(
        bad.is_empty(),
        format!(
            "unclipped estimator, 24 cells; failures: {bad:?}; clipped-at-1 diagnostic (not asserted), cells where it does not hold: {clipped_worse:?}"
        ),
    )
}

// ---------------------------------------------------------------- 9

fn c9_kernels() -> Outcome {
    let mut rng = sim_rng(9);
    let mut uniform =
        |lo: usize, hi: usize| lo + ((hi - lo + 1) as f64 * open_uniform(&mut rng)) as usize;
    let mut mismatches = 0;
    for case in 0..100 {
        let r = uniform(1, 64);
        let n = uniform(2 * r, 2000);
        let ties = case % 2 == 0;
        let mut vrng = sim_rng(1000 + case as u64);
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let x = open_uniform(&mut vrng);
                if ties {
                    (x * 8.0).floor()
                } else {
                    x
                }
            })
            .collect();
        let u = xs[uniform(0, n - 1)];
        let s = TimeSeries::new(xs.clone()).unwrap();
        let maxima: Vec<f64> = xs
            .windows(r)
            .map(|w| w.iter().cloned().fold(f64::MIN, f64::max))
            .collect();
        let counts: Vec<usize> = xs
            .windows(r)
            .map(|w| w.iter().filter(|&&x| x > u).count())
            .collect();
        let disjoint: Vec<f64> = xs
            .chunks_exact(r)
            .map(|w| w.iter().cloned().fold(f64::MIN, f64::max))
            .collect();
        mismatches += usize::from(block_maxima(&s, r, Scheme::Sliding).unwrap() != maxima);
        mismatches += usize::from(window_excess_counts(&s, r, u).unwrap() != counts);
        mismatches += usize::from(block_maxima(&s, r, Scheme::Disjoint).unwrap() != disjoint);
    }
    check(
        mismatches == 0,
        format!("100 series (half with ties), {mismatches} mismatches"),
    )
}

// ---------------------------------------------------------------- 10

const SMOKE_CONFIG: &str = "\
# mar smoke grid
processes = mar:0.25, mar:0.5, mar:0.75, mar:1
n = 10000
r_grid = 25, 100
tau_rules = 1, optimal
corrections = none
replicates = 40
base_seed = 3
";

fn study_csv(dir: &Path, name: &str, workers: usize) -> Vec<u8> {
    let cfg = dir.join(format!("{name}.txt"));
    std::fs::write(&cfg, format!("{SMOKE_CONFIG}workers = {workers}\n")).unwrap();
    let out = dir.join(name);
    let res = cmd_study(&cfg, &out, None, Format::Csv).unwrap();
    std::fs::read(res.results_path).unwrap()
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let a = study_csv(dir.path(), "a", 1);
    let b = study_csv(dir.path(), "b", 1);
    let c = study_csv(dir.path(), "c", 4);
    let rows = a.iter().filter(|&&ch| ch == b'\n').count() - 1;
    check(
        a == b && a == c,
        format!(
            "{rows} rows; repeat identical: {}; 1 vs 4 workers identical: {}",
            a == b,
            a == c
        ),
    )
}

// ----------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("C1 hand example", c1_hand_example),
        ("C2 closed forms", c2_closed_forms),
        ("C3 ordering properties", c3_orderings),
        ("C4 optimizer oracle", c4_optimizer),
        ("C5 finite-sample bias limits", c5_finite_sample_limits),
        ("C6 sliding efficiency", c6_efficiency),
        (
            "C7 asymptotic variance calibration",
            c7_variance_calibration,
        ),
        ("C8 bias correction", c8_bias_correction),
        ("C9 kernels vs brute force", c9_kernels),
        ("C10 study determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
