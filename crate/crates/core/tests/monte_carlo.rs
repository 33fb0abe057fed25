//! Monte Carlo oracles for the estimators and the process simulators.

use extremal_core::blocks::{
    block_maxima, c2_hat, select_threshold, sliding_excess_variance, theta_hat,
};
use extremal_core::processes::{
    cluster_theory, exact_threshold, simulate, theoretical_fr, theoretical_theta_r, ProcessSpec,
};
use extremal_core::{BlockConfig, Scheme, TimeSeries};

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn tau_one(x: &TimeSeries, r: usize) -> BlockConfig {
    let u = select_threshold(x, r, 1.0).unwrap();
    BlockConfig::new(x.len(), r, u).unwrap()
}

#[test]
fn iid_sliding_estimate_is_close_to_one() {
    let thetas: Vec<f64> = (0..1000)
        .map(|seed| {
            let x = simulate(&ProcessSpec::IidUniform, 10_000, seed).unwrap();
            theta_hat(&x, &tau_one(&x, 100), Scheme::Sliding)
                .unwrap()
                .theta_clipped
        })
        .collect();
    let (m, sd) = mean_sd(&thetas);
    println!("iid theta_sl clipped: mean {m:.5}, sd {sd:.5}");
    assert!((m - 1.0).abs() < 3.0 * sd);
}

#[test]
fn window_variance_matches_binomial() {
    // u = 0.9 on Uniform(0,1): exceedance probability p = 0.1
    let (r, p) = (50, 0.1);
    let x = simulate(&ProcessSpec::IidUniform, 400_000, 77).unwrap();
    let cfg = BlockConfig::new(x.len(), r, 1.0 - p).unwrap();
    let v = sliding_excess_variance(&x, &cfg).unwrap();
    let target = r as f64 * p * (1.0 - p);
    println!("sigma2_hat {} vs {target}", v.sigma2_hat);
    assert!((v.sigma2_hat / target - 1.0).abs() < 0.10);
    assert!((v.nbar - r as f64 * p).abs() < 0.05);
}

fn mean_c2(spec: ProcessSpec) -> f64 {
    let vals: Vec<f64> = (0..1000)
        .map(|seed| {
            let x = simulate(&spec, 10_000, 10_000 + seed).unwrap();
            c2_hat(&x, &tau_one(&x, 100)).unwrap()
        })
        .collect();
    mean_sd(&vals).0
}

#[test]
fn c2_hat_iid_is_near_zero() {
    let m = mean_c2(ProcessSpec::IidUniform);
    println!("iid mean c2_hat {m}");
    assert!(m.abs() < 0.15);
}

#[test]
fn c2_hat_mar_is_near_one_minus_theta() {
    let m = mean_c2(ProcessSpec::Mar { theta: 0.5 });
    println!("mar(0.5) mean c2_hat {m}");
    assert!((m - 0.5).abs() < 0.2);
}

fn ks_distance(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn mar_with_theta_one_is_iid_frechet() {
    let m = 100_000;
    let mut a = simulate(&ProcessSpec::Mar { theta: 1.0 }, m, 1)
        .unwrap()
        .into_values();
    let mut b = simulate(&ProcessSpec::IidFrechet, m, 2)
        .unwrap()
        .into_values();
    let d = ks_distance(&mut a, &mut b);
    let critical = 1.628 * (2.0 / m as f64).sqrt();
    assert!(d < critical, "KS distance {d} >= {critical}");
}

#[test]
fn moving_maximum_marginal() {
    let x = simulate(&ProcessSpec::Mm, 1_000_000, 5).unwrap();
    for t in [1.0, 2.0, 5.0] {
        let emp = x.values().iter().filter(|&&v| v <= t).count() as f64 / x.len() as f64;
        let exact = (-2.0f64 / t).exp();
        assert!((emp - exact).abs() < 0.01, "x={t}: {emp} vs {exact}");
    }
}

#[test]
fn block_maximum_distribution_matches_closed_form() {
    let mar = ProcessSpec::Mar { theta: 0.5 };
    assert!((theoretical_fr(&mar, 100, 200.0).unwrap() - 0.603_506).abs() < 1e-6);
    let cases = [
        (ProcessSpec::IidUniform, 100, 0.99),
        (ProcessSpec::IidFrechet, 100, 100.0),
        (mar, 100, 200.0),
        (ProcessSpec::Mar { theta: 0.25 }, 100, 400.0),
        (ProcessSpec::Mm, 100, 150.0),
    ];
    let blocks = 100_000;
    for (i, (spec, r, u)) in cases.into_iter().enumerate() {
        let x = simulate(&spec, r * blocks, 42 + i as u64).unwrap();
        let maxima = block_maxima(&x, r, Scheme::Disjoint).unwrap();
        let emp = maxima.iter().filter(|&&m| m <= u).count() as f64 / blocks as f64;
        let f = theoretical_fr(&spec, r, u).unwrap();
        let se = (f * (1.0 - f) / blocks as f64).sqrt();
        println!("{spec}: empirical {emp:.5} theory {f:.5} se {se:.5}");
        assert!((emp - f).abs() < 3.0 * se, "{spec}");
        if spec == mar {
            assert!((emp - f).abs() < 0.005);
        }
    }
}

#[test]
fn finite_block_theta_converges_monotonically() {
    for spec in [
        ProcessSpec::IidUniform,
        ProcessSpec::Mar { theta: 0.25 },
        ProcessSpec::Mar { theta: 0.75 },
        ProcessSpec::Mm,
    ] {
        let errors: Vec<f64> = [100, 1_000, 10_000, 100_000]
            .iter()
            .map(|&r| {
                (theoretical_theta_r(&spec, r, 1.0).unwrap() - spec.theoretical_theta()).abs()
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{spec}: {errors:?}");
        assert!(errors[3] < 1e-4);
    }
}

/// Sizes of maximal runs of consecutive exceedances.
fn run_cluster_sizes(x: &[f64], u: f64) -> Vec<f64> {
    let mut sizes = Vec::new();
    let mut run = 0usize;
    for &v in x {
        if v > u {
            run += 1;
        } else if run > 0 {
            sizes.push(run as f64);
            run = 0;
        }
    }
    if run > 0 {
        sizes.push(run as f64);
    }
    sizes
}

fn cluster_moments(spec: ProcessSpec) -> (f64, f64) {
    let u = exact_threshold(&spec, 10_000, 1.0).unwrap();
    let x = simulate(&spec, 50_000_000, 2024).unwrap();
    let sizes = run_cluster_sizes(x.values(), u);
    let (m, sd) = mean_sd(&sizes);
    println!(
        "{spec}: {} clusters, mean size {m:.4}, c2 {:.4}",
        sizes.len(),
        sd * sd / (m * m)
    );
    (m, sd * sd / (m * m))
}

#[test]
fn mar_cluster_sizes_are_geometric() {
    let spec = ProcessSpec::Mar { theta: 0.5 };
    let (m1, c2) = cluster_moments(spec);
    let theory = cluster_theory(&spec).unwrap();
    assert!((c2 - theory.c2).abs() < 0.1);
    assert!((m1 - theory.m1).abs() < 0.1);
}

#[test]
fn moving_maximum_clusters_have_size_two() {
    let (m1, c2) = cluster_moments(ProcessSpec::Mm);
    let theory = cluster_theory(&ProcessSpec::Mm).unwrap();
    assert!((m1 - theory.m1).abs() < 0.02);
    assert!(c2.abs() < 0.02);
}
