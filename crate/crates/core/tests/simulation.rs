mod common;

use qqfdr::*;

fn spec(pattern: Pattern, m: usize, pi1: f64, effect: f64, rho: f64, seed: u64) -> SimSpec {
    SimSpec {
        m,
        pattern,
        pi1,
        effect,
        rho,
        seed,
    }
}

#[test]
fn null_pvalues_are_uniform() {
    // KS 5% critical value at n = 2000 is about 0.0304; 0.04 leaves room
    let passes = (0..20u64)
        .filter(|&seed| {
            let set =
                simulate_pvalues(&spec(Pattern::Independent, 2000, 0.0, 0.0, 0.0, seed)).unwrap();
            common::ks_uniform(&set.pvalues()) < 0.04
        })
        .count();
    assert!(passes >= 19, "{passes}/20 seeds under the KS bound");
}

#[test]
fn normal_stream_moments() {
    let n = 100_000;
    let (mut mean_ok, mut var_ok) = (0, 0);
    for seed in 0..20u64 {
        let z: Vec<f64> = standard_normal_stream(seed).take(n).collect();
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        mean_ok += usize::from((-0.02..=0.02).contains(&mean));
        var_ok += usize::from((0.98..=1.02).contains(&var));
    }
    assert!(mean_ok >= 19, "mean within bounds for {mean_ok}/20 seeds");
    assert!(var_ok >= 19, "variance within bounds for {var_ok}/20 seeds");
}

#[test]
fn stream_prefix_is_stable() {
    let a: Vec<f64> = standard_normal_stream(2024).take(1000).collect();
    let b: Vec<f64> = standard_normal_stream(2024).take(1000).collect();
    assert_eq!(a, b);
    assert!(a.iter().all(|v| v.is_finite()));
}

#[test]
fn equicorrelated_sets_share_a_factor() {
    // with a shared factor the p-value sets swing together from seed to seed,
    // so the spread of per-seed means is far wider than for independent tests
    let spread = |pattern, rho| {
        let means: Vec<f64> = (0..40u64)
            .map(|seed| {
                let p = simulate_pvalues(&spec(pattern, 200, 0.0, 0.0, rho, seed))
                    .unwrap()
                    .pvalues();
                p.iter().sum::<f64>() / p.len() as f64
            })
            .collect();
        let mu = means.iter().sum::<f64>() / means.len() as f64;
        (means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / means.len() as f64).sqrt()
    };
    assert!(spread(Pattern::Equicorrelated, 0.5) > 3.0 * spread(Pattern::Independent, 0.0));
}

#[test]
fn correlated_regime_reaches_its_minimum_past_rank_one() {
    let hits = (0..100u64)
        .filter(|&seed| {
            let set =
                simulate_pvalues(&spec(Pattern::Equicorrelated, 200, 0.5, 1.5, 0.5, seed)).unwrap();
            min_attainable_fdr(&order_tests(&set)).k_at_min > 1
        })
        .count();
    assert!(hits >= 70, "k_at_min > 1 in {hits}/100 runs, need 70");
}

#[test]
fn independent_regime_has_rising_q_values() {
    let hits = (0..100u64)
        .filter(|&seed| {
            let set =
                simulate_pvalues(&spec(Pattern::Independent, 200, 0.05, 3.5, 0.0, seed)).unwrap();
            let q = q_values(&order_tests(&set));
            q.values()[..5].windows(2).all(|w| w[0] < w[1])
        })
        .count();
    assert!(
        hits >= 70,
        "strictly rising q over ranks 1-5 in {hits}/100 runs, need 70"
    );
}

#[test]
fn independent_regime_discovery_count() {
    let mut counts: Vec<f64> = (0..100u64)
        .map(|seed| {
            let set =
                simulate_pvalues(&spec(Pattern::Independent, 200, 0.05, 3.5, 0.0, seed)).unwrap();
            q_values(&order_tests(&set))
                .values()
                .iter()
                .filter(|&&q| q <= 0.1)
                .count() as f64
        })
        .collect();
    let med = common::median(&mut counts);
    assert!((5.0..=15.0).contains(&med), "median {med}");
}
