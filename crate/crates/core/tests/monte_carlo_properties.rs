use trendaudit::adf::adf_on_values;
use trendaudit::montecarlo::{linear_trend_target, share_above, walk_values};
use trendaudit::{run_monte_carlo, Deterministic, WalkParams};

const SEED: u64 = 20_240_611;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}

#[test]
fn summary_is_independent_of_thread_count() {
    let target = linear_trend_target(1900, 101, 1.2, 1.0, 3).unwrap();
    let params = WalkParams::default();
    let one = pool(1).install(|| run_monte_carlo(&target, 2_000, &params, SEED).unwrap());
    let many = pool(8).install(|| run_monte_carlo(&target, 2_000, &params, SEED).unwrap());
    assert_eq!(one, many);
}

#[test]
fn walk_levels_keep_unit_root_and_changes_do_not() {
    let params = WalkParams::default();
    let n = 2_000;
    let (mut level_fail, mut change_reject) = (0, 0);
    for i in 0..n {
        let (_, walk) = walk_values(&params, i, SEED);
        let changes: Vec<f64> = walk.windows(2).map(|w| w[1] - w[0]).collect();
        if !adf_on_values(&walk, 1, Deterministic::Constant)
            .unwrap()
            .reject_at_5pct
        {
            level_fail += 1;
        }
        if adf_on_values(&changes, 1, Deterministic::Constant)
            .unwrap()
            .reject_at_5pct
        {
            change_reject += 1;
        }
    }
    let level_fail = level_fail as f64 / n as f64;
    let change_reject = change_reject as f64 / n as f64;
    assert!(level_fail >= 0.85, "levels fail ADF in {level_fail}");
    assert!(change_reject >= 0.95, "changes reject in {change_reject}");
}

#[test]
fn change_correlations_follow_null_spread() {
    let target = linear_trend_target(1900, 101, 1.2, 1.0, 5).unwrap();
    let summary = run_monte_carlo(&target, 5_000, &WalkParams::default(), SEED).unwrap();
    let v = &summary.change_corrs;
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let sd = (v.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
    // T - 1 = 100 changes, so the null spread is 1 / sqrt(T - 2)
    let expected = 1.0 / (99.0f64).sqrt();
    assert!(
        sd / expected < 1.3 && expected / sd < 1.3,
        "sd {sd} vs {expected}"
    );
    assert!(v
        .iter()
        .chain(&summary.level_corrs)
        .all(|r| (-1.0..=1.0).contains(r)));
}

#[test]
fn histogram_counts_cover_every_walk() {
    let target = linear_trend_target(1900, 101, 1.2, 1.0, 5).unwrap();
    let summary = run_monte_carlo(&target, 1_000, &WalkParams::default(), SEED).unwrap();
    let h = summary.histograms(40).unwrap();
    for hist in [
        &h.level_corrs,
        &h.change_corrs,
        &h.level_resid_rho,
        &h.change_resid_rho,
    ] {
        assert_eq!(hist.total() as usize, summary.n_valid());
        assert!(hist.edges.windows(2).all(|w| w[0] < w[1]));
    }
    let mut last = 1.0;
    for k in 0..=20 {
        let share = share_above(&summary.level_corrs, -1.0 + 0.1 * k as f64);
        assert!(share <= last);
        last = share;
    }
}
