use critspectra::corrmat::PowerMapParams;
use critspectra::rmt::{
    rmt_emerging_baseline, sample_goe, sample_wishart_correlation, wigner_cdf, MpParams,
};
use critspectra::spectra::{
    correlation_spectrum, ks_distance, number_variance, pooled_spacings,
    power_mapped_split, unfold, Binning, Unfolding,
};

#[test]
fn goe_spacings_follow_the_surmise() {
    let sequences: Vec<Vec<f64>> = (0..25)
        .map(|k| unfold(sample_goe(500, 100 + k).unwrap().values(), &Unfolding::default()).unwrap())
        .collect();
    let spacings = pooled_spacings(&sequences);
    assert!(spacings.len() >= 9_900);
    let ks = ks_distance(&spacings, wigner_cdf);
    assert!(ks < 0.02, "ks {ks}");
}

fn wishart_unfolded(d: usize, tau: usize, seed: u64) -> Vec<f64> {
    let s = correlation_spectrum(&sample_wishart_correlation(d, tau, seed).unwrap()).unwrap();
    unfold(s.values(), &Unfolding::MpAnalytic(MpParams::from_shape(d, tau))).unwrap()
}

#[test]
fn mp_unfolding_gives_unit_spacing() {
    let u = wishart_unfolded(1024, 5120, 21);
    let mean = (u[u.len() - 1] - u[0]) / (u.len() - 1) as f64;
    assert!((mean - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn wishart_number_variance_at_five() {
    let sequences: Vec<Vec<f64>> = (0..10).map(|k| wishart_unfolded(1024, 5120, 30 + k)).collect();
    let sigma2 = number_variance(&sequences, &[1.0, 5.0]).unwrap();
    assert!(sigma2[1].1 > sigma2[0].1);
    let goe = |r: f64| {
        let pi2 = std::f64::consts::PI.powi(2);
        2.0 / pi2 * ((2.0 * std::f64::consts::PI * r).ln() + 0.577_215_664_9 + 1.0 - pi2 / 8.0)
    };
    assert!((sigma2[1].1 - goe(5.0)).abs() < 0.05, "{:?} vs {}", sigma2, goe(5.0));
}

#[test]
fn emerging_baseline_shape() {
    let e = rmt_emerging_baseline(256, 32, 1.001, 20, 5, &Binning::SqrtRule).unwrap();
    assert_eq!(e.splits.len(), 20);
    assert!(e.splits.iter().all(|s| s.emerging.len() == 256 - 31));
    assert!((e.density.integral() - 1.0).abs() < 1e-10);
}

/// Negative emerging eigenvalues thin out as the series lengthen and are
/// gone by τ = D/4.
#[test]
fn negative_emerging_fraction_falls_with_tau() {
    let fraction = |tau: usize| {
        let e = rmt_emerging_baseline(256, tau, 1.001, 5, 40 + tau as u64, &Binning::Count(10)).unwrap();
        e.negative_count() as f64 / e.pooled_emerging().len() as f64
    };
    let f: Vec<f64> = [16, 32, 64].into_iter().map(fraction).collect();
    assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
    assert_eq!(f[2], 0.0);
}

#[test]
fn identity_map_leaves_zeros() {
    let e = rmt_emerging_baseline(128, 16, 1.0, 3, 6, &Binning::Count(5)).unwrap();
    assert!(e.pooled_emerging().iter().all(|v| v.abs() <= 1e-8));
}

#[test]
fn emerging_mean_scales_with_q_minus_one() {
    let c = sample_wishart_correlation(256, 64, 7).unwrap();
    let ratios: Vec<f64> = [1.0005, 1.001, 1.002]
        .iter()
        .map(|&q| {
            let split = power_mapped_split(&c, PowerMapParams::new(q).unwrap()).unwrap();
            split.emerging.mean() / (q - 1.0)
        })
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(lo > 0.0 && hi / lo <= 2.0, "{ratios:?}");
}

#[test]
fn trace_is_shared_between_bulk_and_emerging() {
    let c = sample_wishart_correlation(200, 50, 8).unwrap();
    let before = correlation_spectrum(&c).unwrap();
    let split = power_mapped_split(&c, PowerMapParams::new(1.002).unwrap()).unwrap();
    let shift: f64 = split.bulk.sum() - before.values()[..split.bulk.len()].iter().sum::<f64>();
    let implied_mean = -shift / split.emerging.len() as f64;
    assert!((split.emerging.mean() - implied_mean).abs() < 1e-9, "{} vs {implied_mean}", split.emerging.mean());
}

#[test]
fn replica_averaging_smooths_the_histogram() {
    let reference = rmt_emerging_baseline(128, 16, 1.001, 200, 9, &Binning::Count(12)).unwrap();
    let edges = reference.density.edges.clone();
    let deviation = |replicas: usize, seed: u64| {
        let e = rmt_emerging_baseline(128, 16, 1.001, replicas, seed, &Binning::Edges(edges.clone()))
            .unwrap();
        e.density
            .densities
            .iter()
            .zip(&reference.density.densities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    assert!(deviation(20, 10) < deviation(1, 11));
}
