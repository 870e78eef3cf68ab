#![allow(dead_code)]

use leo_secrecy::{
    Alignment, GeometryParams, LinkBudget, LinkBudgetParams, NetworkGeometry, SecrecyScenario,
    ShadowedRician, EARTH_RADIUS_M,
};

/// Reference fading, link and α = 2 at `altitude_km`, with the given mean counts.
pub fn scenario(
    altitude_km: f64,
    mean_sat: f64,
    mean_eve: f64,
    alignment: Alignment,
) -> SecrecyScenario {
    let g = GeometryParams::at_altitude(EARTH_RADIUS_M, altitude_km * 1e3)
        .with_mean_visible(mean_sat)
        .with_mean_eavesdroppers(mean_eve);
    SecrecyScenario::new(
        NetworkGeometry::new(g).unwrap(),
        ShadowedRician::new(1, 0.063, 8.97e-4).unwrap(),
        LinkBudget::new(LinkBudgetParams::reference(alignment)).unwrap(),
        2.0,
    )
    .unwrap()
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Inverts a continuous increasing `cdf` on `[lo, hi]` by bisection.
pub fn invert_cdf(cdf: impl Fn(f64) -> f64, u: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `|a - b| <= k σ` as a readable assertion.
pub fn assert_within(a: f64, b: f64, sigma: f64, k: f64, what: &str) {
    assert!(
        (a - b).abs() <= k * sigma,
        "{what}: {a} vs {b}, |diff| = {:.3}σ (σ = {sigma:e})",
        (a - b).abs() / sigma
    );
}
