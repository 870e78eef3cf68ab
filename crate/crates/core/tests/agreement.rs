//! Analytical evaluators against direct simulation and brute-force integrals.

mod common;

use common::{assert_within, invert_cdf, scenario};
use leo_secrecy::montecarlo::{
    block_rng, estimate_ccdf, estimate_rate, estimate_rate_with, sample_realizations,
};
use leo_secrecy::numerics::{integrate_1d, try_integrate_1d};
use leo_secrecy::{Alignment, QuadratureSpec, SamplingMode};
use rand::Rng;

#[test]
fn laplace_transform_is_an_expectation() {
    let scn = scenario(500.0, 10.0, 1.0, Alignment::SideLobe);
    let g = scn.geometry();
    let kappa = scn.fading().kappa();
    let mut rng = block_rng(21, 0);
    let n = 400_000;
    let fades: Vec<f64> = (0..n)
        .map(|_| scn.fading().sample_power(&mut rng))
        .collect();
    let noise = scn.link().normalized_noise();
    for (gamma, frac) in [(0.5, 0.2), (1.0, 0.5), (3.0, 0.9)] {
        let re = g.r_min() + frac * (g.r_max_eavesdropper() - g.r_min());
        let r1 = g.r_min() * 1.05;
        let s = kappa * r1 * r1;
        let scale = f64::exp2(gamma);
        let values: Vec<f64> = fades
            .iter()
            .map(|h| {
                let x = (scale - 1.0) * noise + scale * scn.link().relative_gain() * h / (re * re);
                (-s * x).exp()
            })
            .collect();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let exact = scn.laplace_conditional(s, gamma, re).unwrap();
        assert_within(
            mean,
            exact,
            (var / n as f64).sqrt(),
            4.0,
            "Laplace expectation",
        );
    }
}

#[test]
fn branch_ccdfs_match_conditional_frequencies() {
    let scn = scenario(500.0, 10.0, 1.0, Alignment::SideLobe);
    let runs = sample_realizations(&scn, 300_000, 22, SamplingMode::VisibleCap);
    for gamma in [0.0, 1.0, 4.0] {
        let exceed = |r: &leo_secrecy::Realization| {
            if gamma == 0.0 {
                r.secrecy_rate > 0.0
            } else {
                r.secrecy_rate >= gamma
            }
        };
        let without: Vec<_> = runs
            .iter()
            .filter(|r| r.serving_distance.is_some() && r.eavesdropper_distance.is_none())
            .collect();
        let with: Vec<_> = runs
            .iter()
            .filter(|r| r.eavesdropper_distance.is_some())
            .collect();
        for (sub, exact, label) in [
            (
                &without,
                scn.ccdf_no_eavesdropper(gamma).unwrap(),
                "no eavesdropper",
            ),
            (
                &with,
                scn.ccdf_with_eavesdropper(gamma).unwrap(),
                "with eavesdropper",
            ),
        ] {
            let n = sub.len() as f64;
            let p = sub.iter().filter(|r| exceed(r)).count() as f64 / n;
            let se = (exact * (1.0 - exact) / n).sqrt().max(1.0 / n);
            assert_within(p, exact, se, 4.0, label);
        }
    }
}

#[test]
fn pinned_distance_ccdf_by_two_draws() {
    // Eavesdropper exactly as far from the satellite as the user: only the two
    // fading draws decide, so P[secrecy > 0] is P[H_u > H_e] in the main lobe.
    for alignment in [Alignment::MainLobe, Alignment::SideLobe] {
        let scn = scenario(500.0, 10.0, 1.0, alignment);
        let g = scn.geometry();
        let (lo, hi) = g.satellite_distance_support();
        let noise = scn.link().normalized_noise();
        let gbar = scn.link().relative_gain();
        let mut rng = block_rng(23, alignment as u64);
        let n = 300_000;
        for gamma in [0.0, 0.5, 2.0] {
            let mut hits = 0u64;
            for _ in 0..n {
                let r = invert_cdf(|r| g.nearest_satellite_cdf(r), rng.random(), lo, hi);
                let hu = scn.fading().sample_power(&mut rng);
                let he = scn.fading().sample_power(&mut rng);
                let rate = ((noise + hu / (r * r)) / (noise + gbar * he / (r * r))).log2();
                if (gamma == 0.0 && rate > 0.0) || (gamma > 0.0 && rate >= gamma) {
                    hits += 1;
                }
            }
            let p = hits as f64 / n as f64;
            let exact = scn
                .ccdf_with_eavesdropper_at_serving_distance(gamma)
                .unwrap();
            assert_within(
                p,
                exact,
                (exact * (1.0 - exact) / n as f64).sqrt().max(1e-5),
                4.0,
                "pinned distance",
            );
            if alignment == Alignment::MainLobe && gamma == 0.0 {
                assert!(
                    (exact - 0.5).abs() < 1e-6,
                    "symmetric draws give 1/2, got {exact}"
                );
            }
        }
    }
}

#[test]
fn rate_without_eavesdroppers_is_a_capacity_integral() {
    for (altitude, mean_sat) in [(500.0, 10.0), (1500.0, 3.0)] {
        let scn = scenario(altitude, mean_sat, 0.0, Alignment::MainLobe);
        let g = scn.geometry();
        let noise = scn.link().normalized_noise();
        let fading = scn.fading();
        let spec = QuadratureSpec::new(1e-10, 1e-14, 400, 1e-13).unwrap();
        let (lo, hi) = (g.r_min(), g.r_max_user());
        // E[log2(1 + H r^-2 / σ̄²)] over the fading density, then over r.
        let capacity = try_integrate_1d(
            |r| {
                let inner = integrate_1d(
                    |h| (1.0 + h / (r * r * noise)).log2() * fading.power_pdf(h),
                    0.0,
                    f64::INFINITY,
                    &spec,
                )?;
                Ok(inner * g.nearest_satellite_pdf(r))
            },
            lo,
            hi,
            &spec,
        )
        .unwrap();
        let oracle = g.visibility_probability() * capacity;
        let got = scn.ergodic_secrecy_rate().unwrap();
        assert!(
            (got - oracle).abs() <= 1e-6 * oracle,
            "{got} vs capacity integral {oracle} at {altitude} km"
        );
    }
}

#[test]
fn sampling_modes_agree_on_the_rate() {
    let scn = scenario(500.0, 10.0, 1.0, Alignment::SideLobe);
    let cap = estimate_rate_with(&scn, 100_000, 31, SamplingMode::VisibleCap).unwrap();
    let full = estimate_rate_with(&scn, 100_000, 32, SamplingMode::FullSphere).unwrap();
    let se = cap.std_error.hypot(full.std_error);
    assert_within(cap.mean, full.mean, se, 4.0, "cap vs full sphere");
}

#[test]
fn standard_error_scales_with_trials() {
    let scn = scenario(500.0, 10.0, 1.0, Alignment::MainLobe);
    let small = estimate_rate(&scn, 50_000, 41).unwrap();
    let large = estimate_rate(&scn, 100_000, 42).unwrap();
    let ratio = large.std_error / small.std_error;
    assert!((ratio * 2f64.sqrt() - 1.0).abs() < 0.05, "SE ratio {ratio}");
}

#[test]
fn ccdf_estimates_match_curve_and_decrease() {
    let scn = scenario(500.0, 10.0, 2.0, Alignment::MainLobe);
    let gammas = [0.0, 1.0, 2.0, 4.0, 6.0, 8.0];
    let mc = estimate_ccdf(&scn, &gammas, 100_000, 51).unwrap();
    let exact = scn.secrecy_ccdf_curve(&gammas).unwrap();
    assert!(mc.is_nonincreasing() && exact.is_nonincreasing());
    for i in 0..gammas.len() {
        let se = mc.std_error(i).max(1e-5);
        assert_within(mc.values[i], exact.values[i], se, 4.0, "secrecy CCDF");
    }
}

#[test]
fn ccdf_decreases_with_eavesdropper_density() {
    for alignment in [Alignment::MainLobe, Alignment::SideLobe] {
        let gammas = [0.0, 1.0, 3.0, 5.0, 7.0];
        let rows: Vec<Vec<f64>> = [0.1, 0.5, 1.0, 2.0, 5.0]
            .iter()
            .map(|&m| {
                let scn = scenario(500.0, 10.0, m, alignment);
                gammas
                    .iter()
                    .map(|&g| scn.secrecy_ccdf(g).unwrap())
                    .collect()
            })
            .collect();
        for j in 0..gammas.len() {
            for i in 1..rows.len() {
                assert!(
                    rows[i][j] <= rows[i - 1][j],
                    "γ={} not decreasing in λ_e",
                    gammas[j]
                );
            }
        }
        for row in &rows {
            assert!(row.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
