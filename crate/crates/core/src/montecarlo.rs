//! System-level Monte Carlo simulator.
//!
//! Samples satellite and eavesdropper point processes, picks the serving
//! satellite and the eavesdropper nearest to it, draws fading, and evaluates
//! the per-realization secrecy rate. Nothing here touches the analytical
//! distance laws or the Laplace machinery, which makes it the independent
//! check on [`crate::analysis`].
//!
//! Trials are split into fixed-size blocks. Block `i` draws from a ChaCha8
//! stream seeded with `seed` and set to stream `i`, so results do not depend
//! on how many worker threads run the blocks; partial results are merged in
//! block order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{CcdfCurve, SecrecyScenario};
use crate::geometry::spherical_cap_area;
use crate::{Error, Result};

pub type Point = [f64; 3];

const BLOCK_SIZE: u64 = 4096;
const MIN_TRIALS: u64 = 100;

/// How satellites and eavesdroppers are placed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Sample only the caps that can matter (thinned processes).
    #[default]
    VisibleCap,
    /// Sample both full spheres and discard points outside the caps.
    FullSphere,
}

/// One sampled network snapshot and its secrecy rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Realization {
    /// Distance to the serving satellite; `None` when no satellite is visible.
    pub serving_distance: Option<f64>,
    /// Distance from the serving satellite to its nearest in-cap eavesdropper.
    pub eavesdropper_distance: Option<f64>,
    pub user_fading: Option<f64>,
    pub eavesdropper_fading: Option<f64>,
    /// bits/s/Hz, never negative.
    pub secrecy_rate: f64,
}

/// Sample mean of the secrecy rate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub zero_rate_fraction: f64,
}

impl McEstimate {
    /// Binomial standard error of [`Self::zero_rate_fraction`].
    pub fn zero_fraction_std_error(&self) -> f64 {
        let p = self.zero_rate_fraction;
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

fn dist(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let law = Poisson::new(mean).expect("finite positive Poisson mean");
    law.sample(rng) as u64
}

/// Poisson points on the cap `{p : |p| = radius, p_z >= plane_height}`.
///
/// The count is Poisson with mean `density * cap area`; positions are uniform,
/// drawn as a uniform axial coordinate (the hat-box property) and a uniform
/// azimuth.
pub fn sample_cap_points<R: Rng + ?Sized>(
    density: f64,
    radius: f64,
    plane_height: f64,
    rng: &mut R,
) -> Vec<Point> {
    let count = poisson_count(density * spherical_cap_area(radius, plane_height), rng);
    (0..count)
        .map(|_| {
            let z = rng.random_range(plane_height..=radius);
            let phi = rng.random_range(0.0..2.0 * PI);
            let rho = (radius * radius - z * z).max(0.0).sqrt();
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Rotates a point expressed around the +z pole so that the pole maps to `axis` (unit).
fn rotate_from_pole(p: &Point, axis: &Point) -> Point {
    // Any vector not parallel to the axis seeds the orthonormal frame.
    let seed = if axis[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let dot = seed[0] * axis[0] + seed[1] * axis[1] + seed[2] * axis[2];
    let mut e1 = [
        seed[0] - dot * axis[0],
        seed[1] - dot * axis[1],
        seed[2] - dot * axis[2],
    ];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|c| *c /= n);
    let e2 = [
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    std::array::from_fn(|i| p[0] * e1[i] + p[1] * e2[i] + p[2] * axis[i])
}

fn sample_sphere_points<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R) -> Vec<Point> {
    let count = poisson_count(density * 4.0 * PI * radius * radius, rng);
    (0..count)
        .map(|_| {
            let u: [f64; 3] = UnitSphere.sample(rng);
            [u[0] * radius, u[1] * radius, u[2] * radius]
        })
        .collect()
}

fn nearest(points: &[Point], target: &Point) -> Option<f64> {
    points
        .iter()
        .map(|p| dist(p, target))
        .min_by(f64::total_cmp)
}

/// One realization using visible-cap sampling.
pub fn simulate_once<R: Rng + ?Sized>(scn: &SecrecyScenario, rng: &mut R) -> Realization {
    simulate_once_with(scn, SamplingMode::VisibleCap, rng)
}

pub fn simulate_once_with<R: Rng + ?Sized>(
    scn: &SecrecyScenario,
    mode: SamplingMode,
    rng: &mut R,
) -> Realization {
    let g = scn.geometry();
    let re = g.earth_radius();
    let rs = g.shell_radius();
    let user: Point = [0.0, 0.0, re];
    let visible_plane = re + g.visibility_altitude();

    let satellites = match mode {
        SamplingMode::VisibleCap => {
            sample_cap_points(g.satellite_density(), rs, visible_plane, rng)
        }
        SamplingMode::FullSphere => {
            let mut all = sample_sphere_points(g.satellite_density(), rs, rng);
            all.retain(|p| p[2] >= visible_plane);
            all
        }
    };
    let Some(serving) = satellites
        .iter()
        .min_by(|a, b| dist(a, &user).total_cmp(&dist(b, &user)))
    else {
        return Realization {
            serving_distance: None,
            eavesdropper_distance: None,
            user_fading: None,
            eavesdropper_fading: None,
            secrecy_rate: 0.0,
        };
    };
    let serving_distance = dist(serving, &user);
    let axis: Point = std::array::from_fn(|i| serving[i] / rs);

    let eve_plane = g.eavesdropper_plane();
    let eavesdroppers: Vec<Point> = match mode {
        SamplingMode::VisibleCap => sample_cap_points(g.eavesdropper_density(), re, eve_plane, rng)
            .iter()
            .map(|p| rotate_from_pole(p, &axis))
            .collect(),
        SamplingMode::FullSphere => {
            let mut all = sample_sphere_points(g.eavesdropper_density(), re, rng);
            all.retain(|p| p[0] * axis[0] + p[1] * axis[1] + p[2] * axis[2] >= eve_plane);
            all
        }
    };
    let eavesdropper_distance = nearest(&eavesdroppers, serving);

    let alpha = scn.path_loss_exponent();
    let noise = scn.link().normalized_noise();
    let h_u = scn.fading().sample_power(rng);
    let user_term = h_u * serving_distance.powf(-alpha);
    let (h_e, eve_term) = match eavesdropper_distance {
        Some(d) => {
            let h = scn.fading().sample_power(rng);
            (Some(h), scn.link().relative_gain() * h * d.powf(-alpha))
        }
        None => (None, 0.0),
    };
    let rate = ((noise + user_term) / (noise + eve_term)).log2().max(0.0);

    Realization {
        serving_distance: Some(serving_distance),
        eavesdropper_distance,
        user_fading: Some(h_u),
        eavesdropper_fading: h_e,
        secrecy_rate: rate,
    }
}

/// Stream for block `index` of a run seeded with `seed`.
pub fn block_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `per_block(rng, n)` for each block in parallel and returns the
/// results in block order.
fn run_blocks<T, F>(trials: u64, seed: u64, per_block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK_SIZE.min(trials - b * BLOCK_SIZE);
            let mut rng = block_rng(seed, b);
            per_block(&mut rng, n)
        })
        .collect()
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

/// All realizations of a run, in trial order.
pub fn sample_realizations(
    scn: &SecrecyScenario,
    trials: u64,
    seed: u64,
    mode: SamplingMode,
) -> Vec<Realization> {
    run_blocks(trials, seed, |rng, n| {
        (0..n)
            .map(|_| simulate_once_with(scn, mode, rng))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    zeros: u64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        if x <= 0.0 {
            self.zeros += 1;
        }
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments {
            n,
            mean,
            m2,
            zeros: self.zeros + other.zeros,
        }
    }
}

/// Ergodic secrecy rate by simulation.
pub fn estimate_rate(scn: &SecrecyScenario, trials: u64, seed: u64) -> Result<McEstimate> {
    estimate_rate_with(scn, trials, seed, SamplingMode::VisibleCap)
}

pub fn estimate_rate_with(
    scn: &SecrecyScenario,
    trials: u64,
    seed: u64,
    mode: SamplingMode,
) -> Result<McEstimate> {
    check_trials(trials)?;
    let total = run_blocks(trials, seed, |rng, n| {
        let mut m = Moments::default();
        for _ in 0..n {
            m.push(simulate_once_with(scn, mode, rng).secrecy_rate);
        }
        m
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge);
    let variance = if total.n > 1 {
        total.m2 / (total.n - 1) as f64
    } else {
        0.0
    };
    Ok(McEstimate {
        mean: total.mean,
        std_error: (variance / total.n as f64).sqrt(),
        trials: total.n,
        zero_rate_fraction: total.zeros as f64 / total.n as f64,
    })
}

/// Empirical `P[secrecy rate >= γ]` on a grid, from one pass over shared
/// realizations. At `γ = 0` this counts strictly positive rates, so that
/// entry equals one minus the zero-rate fraction.
pub fn estimate_ccdf(
    scn: &SecrecyScenario,
    gammas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<CcdfCurve> {
    check_trials(trials)?;
    if gammas.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(Error::Domain(
            "rate thresholds must be finite and >= 0".into(),
        ));
    }
    if gammas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain(
            "rate-threshold grid must be ascending".into(),
        ));
    }
    let counts = run_blocks(trials, seed, |rng, n| {
        let mut counts = vec![0u64; gammas.len()];
        for _ in 0..n {
            let rate = simulate_once(scn, rng).secrecy_rate;
            if rate <= 0.0 {
                continue;
            }
            for (c, g) in counts.iter_mut().zip(gammas) {
                if rate >= *g {
                    *c += 1;
                }
            }
        }
        counts
    })
    .into_iter()
    .fold(vec![0u64; gammas.len()], |mut acc, block| {
        acc.iter_mut().zip(block).for_each(|(a, b)| *a += b);
        acc
    });
    Ok(CcdfCurve {
        gammas: gammas.to_vec(),
        values: counts.iter().map(|&c| c as f64 / trials as f64).collect(),
        trials: Some(trials),
    })
}
