//! Point evaluation and sweep orchestration.
//!
//! Points run concurrently; rows always come back in grid order. A point whose
//! parameters are invalid, or whose quadrature fails, becomes a row with
//! `status = error` and the sweep carries on.

use std::time::Instant;

use leo_secrecy::montecarlo::{estimate_ccdf, estimate_rate};
use leo_secrecy::{Alignment, McEstimate, SecrecyScenario};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Config, Density, Mode, PointSpec, Preset, SweepVariable};
use crate::CliError;

const KM2: f64 = 1e6;

/// Agreement band used for the `within_3se` column.
pub const AGREEMENT_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Ergodic secrecy rate, bits/s/Hz.
    Rate,
    /// `P[secrecy rate >= gamma]`.
    Ccdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub index: usize,
    pub quantity: Quantity,
    pub alignment: Alignment,
    pub altitude_km: f64,
    /// The eavesdropper density as configured, e.g. `mean 1`; groups altitude series.
    pub eavesdropper_spec: String,
    pub satellites_per_km2: f64,
    pub eavesdroppers_per_km2: f64,
    /// `λ / λ_e`; empty without eavesdroppers.
    pub density_ratio: Option<f64>,
    pub scale: Option<f64>,
    pub mean_visible: Option<f64>,
    pub mean_eavesdroppers: Option<f64>,
    pub gamma: Option<f64>,
    pub analytical: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub mc_trials: Option<u64>,
    pub zero_secrecy_analytical: Option<f64>,
    pub zero_secrecy_mc: Option<f64>,
    pub zero_secrecy_mc_std_error: Option<f64>,
    /// Whether the analytical value and every Monte Carlo estimate agree within
    /// [`AGREEMENT_SIGMAS`] standard errors; empty unless both ran.
    pub within_3se: Option<bool>,
    pub status: Status,
    pub error: Option<String>,
    /// Only filled in when timing was requested, so that plain output stays
    /// byte-reproducible.
    pub wall_time_s: Option<f64>,
}

/// What [`evaluate`] produced for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub analytical: Option<f64>,
    pub zero_secrecy: Option<f64>,
    pub mc: Option<McEstimate>,
}

impl Evaluation {
    pub fn agrees(&self, sigmas: f64) -> Option<bool> {
        let (a, z, mc) = (self.analytical?, self.zero_secrecy?, self.mc?);
        let rate_ok = (a - mc.mean).abs() <= sigmas * mc.std_error;
        let zero_ok = (z - mc.zero_rate_fraction).abs() <= sigmas * mc.zero_fraction_std_error();
        Some(rate_ok && zero_ok)
    }
}

/// Ergodic rate and zero-secrecy probability of `scn` by the requested route(s).
pub fn evaluate(
    scn: &SecrecyScenario,
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<Evaluation, CliError> {
    let (analytical, mc) = rayon::join(
        || -> Result<_, CliError> {
            if !mode.analytical() {
                return Ok(None);
            }
            Ok(Some((
                scn.ergodic_secrecy_rate()?,
                scn.zero_secrecy_probability()?,
            )))
        },
        || -> Result<_, CliError> {
            if !mode.monte_carlo() {
                return Ok(None);
            }
            Ok(Some(estimate_rate(scn, trials, seed)?))
        },
    );
    let analytical = analytical?;
    Ok(Evaluation {
        analytical: analytical.map(|a| a.0),
        zero_secrecy: analytical.map(|a| a.1),
        mc: mc?,
    })
}

/// Stream seed of grid point `index`, so points never share random numbers.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn blank_record(cfg: &Config, index: usize, point: &PointSpec, scale: Option<f64>) -> Record {
    let params = cfg.geometry_params(point);
    let sat = params.satellite_density * KM2;
    let eve = params.eavesdropper_density * KM2;
    Record {
        index,
        quantity: Quantity::Rate,
        alignment: point.alignment,
        altitude_km: point.altitude_km,
        eavesdropper_spec: point.eavesdroppers.to_string(),
        satellites_per_km2: sat,
        eavesdroppers_per_km2: eve,
        density_ratio: (eve > 0.0).then(|| sat / eve),
        scale,
        mean_visible: None,
        mean_eavesdroppers: None,
        gamma: None,
        analytical: None,
        mc_mean: None,
        mc_std_error: None,
        mc_trials: None,
        zero_secrecy_analytical: None,
        zero_secrecy_mc: None,
        zero_secrecy_mc_std_error: None,
        within_3se: None,
        status: Status::Ok,
        error: None,
        wall_time_s: None,
    }
}

fn fail(mut rec: Record, err: CliError) -> Record {
    rec.status = Status::Error;
    rec.error = Some(err.to_string());
    rec
}

/// Evaluates one grid point of `cfg` into a record; errors land in the record.
pub fn run_point(
    cfg: &Config,
    index: usize,
    point: &PointSpec,
    scale: Option<f64>,
    mode: Mode,
) -> Record {
    let start = Instant::now();
    let mut rec = blank_record(cfg, index, point, scale);
    let scn = match cfg.scenario(point) {
        Ok(scn) => scn,
        Err(e) => return fail(rec, e),
    };
    rec.mean_visible = Some(scn.geometry().mean_visible_satellites());
    rec.mean_eavesdroppers = Some(scn.geometry().mean_eavesdroppers());
    let eval = match evaluate(&scn, mode, cfg.trials, point_seed(cfg.seed, index)) {
        Ok(e) => e,
        Err(e) => return fail(rec, e),
    };
    rec.analytical = eval.analytical;
    rec.zero_secrecy_analytical = eval.zero_secrecy;
    if let Some(mc) = eval.mc {
        rec.mc_mean = Some(mc.mean);
        rec.mc_std_error = Some(mc.std_error);
        rec.mc_trials = Some(mc.trials);
        rec.zero_secrecy_mc = Some(mc.zero_rate_fraction);
        rec.zero_secrecy_mc_std_error = Some(mc.zero_fraction_std_error());
    }
    rec.within_3se = eval.agrees(AGREEMENT_SIGMAS);
    rec.wall_time_s = Some(start.elapsed().as_secs_f64());
    rec
}

fn ccdf_records(cfg: &Config, point: &PointSpec, gammas: &[f64], mode: Mode) -> Vec<Record> {
    let start = Instant::now();
    let base = blank_record(cfg, 0, point, None);
    let rows = |f: &dyn Fn(Record) -> Record| -> Vec<Record> {
        gammas
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                f(Record {
                    index: i,
                    quantity: Quantity::Ccdf,
                    gamma: Some(g),
                    ..base.clone()
                })
            })
            .collect()
    };
    let scn = match cfg.scenario(point) {
        Ok(scn) => scn,
        Err(e) => {
            let msg = e.to_string();
            return rows(&|r| fail(r, CliError::Config(msg.clone())));
        }
    };
    let analytical: Vec<Option<Result<f64, String>>> = gammas
        .par_iter()
        .map(|&g| {
            mode.analytical()
                .then(|| scn.secrecy_ccdf(g).map_err(|e| e.to_string()))
        })
        .collect();
    let mc = mode
        .monte_carlo()
        .then(|| estimate_ccdf(&scn, gammas, cfg.trials, cfg.seed));
    let elapsed = start.elapsed().as_secs_f64();
    let mut out = rows(&|r| r);
    for (i, rec) in out.iter_mut().enumerate() {
        rec.mean_visible = Some(scn.geometry().mean_visible_satellites());
        rec.mean_eavesdroppers = Some(scn.geometry().mean_eavesdroppers());
        rec.wall_time_s = Some(elapsed);
        match &analytical[i] {
            Some(Ok(v)) => rec.analytical = Some(*v),
            Some(Err(e)) => {
                rec.status = Status::Error;
                rec.error = Some(e.clone());
            }
            None => {}
        }
        match &mc {
            Some(Ok(curve)) => {
                rec.mc_mean = Some(curve.values[i]);
                rec.mc_std_error = Some(curve.std_error(i));
                rec.mc_trials = curve.trials;
            }
            Some(Err(e)) => {
                rec.status = Status::Error;
                rec.error = Some(e.to_string());
            }
            None => {}
        }
        if let (Some(a), Some(m), Some(se)) = (rec.analytical, rec.mc_mean, rec.mc_std_error) {
            rec.within_3se = Some((a - m).abs() <= AGREEMENT_SIGMAS * se);
        }
    }
    out
}

/// Rows of a sweep plus derived summary lines.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutput {
    pub config_sha256: String,
    pub config: Config,
    pub records: Vec<Record>,
    pub summary: Vec<String>,
}

impl SweepOutput {
    pub fn failed(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status == Status::Error)
            .count()
    }

    pub fn disagreements(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.within_3se == Some(false))
            .count()
    }

    /// Drops wall times so the output depends on config and seed only.
    pub fn without_timing(mut self) -> Self {
        self.records.iter_mut().for_each(|r| r.wall_time_s = None);
        self
    }
}

/// Runs the sweep section of `cfg` with `cfg.mode`, `cfg.trials` and `cfg.seed`.
pub fn run_sweep(cfg: &Config) -> Result<SweepOutput, CliError> {
    let points = cfg.sweep_points()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .expect("sweep_points checked the section");
    let records = if sweep.variable == SweepVariable::GammaGrid {
        if sweep.values.iter().any(|g| *g < 0.0) {
            return Err(CliError::Config("rate thresholds must be >= 0".into()));
        }
        if sweep.values.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::Config("rate thresholds must be ascending".into()));
        }
        ccdf_records(cfg, &points[0].0, &sweep.values, cfg.mode)
    } else {
        points
            .par_iter()
            .enumerate()
            .map(|(i, (p, scale))| run_point(cfg, i, p, *scale, cfg.mode))
            .collect()
    };
    let summary = match sweep.variable {
        SweepVariable::Altitude => argmax_altitudes(&records)
            .into_iter()
            .map(|a| a.to_string())
            .collect(),
        _ => Vec::new(),
    };
    Ok(SweepOutput {
        config_sha256: cfg.digest(),
        config: cfg.clone(),
        records,
        summary,
    })
}

/// Rate versus `λ/λ_e` at 500 km for both alignments and scales ×1, ×4.
pub fn sweep_fig2(cfg: &Config) -> Result<SweepOutput, CliError> {
    run_sweep(&Preset::Fig2.apply(cfg.clone()))
}

/// Rate versus altitude with 275 satellites in total, with per-series argmax lines.
pub fn sweep_fig3(cfg: &Config) -> Result<SweepOutput, CliError> {
    run_sweep(&Preset::Fig3.apply(cfg.clone()))
}

/// Best altitude of one (alignment, eavesdropper) series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesArgmax {
    pub alignment: Alignment,
    pub eavesdropper_spec: String,
    pub altitude_km: f64,
    pub rate: f64,
}

impl std::fmt::Display for SeriesArgmax {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "argmax alignment={} eavesdroppers={} altitude_km={} rate={}",
            self.alignment, self.eavesdropper_spec, self.altitude_km, self.rate
        )
    }
}

/// The rate used to rank rows: analytical when available, else the MC mean.
pub fn headline(rec: &Record) -> Option<f64> {
    rec.analytical.or(rec.mc_mean)
}

/// Argmax altitude of every series, in first-appearance order. Series with a
/// failed point are skipped.
pub fn argmax_altitudes(records: &[Record]) -> Vec<SeriesArgmax> {
    let mut keys: Vec<(Alignment, &str)> = Vec::new();
    for r in records {
        let key = (r.alignment, r.eavesdropper_spec.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .filter_map(|(alignment, spec)| {
            let series: Vec<&Record> = records
                .iter()
                .filter(|r| r.alignment == alignment && r.eavesdropper_spec == spec)
                .collect();
            let rates: Option<Vec<f64>> = series.iter().map(|r| headline(r)).collect();
            let rates = rates?;
            let (best, rate) =
                rates
                    .iter()
                    .enumerate()
                    .fold(
                        (0, f64::NEG_INFINITY),
                        |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
                    );
            Some(SeriesArgmax {
                alignment,
                eavesdropper_spec: spec.to_string(),
                altitude_km: series[best].altitude_km,
                rate,
            })
        })
        .collect()
}

/// Rows of the oracle-agreement check: the base point at `λ_e|A_e| ∈ {0.5, 1, 2}`
/// for both alignments, always in mode `both`.
pub fn validation_records(cfg: &Config) -> Vec<Record> {
    let mut grid = Vec::new();
    for alignment in [Alignment::MainLobe, Alignment::SideLobe] {
        for mean in [0.5, 1.0, 2.0] {
            grid.push(PointSpec {
                eavesdroppers: Density::MeanCount(mean),
                alignment,
                ..cfg.base_point()
            });
        }
    }
    grid.par_iter()
        .enumerate()
        .map(|(i, p)| run_point(cfg, i, p, None, Mode::Both))
        .collect()
}
