//! JSON configuration in user units (km, dBm, dBi) and its conversion to a
//! [`SecrecyScenario`].
//!
//! Every field has a default, so `{}` resolves to the reference setting: a
//! 500 km shell with ten visible satellites on average, one eavesdropper on
//! average in the serving footprint, main-lobe alignment and α = 2.

use std::f64::consts::PI;
use std::path::Path;

use leo_secrecy::channel::{db_to_linear, dbm_to_watts};
use leo_secrecy::geometry::spherical_cap_area;
use leo_secrecy::{
    Alignment, GeometryParams, LinkBudget, LinkBudgetParams, NetworkGeometry, QuadratureSpec,
    SecrecyScenario, ShadowedRician,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

const KM: f64 = 1e3;
const KM2: f64 = 1e6;

/// A point-process density, given in whichever unit is most natural.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    /// Points per km² of the host sphere.
    PerKm2(f64),
    /// Mean number of points in the relevant cap (`λ|A|` or `λ_e|A_e|`),
    /// re-resolved at every altitude.
    MeanCount(f64),
    /// Points on the whole host sphere.
    Total(f64),
}

impl Density {
    fn per_m2(self, sphere_radius: f64, cap_area: f64) -> f64 {
        match self {
            Density::PerKm2(v) => v / KM2,
            Density::MeanCount(v) => v / cap_area,
            Density::Total(v) => v / (4.0 * PI * sphere_radius * sphere_radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub earth_radius_km: f64,
    pub altitude_km: f64,
    /// `h_s` above the user.
    pub visibility_altitude_km: f64,
    /// `h_e` from the Earth center; `None` means `R_E² / R_S`.
    pub eavesdropper_plane_km: Option<f64>,
    pub satellites: Density,
    pub eavesdroppers: Density,
    pub users_per_km2: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            earth_radius_km: 6371.0,
            altitude_km: 500.0,
            visibility_altitude_km: 0.0,
            eavesdropper_plane_km: None,
            satellites: Density::MeanCount(10.0),
            eavesdroppers: Density::MeanCount(1.0),
            users_per_km2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FadingConfig {
    pub m: u32,
    pub b: f64,
    pub omega: f64,
}

impl Default for FadingConfig {
    fn default() -> Self {
        Self {
            m: 1,
            b: 0.063,
            omega: 8.97e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub tx_power_dbm: f64,
    pub main_tx_gain_dbi: f64,
    pub side_tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub carrier_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub alignment: Alignment,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 43.0,
            main_tx_gain_dbi: 30.0,
            side_tx_gain_dbi: 20.0,
            rx_gain_dbi: 30.0,
            carrier_hz: 2e9,
            noise_psd_dbm_hz: -174.0,
            bandwidth_hz: 100e6,
            alignment: Alignment::MainLobe,
        }
    }
}

impl LinkConfig {
    pub fn params(&self, alignment: Alignment) -> LinkBudgetParams {
        LinkBudgetParams {
            tx_power: dbm_to_watts(self.tx_power_dbm),
            main_tx_gain: db_to_linear(self.main_tx_gain_dbi),
            side_tx_gain: db_to_linear(self.side_tx_gain_dbi),
            main_rx_gain: db_to_linear(self.rx_gain_dbi),
            carrier_frequency: self.carrier_hz,
            noise_power: dbm_to_watts(self.noise_psd_dbm_hz) * self.bandwidth_hz,
            alignment,
        }
    }
}

/// Which evaluator(s) a point runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytical,
    #[serde(alias = "montecarlo")]
    #[value(alias = "montecarlo")]
    Mc,
    Both,
}

impl Mode {
    pub fn analytical(self) -> bool {
        matches!(self, Mode::Analytical | Mode::Both)
    }

    pub fn monte_carlo(self) -> bool {
        matches!(self, Mode::Mc | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// `values` are altitudes in km.
    Altitude,
    /// `values` are mean eavesdropper counts `λ_e|A_e|`.
    EavesdropperDensity,
    /// `values` are `λ / λ_e`, applied at every entry of `scales`.
    DensityRatio,
    /// `values` are rate thresholds γ in bits/s/Hz; rows are CCDF values.
    GammaGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Multipliers on both densities for `density_ratio` sweeps.
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    /// Eavesdropper series for `altitude` sweeps; defaults to the geometry section.
    #[serde(default)]
    pub eavesdroppers: Vec<Density>,
    /// Defaults to the link section's alignment.
    #[serde(default)]
    pub alignments: Vec<Alignment>,
}

fn default_scales() -> Vec<f64> {
    vec![1.0]
}

fn default_alpha() -> f64 {
    2.0
}

fn default_trials() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    2024
}

fn default_mode() -> Mode {
    Mode::Both
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub fading: FadingConfig,
    #[serde(default)]
    pub link: LinkConfig,
    #[serde(default = "default_alpha")]
    pub path_loss_exponent: f64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl Default for Config {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config resolves to defaults")
    }
}

/// Fully resolved inputs of one evaluation point, in user units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointSpec {
    pub altitude_km: f64,
    pub satellites: Density,
    pub eavesdroppers: Density,
    pub alignment: Alignment,
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Hex SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config always serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    /// The point described by the geometry and link sections alone.
    pub fn base_point(&self) -> PointSpec {
        PointSpec {
            altitude_km: self.geometry.altitude_km,
            satellites: self.geometry.satellites,
            eavesdroppers: self.geometry.eavesdroppers,
            alignment: self.link.alignment,
        }
    }

    /// Geometry parameters (SI) for `point`. Not validated.
    pub fn geometry_params(&self, point: &PointSpec) -> GeometryParams {
        let g = &self.geometry;
        let re = g.earth_radius_km * KM;
        let rs = re + point.altitude_km * KM;
        let hs = g.visibility_altitude_km * KM;
        let he = g.eavesdropper_plane_km.map_or(re * re / rs, |v| v * KM);
        GeometryParams {
            earth_radius: re,
            shell_radius: rs,
            satellite_density: point.satellites.per_m2(rs, spherical_cap_area(rs, re + hs)),
            user_density: g.users_per_km2 / KM2,
            eavesdropper_density: point.eavesdroppers.per_m2(re, spherical_cap_area(re, he)),
            visibility_altitude: hs,
            eavesdropper_plane: he,
        }
    }

    pub fn scenario(&self, point: &PointSpec) -> Result<SecrecyScenario, CliError> {
        let geometry = NetworkGeometry::new(self.geometry_params(point))?;
        let f = &self.fading;
        let fading = ShadowedRician::new(f.m, f.b, f.omega)?;
        let link = LinkBudget::new(self.link.params(point.alignment))?;
        Ok(
            SecrecyScenario::new(geometry, fading, link, self.path_loss_exponent)?
                .with_quadrature(self.quadrature)?,
        )
    }

    /// The evaluation grid of the sweep section, in row order.
    pub fn sweep_points(&self) -> Result<Vec<(PointSpec, Option<f64>)>, CliError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("missing sweep section".into()))?;
        if sweep.values.is_empty() {
            return Err(CliError::Config("sweep grid is empty".into()));
        }
        if sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config("sweep values must be finite".into()));
        }
        let base = self.base_point();
        let alignments = if sweep.alignments.is_empty() {
            vec![base.alignment]
        } else {
            sweep.alignments.clone()
        };
        let mut points = Vec::new();
        for &alignment in &alignments {
            let base = PointSpec { alignment, ..base };
            match sweep.variable {
                SweepVariable::Altitude => {
                    let series = if sweep.eavesdroppers.is_empty() {
                        vec![base.eavesdroppers]
                    } else {
                        sweep.eavesdroppers.clone()
                    };
                    for eavesdroppers in series {
                        for &h in &sweep.values {
                            points.push((
                                PointSpec {
                                    altitude_km: h,
                                    eavesdroppers,
                                    ..base
                                },
                                None,
                            ));
                        }
                    }
                }
                SweepVariable::EavesdropperDensity => {
                    for &mean in &sweep.values {
                        points.push((
                            PointSpec {
                                eavesdroppers: Density::MeanCount(mean),
                                ..base
                            },
                            None,
                        ));
                    }
                }
                SweepVariable::DensityRatio => {
                    if sweep.scales.is_empty() {
                        return Err(CliError::Config("density-ratio sweep needs scales".into()));
                    }
                    if sweep.values.iter().any(|r| *r <= 0.0) {
                        return Err(CliError::Config("density ratios must be positive".into()));
                    }
                    let sat = self.geometry_params(&base).satellite_density * KM2;
                    for &scale in &sweep.scales {
                        for &ratio in &sweep.values {
                            let lambda = sat * scale;
                            points.push((
                                PointSpec {
                                    satellites: Density::PerKm2(lambda),
                                    eavesdroppers: Density::PerKm2(lambda / ratio),
                                    ..base
                                },
                                Some(scale),
                            ));
                        }
                    }
                }
                SweepVariable::GammaGrid => {
                    points.push((base, None));
                    break;
                }
            }
        }
        Ok(points)
    }
}

/// Built-in sweeps reproducing the two experiments of the reference setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Rate versus `λ/λ_e` at 500 km, both alignments, density scales ×1 and ×4.
    Fig2,
    /// Rate versus altitude with 275 satellites in total, for
    /// `λ_e|A_e| ∈ {0.1, 1, 5}`.
    Fig3,
}

impl Preset {
    /// Applies the preset's sweep to `base`, keeping its fading, link and run settings.
    pub fn apply(self, mut base: Config) -> Config {
        match self {
            Preset::Fig2 => {
                base.geometry.altitude_km = 500.0;
                base.geometry.satellites = Density::MeanCount(10.0);
                base.sweep = Some(SweepConfig {
                    variable: SweepVariable::DensityRatio,
                    values: vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
                    scales: vec![1.0, 4.0],
                    eavesdroppers: Vec::new(),
                    alignments: vec![Alignment::MainLobe, Alignment::SideLobe],
                });
            }
            Preset::Fig3 => {
                base.geometry.satellites = Density::Total(275.0);
                base.sweep = Some(SweepConfig {
                    variable: SweepVariable::Altitude,
                    values: vec![300.0, 500.0, 800.0, 1200.0, 1600.0, 2000.0],
                    scales: default_scales(),
                    eavesdroppers: [0.1, 1.0, 5.0].map(Density::MeanCount).to_vec(),
                    alignments: vec![Alignment::MainLobe],
                });
            }
        }
        base
    }
}

impl std::fmt::Display for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Density::PerKm2(v) => write!(f, "{v}/km2"),
            Density::MeanCount(v) => write!(f, "mean {v}"),
            Density::Total(v) => write!(f, "total {v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference() {
        let cfg = Config::from_json("{}").unwrap();
        assert_eq!(cfg, Config::default());
        let scn = cfg.scenario(&cfg.base_point()).unwrap();
        let g = scn.geometry();
        assert!((g.mean_visible_satellites() - 10.0).abs() < 1e-9);
        assert!((g.mean_eavesdroppers() - 1.0).abs() < 1e-9);
        assert!((g.altitude() - 500e3).abs() < 1e-6);
        assert_eq!(scn.link().alignment(), Alignment::MainLobe);
        assert_eq!(scn.path_loss_exponent(), 2.0);
    }

    #[test]
    fn unit_conversions() {
        let cfg = Config::from_json(
            r#"{"geometry": {"satellites": {"per_km2": 2e-6},
                             "eavesdroppers": {"total": 1000},
                             "users_per_km2": 3}}"#,
        )
        .unwrap();
        let p = cfg.geometry_params(&cfg.base_point());
        assert!((p.satellite_density - 2e-12).abs() < 1e-24);
        assert!((p.user_density - 3e-6).abs() < 1e-18);
        let re = 6371e3;
        let expected = 1000.0 / (4.0 * PI * re * re);
        assert!((p.eavesdropper_density / expected - 1.0).abs() < 1e-12);
        assert_eq!(p.shell_radius, re + 500e3);
        assert!((p.eavesdropper_plane - re * re / (re + 500e3)).abs() < 1e-6);
    }

    #[test]
    fn link_in_decibels() {
        let lp = LinkConfig::default().params(Alignment::SideLobe);
        assert!((lp.tx_power - 19.952623149688797).abs() < 1e-12);
        assert!((lp.main_tx_gain - 1000.0).abs() < 1e-9);
        assert!((lp.side_tx_gain - 100.0).abs() < 1e-10);
        // -174 dBm/Hz over 100 MHz is -94 dBm.
        assert!((lp.noise_power / dbm_to_watts(-94.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(Config::from_json(r#"{"geometry": {"altitude": 500}}"#).is_err());
        assert!(Config::from_json(r#"{"fadng": {}}"#).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = Config::default();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.seed += 1;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn total_count_follows_altitude() {
        let cfg = Preset::Fig3.apply(Config::default());
        let points = cfg.sweep_points().unwrap();
        assert_eq!(points.len(), 18);
        for (p, _) in &points {
            let gp = cfg.geometry_params(p);
            let n = gp.satellite_density * 4.0 * PI * gp.shell_radius.powi(2);
            assert!((n - 275.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ratio_points_keep_ratio_across_scales() {
        let cfg = Preset::Fig2.apply(Config::default());
        let points = cfg.sweep_points().unwrap();
        assert_eq!(points.len(), 24);
        for (p, scale) in &points {
            let gp = cfg.geometry_params(p);
            let ratio = gp.satellite_density / gp.eavesdropper_density;
            assert!(cfg
                .sweep
                .as_ref()
                .unwrap()
                .values
                .iter()
                .any(|r| (ratio / r - 1.0).abs() < 1e-12));
            assert!(scale.is_some());
        }
    }

    #[test]
    fn empty_grid_rejected() {
        let mut cfg = Preset::Fig2.apply(Config::default());
        cfg.sweep.as_mut().unwrap().values.clear();
        assert!(cfg.sweep_points().is_err());
        cfg.sweep = None;
        assert!(cfg.sweep_points().is_err());
    }

    #[test]
    fn density_value_roundtrip() {
        for d in [
            Density::PerKm2(1.5),
            Density::MeanCount(2.0),
            Density::Total(3.0),
        ] {
            let json = serde_json::to_string(&d).unwrap();
            let back: Density = serde_json::from_str(&json).unwrap();
            assert_eq!(back, d);
        }
    }
}
