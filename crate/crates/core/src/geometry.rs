//! Spherical-shell network geometry.
//!
//! The typical user sits at `(0, 0, R_E)`. Satellites live on the shell of
//! radius `R_S`; the ones above the plane at altitude `h_s` over the user form
//! the visible cap. The eavesdropper cap is cut from the Earth sphere by a
//! plane at height `h_e` from the Earth center, perpendicular to the serving
//! satellite's direction, so that both conditional nearest-distance laws are
//! truncated Rayleigh densities on `[R_S - R_E, R_max]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Area of the cap cut from a sphere of `radius` by a plane at
/// `plane_height` from its center (Archimedes' hat-box theorem).
pub fn spherical_cap_area(radius: f64, plane_height: f64) -> f64 {
    2.0 * PI * radius * (radius - plane_height)
}

/// Raw inputs for [`NetworkGeometry`], all SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub earth_radius: f64,
    pub shell_radius: f64,
    /// Satellites per m² of the shell.
    pub satellite_density: f64,
    /// Users per m² of the Earth. Kept for completeness; the typical-user
    /// reduction makes it irrelevant to every statistic computed here.
    pub user_density: f64,
    /// Eavesdroppers per m² of the Earth.
    pub eavesdropper_density: f64,
    /// `h_s`: altitude of the visibility plane above the typical user.
    pub visibility_altitude: f64,
    /// `h_e`: height of the eavesdropper-cap plane above the Earth center.
    pub eavesdropper_plane: f64,
}

impl GeometryParams {
    /// Zero densities, `h_s = 0` and the widest admissible eavesdropper cap
    /// (`h_e = R_E² / R_S`).
    pub fn at_altitude(earth_radius: f64, altitude: f64) -> Self {
        let shell_radius = earth_radius + altitude;
        Self {
            earth_radius,
            shell_radius,
            satellite_density: 0.0,
            user_density: 0.0,
            eavesdropper_density: 0.0,
            visibility_altitude: 0.0,
            eavesdropper_plane: earth_radius * earth_radius / shell_radius,
        }
    }

    /// Sets the satellite density so that the visible cap holds `mean` satellites on average.
    pub fn with_mean_visible(mut self, mean: f64) -> Self {
        let area = spherical_cap_area(
            self.shell_radius,
            self.earth_radius + self.visibility_altitude,
        );
        self.satellite_density = mean / area;
        self
    }

    /// Sets the eavesdropper density so that the eavesdropper cap holds `mean` points on average.
    pub fn with_mean_eavesdroppers(mut self, mean: f64) -> Self {
        let area = spherical_cap_area(self.earth_radius, self.eavesdropper_plane);
        self.eavesdropper_density = mean / area;
        self
    }

    /// Spreads `total` satellites over the whole shell.
    pub fn with_total_satellites(mut self, total: f64) -> Self {
        self.satellite_density = total / (4.0 * PI * self.shell_radius * self.shell_radius);
        self
    }
}

/// Validated geometry with every derived length, area and density cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkGeometry {
    params: GeometryParams,
    r_min: f64,
    r_max_user: f64,
    r_max_eve: f64,
    cap_area: f64,
    eve_cap_area: f64,
    /// `λ R_S / R_E`
    sat_rate: f64,
    /// `λ_e R_E / R_S`
    eve_rate: f64,
    beamwidth: f64,
}

// Relative slack on the h_e lower bound, so that R_E²/R_S recomputed from
// converted units is still accepted.
const PLANE_SLACK: f64 = 1e-12;

impl NetworkGeometry {
    pub fn new(params: GeometryParams) -> Result<Self> {
        let GeometryParams {
            earth_radius: re,
            shell_radius: rs,
            satellite_density,
            user_density,
            eavesdropper_density,
            visibility_altitude: hs,
            eavesdropper_plane: he,
        } = params;

        let finite = [
            re,
            rs,
            satellite_density,
            user_density,
            eavesdropper_density,
            hs,
            he,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "geometry parameters must be finite: {params:?}"
            )));
        }
        if !(re > 0.0 && rs > re) {
            return Err(Error::InvalidParameter(format!(
                "need R_S > R_E > 0, got R_S={rs}, R_E={re}"
            )));
        }
        if satellite_density < 0.0 || user_density < 0.0 || eavesdropper_density < 0.0 {
            return Err(Error::InvalidParameter(
                "densities must be non-negative".into(),
            ));
        }
        if !(0.0..rs - re).contains(&hs) {
            return Err(Error::InvalidParameter(format!(
                "visibility altitude h_s={hs} outside [0, {})",
                rs - re
            )));
        }
        let he_lo = re * re / rs;
        if he < he_lo * (1.0 - PLANE_SLACK) || he >= re {
            return Err(Error::InvalidParameter(format!(
                "eavesdropper plane h_e={he} outside [R_E²/R_S={he_lo}, R_E={re})"
            )));
        }
        let he = he.max(he_lo);

        let r_min = rs - re;
        let r_max_user = (rs * rs - re * re - 2.0 * re * hs).sqrt();
        let r_max_eve = (rs * rs + re * re - 2.0 * rs * he).sqrt();
        Ok(Self {
            params: GeometryParams {
                eavesdropper_plane: he,
                ..params
            },
            r_min,
            r_max_user,
            r_max_eve: r_max_eve.max(r_min),
            cap_area: spherical_cap_area(rs, re + hs),
            eve_cap_area: spherical_cap_area(re, he),
            sat_rate: satellite_density * rs / re,
            eve_rate: eavesdropper_density * re / rs,
            beamwidth: 2.0 * ((re * re - he * he).sqrt() / (rs - he)).atan(),
        })
    }

    pub fn params(&self) -> &GeometryParams {
        &self.params
    }

    pub fn earth_radius(&self) -> f64 {
        self.params.earth_radius
    }

    pub fn shell_radius(&self) -> f64 {
        self.params.shell_radius
    }

    pub fn altitude(&self) -> f64 {
        self.r_min
    }

    pub fn satellite_density(&self) -> f64 {
        self.params.satellite_density
    }

    pub fn eavesdropper_density(&self) -> f64 {
        self.params.eavesdropper_density
    }

    pub fn user_density(&self) -> f64 {
        self.params.user_density
    }

    pub fn visibility_altitude(&self) -> f64 {
        self.params.visibility_altitude
    }

    pub fn eavesdropper_plane(&self) -> f64 {
        self.params.eavesdropper_plane
    }

    /// `R_S - R_E`, the shortest possible link.
    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// Farthest visible satellite from the typical user.
    pub fn r_max_user(&self) -> f64 {
        self.r_max_user
    }

    /// Farthest in-cap eavesdropper from the serving satellite.
    pub fn r_max_eavesdropper(&self) -> f64 {
        self.r_max_eve
    }

    /// `|A|`, area of the visible satellite cap.
    pub fn cap_area_satellite(&self) -> f64 {
        self.cap_area
    }

    /// `|A_e|`, area of the eavesdropper cap.
    pub fn cap_area_eavesdropper(&self) -> f64 {
        self.eve_cap_area
    }

    /// `λ R_S / R_E`, the rate of the satellite distance law.
    pub fn thinned_satellite_density(&self) -> f64 {
        self.sat_rate
    }

    /// `λ_e R_E / R_S`, the rate of the eavesdropper distance law.
    pub fn thinned_eavesdropper_density(&self) -> f64 {
        self.eve_rate
    }

    /// Full beamwidth (radians) whose footprint is the eavesdropper cap.
    pub fn beamwidth(&self) -> f64 {
        self.beamwidth
    }

    /// `λ |A|`
    pub fn mean_visible_satellites(&self) -> f64 {
        self.params.satellite_density * self.cap_area
    }

    /// `λ_e |A_e|`
    pub fn mean_eavesdroppers(&self) -> f64 {
        self.params.eavesdropper_density * self.eve_cap_area
    }

    /// `P[Φ(A) >= 1]`
    pub fn visibility_probability(&self) -> f64 {
        -(-self.mean_visible_satellites()).exp_m1()
    }

    /// `P[Φ_e(A_e) >= 1]`
    pub fn eavesdropper_presence_probability(&self) -> f64 {
        -(-self.mean_eavesdroppers()).exp_m1()
    }

    /// Density of the serving distance given at least one visible satellite.
    pub fn nearest_satellite_pdf(&self, r: f64) -> f64 {
        truncated_rayleigh_pdf(self.sat_rate, self.r_min, self.r_max_user, r)
    }

    /// Interval carrying all but ~1e-16 of the serving-distance mass.
    pub fn satellite_distance_support(&self) -> (f64, f64) {
        (
            self.r_min,
            effective_upper(self.sat_rate, self.r_min, self.r_max_user),
        )
    }

    /// Interval carrying all but ~1e-16 of the eavesdropper-distance mass.
    pub fn eavesdropper_distance_support(&self) -> (f64, f64) {
        (
            self.r_min,
            effective_upper(self.eve_rate, self.r_min, self.r_max_eve),
        )
    }

    pub fn nearest_satellite_cdf(&self, r: f64) -> f64 {
        truncated_rayleigh_cdf(self.sat_rate, self.r_min, self.r_max_user, r)
    }

    /// Density of the serving-satellite-to-nearest-eavesdropper distance
    /// given at least one eavesdropper in the cap.
    pub fn nearest_eavesdropper_pdf(&self, r: f64) -> f64 {
        truncated_rayleigh_pdf(self.eve_rate, self.r_min, self.r_max_eve, r)
    }

    pub fn nearest_eavesdropper_cdf(&self, r: f64) -> f64 {
        truncated_rayleigh_cdf(self.eve_rate, self.r_min, self.r_max_eve, r)
    }
}

/// `2πρ r exp(-πρ(r² - lo²)) / (1 - exp(-πρ(hi² - lo²)))` on `[lo, hi]`.
///
/// The `exp(+πρ lo²)` normalizer and `exp(-πρ r²)` are fused into one
/// exponent: separately, the first overflows for realistic densities. As
/// `ρ → 0` the density tends to `2r / (hi² - lo²)`, which `exp_m1` recovers.
fn truncated_rayleigh_pdf(rate: f64, lo: f64, hi: f64, r: f64) -> f64 {
    if r < lo || r > hi || hi <= lo {
        return 0.0;
    }
    let span = hi * hi - lo * lo;
    let total = PI * rate * span;
    let shape = if total > 0.0 {
        total / -(-total).exp_m1()
    } else {
        1.0
    };
    2.0 * r / span * shape * (-PI * rate * (r * r - lo * lo)).exp()
}

/// Smallest `r <= hi` beyond which the truncated-Rayleigh tail mass is below 1e-16.
fn effective_upper(rate: f64, lo: f64, hi: f64) -> f64 {
    let total = PI * rate * (hi * hi - lo * lo);
    if total <= 0.0 {
        return hi;
    }
    let exponent = 16.0 * std::f64::consts::LN_10 - (-(-total).exp_m1()).ln();
    if exponent >= total {
        return hi;
    }
    (lo * lo + exponent / (PI * rate)).sqrt().min(hi)
}

fn truncated_rayleigh_cdf(rate: f64, lo: f64, hi: f64, r: f64) -> f64 {
    if r <= lo {
        return 0.0;
    }
    if r >= hi {
        return 1.0;
    }
    let part = PI * rate * (r * r - lo * lo);
    let total = PI * rate * (hi * hi - lo * lo);
    if total > 0.0 {
        (-part).exp_m1() / (-total).exp_m1()
    } else {
        (r * r - lo * lo) / (hi * hi - lo * lo)
    }
}
