//! Shadowed-Rician fading and the two-lobe link budget.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::numerics::{factorial, kummer_1f1, pochhammer};
use crate::{Error, Result, SPEED_OF_LIGHT};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Shadowed-Rician fading with integer Nakagami parameter `m`.
///
/// `H = |ξ + w|²` where `ξ²` is Gamma(m, Ω/m) (the shadowed line-of-sight
/// power) and `w` is circularly-symmetric complex Gaussian with power `2b`.
/// For integer `m` the power density is the finite mixture
/// `f_H(x) = Σ_z ζ(z) xᶻ e^{-(β-c)x}`, `z = 0..m-1`.
#[derive(Debug, Clone)]
pub struct ShadowedRician {
    m: u32,
    b: f64,
    omega: f64,
    beta: f64,
    c_sr: f64,
    zeta: Vec<f64>,
    /// `ζ(z) z! / (β-c)^{z+1}`: mixture weight of the Gamma(z+1, β-c) component.
    weights: Vec<f64>,
    los: Gamma<f64>,
    scatter: Normal<f64>,
}

impl PartialEq for ShadowedRician {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.b == other.b && self.omega == other.omega
    }
}

impl ShadowedRician {
    pub fn new(m: u32, b: f64, omega: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("Nakagami m must be >= 1".into()));
        }
        if !(b.is_finite() && b > 0.0 && omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need b > 0 and Ω > 0, got b={b}, Ω={omega}"
            )));
        }
        let mf = f64::from(m);
        let beta = 1.0 / (2.0 * b);
        let c_sr = omega / (2.0 * b * (2.0 * b * mf + omega));
        if !(beta > c_sr && c_sr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Shadowed-Rician constants violate β > c > 0 (β={beta}, c={c_sr})"
            )));
        }
        let kappa = beta - c_sr;
        let lead = (2.0 * b * mf / (2.0 * b * mf + omega)).powi(m as i32);
        let zeta: Vec<f64> = (0..m)
            .map(|z| {
                let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
                let zf = factorial(z);
                lead * beta * sign * pochhammer(1.0 - mf, z) * c_sr.powi(z as i32) / (zf * zf)
            })
            .collect();
        let weights = zeta
            .iter()
            .enumerate()
            .map(|(z, zeta_z)| zeta_z * factorial(z as u32) / kappa.powi(z as i32 + 1))
            .collect();
        let los = Gamma::new(mf, omega / mf)
            .map_err(|e| Error::InvalidParameter(format!("line-of-sight law: {e}")))?;
        let scatter = Normal::new(0.0, b.sqrt())
            .map_err(|e| Error::InvalidParameter(format!("scatter law: {e}")))?;
        Ok(Self {
            m,
            b,
            omega,
            beta,
            c_sr,
            zeta,
            weights,
            los,
            scatter,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `β = 1/(2b)`
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `c = Ω / (2b(2bm + Ω))`
    pub fn c_sr(&self) -> f64 {
        self.c_sr
    }

    /// `β - c`, the common decay rate of every mixture component.
    pub fn kappa(&self) -> f64 {
        self.beta - self.c_sr
    }

    /// `ζ(z)` for `z = 0..m-1`.
    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    /// Mixture weights `ζ(z) Γ(z+1) / (β-c)^{z+1}`; they sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total mass of the power density (should be 1).
    pub fn normalization(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `E[H]` from the series; equals `2b + Ω`.
    pub fn mean_power(&self) -> f64 {
        let kappa = self.kappa();
        self.zeta
            .iter()
            .enumerate()
            .map(|(z, zeta_z)| zeta_z * factorial(z as u32 + 1) / kappa.powi(z as i32 + 2))
            .sum()
    }

    /// Density of the amplitude `√H`, through `₁F₁(m; 1; ·)`.
    pub fn amplitude_pdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let mf = f64::from(self.m);
        let b = self.b;
        let lead = (2.0 * b * mf / (2.0 * b * mf + self.omega)).powf(mf);
        let hyper = kummer_1f1(mf, 1.0, self.c_sr * x * x)?;
        Ok(lead * x / b * (-x * x / (2.0 * b)).exp() * hyper)
    }

    /// Density of the power `H`.
    pub fn power_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let decay = (-self.kappa() * x).exp();
        self.zeta
            .iter()
            .rev()
            .fold(0.0, |acc, zeta_z| acc * x + zeta_z)
            * decay
    }

    /// `P[H <= x]`.
    pub fn power_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        (1.0 - self.power_ccdf(x)).clamp(0.0, 1.0)
    }

    /// `P[H > x] = Σ_z w_z e^{-κx} Σ_{v<=z} (κx)^v / v!`.
    ///
    /// Evaluated directly rather than as `1 - CDF` so the tail keeps its
    /// relative accuracy.
    pub fn power_ccdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        let kx = self.kappa() * x;
        let decay = (-kx).exp();
        let mut partial = 0.0;
        let mut term = 1.0;
        let mut total = 0.0;
        for (z, w) in self.weights.iter().enumerate() {
            if z > 0 {
                term *= kx / z as f64;
            }
            partial += term;
            total += w * partial;
        }
        total * decay
    }

    /// One draw of the fading power `H`.
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let los_amplitude = self.los.sample(rng).sqrt();
        let re = los_amplitude + self.scatter.sample(rng);
        let im = self.scatter.sample(rng);
        re * re + im * im
    }
}

/// Which transmit lobe the eavesdropper's receive beam sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    #[serde(alias = "main")]
    MainLobe,
    #[serde(alias = "side")]
    SideLobe,
}

impl std::fmt::Display for Alignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Alignment::MainLobe => "main",
            Alignment::SideLobe => "side",
        })
    }
}

/// Link-budget inputs, all linear SI (watts, linear gains, hertz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetParams {
    pub tx_power: f64,
    pub main_tx_gain: f64,
    pub side_tx_gain: f64,
    pub main_rx_gain: f64,
    pub carrier_frequency: f64,
    pub noise_power: f64,
    pub alignment: Alignment,
}

impl LinkBudgetParams {
    /// 43 dBm transmit power, 30/20 dBi transmit lobes, 30 dBi receive,
    /// 2 GHz carrier, and `N₀ W` noise with -174 dBm/Hz over 100 MHz.
    pub fn reference(alignment: Alignment) -> Self {
        Self {
            tx_power: dbm_to_watts(43.0),
            main_tx_gain: db_to_linear(30.0),
            side_tx_gain: db_to_linear(20.0),
            main_rx_gain: db_to_linear(30.0),
            carrier_frequency: 2e9,
            noise_power: dbm_to_watts(-174.0) * 100e6,
            alignment,
        }
    }
}

/// Derived gains of a [`LinkBudget`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveGains {
    /// `G`, serving satellite to typical user (main lobe both ends, with free-space factor).
    pub main: f64,
    /// `Ĝ`, side transmit lobe into a main receive lobe.
    pub side: f64,
    /// `Ḡ = G_e / G`.
    pub relative: f64,
    /// `σ̄² = σ² / (P G)`.
    pub normalized_noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkBudget {
    params: LinkBudgetParams,
    gains: EffectiveGains,
}

impl LinkBudget {
    pub fn new(params: LinkBudgetParams) -> Result<Self> {
        let LinkBudgetParams {
            tx_power,
            main_tx_gain,
            side_tx_gain,
            main_rx_gain,
            carrier_frequency,
            noise_power,
            alignment,
        } = params;
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if ![
            tx_power,
            main_tx_gain,
            side_tx_gain,
            main_rx_gain,
            carrier_frequency,
            noise_power,
        ]
        .into_iter()
        .all(positive)
        {
            return Err(Error::InvalidParameter(format!(
                "link budget entries must be positive and finite: {params:?}"
            )));
        }
        if side_tx_gain > main_tx_gain {
            return Err(Error::InvalidParameter(format!(
                "side-lobe gain {side_tx_gain} exceeds main-lobe gain {main_tx_gain}"
            )));
        }
        let free_space = (SPEED_OF_LIGHT / (4.0 * PI * carrier_frequency)).powi(2);
        let main = main_tx_gain * main_rx_gain * free_space;
        let side = side_tx_gain * main_rx_gain * free_space;
        let relative = match alignment {
            Alignment::MainLobe => 1.0,
            Alignment::SideLobe => side / main,
        };
        Ok(Self {
            params,
            gains: EffectiveGains {
                main,
                side,
                relative,
                normalized_noise: noise_power / (tx_power * main),
            },
        })
    }

    pub fn params(&self) -> &LinkBudgetParams {
        &self.params
    }

    pub fn alignment(&self) -> Alignment {
        self.params.alignment
    }

    pub fn effective_gains(&self) -> EffectiveGains {
        self.gains
    }

    /// `Ḡ`
    pub fn relative_gain(&self) -> f64 {
        self.gains.relative
    }

    /// `σ̄²`
    pub fn normalized_noise(&self) -> f64 {
        self.gains.normalized_noise
    }
}
