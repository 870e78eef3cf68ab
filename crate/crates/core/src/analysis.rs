//! Exact secrecy-rate distribution and its ergodic mean.
//!
//! Conditioned on the serving distance `r₁` and the eavesdropper distance
//! `r_e`, the secrecy rate exceeds `γ` exactly when
//! `H_u ≥ r₁^α (2^γ L_e - σ̄²)` with `L_e = σ̄² + Ḡ H_e r_e^{-α}`. The user
//! fading is a finite Gamma mixture, so the exceedance probability reduces to
//! moments `E[Xᵛ e^{-sX}]` of `X = 2^γ L_e - σ̄²`, which are derivatives of
//! the Laplace transform of `X` at `s = (β - c) r₁^α`. Those derivatives are
//! taken in closed form (Leibniz rule over the exponential shift and the
//! rational fading part), then averaged over the two truncated-Rayleigh
//! distance laws and integrated over `γ`.

use serde::Serialize;

use crate::channel::{LinkBudget, ShadowedRician};
use crate::geometry::NetworkGeometry;
use crate::numerics::{
    binomial, factorial, pochhammer, try_integrate_1d, try_integrate_smooth, QuadratureSpec,
};
use crate::{Error, Result};

// Relative slack on the eavesdropper-distance support check.
const SUPPORT_SLACK: f64 = 1e-9;

/// Everything an evaluator needs: geometry, shared fading law, link budget,
/// path-loss exponent and the numerical policy.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyScenario {
    geometry: NetworkGeometry,
    fading: ShadowedRician,
    link: LinkBudget,
    alpha: f64,
    quadrature: QuadratureSpec,
}

impl SecrecyScenario {
    pub fn new(
        geometry: NetworkGeometry,
        fading: ShadowedRician,
        link: LinkBudget,
        path_loss_exponent: f64,
    ) -> Result<Self> {
        if !(path_loss_exponent.is_finite() && path_loss_exponent >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "path-loss exponent must be >= 2, got {path_loss_exponent}"
            )));
        }
        Ok(Self {
            geometry,
            fading,
            link,
            alpha: path_loss_exponent,
            quadrature: QuadratureSpec::default(),
        })
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureSpec) -> Result<Self> {
        quadrature.validate()?;
        self.quadrature = quadrature;
        Ok(self)
    }

    pub fn geometry(&self) -> &NetworkGeometry {
        &self.geometry
    }

    pub fn fading(&self) -> &ShadowedRician {
        &self.fading
    }

    pub fn link(&self) -> &LinkBudget {
        &self.link
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.alpha
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    fn check_gamma(gamma: f64) -> Result<()> {
        if gamma.is_finite() && gamma >= 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "rate threshold must be finite and >= 0, got {gamma}"
            )))
        }
    }

    /// `(A, k)` with `A = (2^γ - 1) σ̄²` and `k = 2^γ Ḡ r_e^{-α}`, so that
    /// `X = A + k H_e`.
    fn shift_and_slope(&self, gamma: f64, re: f64) -> (f64, f64) {
        let scale = gamma.exp2();
        let noise = self.link.normalized_noise();
        let shift = (scale - 1.0) * noise;
        let slope = scale * self.link.relative_gain() * re.powf(-self.alpha);
        (shift, slope)
    }

    fn check_laplace_args(&self, s: f64, gamma: f64, re: f64) -> Result<()> {
        Self::check_gamma(gamma)?;
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::Domain(format!(
                "Laplace argument must be >= 0, got {s}"
            )));
        }
        let lo = self.geometry.r_min() * (1.0 - SUPPORT_SLACK);
        let hi = self.geometry.r_max_eavesdropper() * (1.0 + SUPPORT_SLACK);
        if !(lo..=hi).contains(&re) {
            return Err(Error::Domain(format!(
                "eavesdropper distance {re} outside [{}, {}]",
                self.geometry.r_min(),
                self.geometry.r_max_eavesdropper()
            )));
        }
        let (_, slope) = self.shift_and_slope(gamma, re);
        if self.fading.kappa() + s * slope <= 0.0 {
            return Err(Error::Domain(
                "β - c + s 2^γ Ḡ r_e^{-α} must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `(-1)^v d^v/ds^v E[e^{-sX}] = E[X^v e^{-sX}]`, always non-negative.
    ///
    /// Leibniz over `e^{-sA}` and `Σ_z ζ(z) z! (κ + sk)^{-(z+1)}`; after the
    /// sign flip every term is positive, so nothing cancels.
    fn laplace_moment(&self, v: u32, s: f64, shift: f64, slope: f64) -> f64 {
        let kappa = self.fading.kappa();
        let denom = kappa + s * slope;
        let zeta = self.fading.zeta();
        let outer = (-s * shift).exp();
        let mut total = 0.0;
        for j in 0..=v {
            let n = v - j;
            let shift_part = binomial(v, j) * shift.powi(j as i32);
            if shift_part == 0.0 {
                continue;
            }
            let mut rational = 0.0;
            for (z, zeta_z) in zeta.iter().enumerate() {
                let z = z as u32;
                rational +=
                    zeta_z * factorial(z) * pochhammer(f64::from(z + 1), n) * slope.powi(n as i32)
                        / denom.powi((z + 1 + n) as i32);
            }
            total += shift_part * rational;
        }
        outer * total
    }

    /// Conditional Laplace transform of `2^γ L_e - σ̄²` at distance `re`.
    pub fn laplace_conditional(&self, s: f64, gamma: f64, re: f64) -> Result<f64> {
        self.check_laplace_args(s, gamma, re)?;
        let (shift, slope) = self.shift_and_slope(gamma, re);
        let denom = self.fading.kappa() + s * slope;
        let series: f64 = self
            .fading
            .zeta()
            .iter()
            .enumerate()
            .map(|(z, zeta_z)| zeta_z * factorial(z as u32) / denom.powi(z as i32 + 1))
            .sum();
        Ok((-s * shift).exp() * series)
    }

    /// `v`-th derivative in `s` of [`Self::laplace_conditional`], in closed form.
    pub fn laplace_derivative(&self, v: u32, s: f64, gamma: f64, re: f64) -> Result<f64> {
        self.check_laplace_args(s, gamma, re)?;
        let (shift, slope) = self.shift_and_slope(gamma, re);
        let sign = if v.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * self.laplace_moment(v, s, shift, slope))
    }

    /// `P[secrecy rate >= γ | r₁, r_e]` with the eavesdropper present.
    fn conditional_exceedance(&self, gamma: f64, r1: f64, re: f64) -> f64 {
        let (shift, slope) = self.shift_and_slope(gamma, re);
        let s = self.fading.kappa() * r1.powf(self.alpha);
        let mut total = 0.0;
        let mut s_pow = 1.0;
        let mut moments = Vec::with_capacity(self.fading.m() as usize);
        for v in 0..self.fading.m() {
            if v > 0 {
                s_pow *= s / f64::from(v);
            }
            moments.push(s_pow * self.laplace_moment(v, s, shift, slope));
        }
        let mut partial = 0.0;
        for (w, moment) in self.fading.weights().iter().zip(&moments) {
            partial += moment;
            total += w * partial;
        }
        total.clamp(0.0, 1.0)
    }

    /// CCDF of the secrecy rate given a visible satellite and an empty
    /// eavesdropper cap, i.e. the plain rate CCDF of the typical user.
    pub fn ccdf_no_eavesdropper(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma(gamma)?;
        let threshold = (gamma.exp2() - 1.0) * self.link.normalized_noise();
        let g = &self.geometry;
        let (lo, hi) = g.satellite_distance_support();
        try_integrate_smooth(
            |r1| {
                Ok(self.fading.power_ccdf(threshold * r1.powf(self.alpha))
                    * g.nearest_satellite_pdf(r1))
            },
            lo,
            hi,
            &self.quadrature,
        )
        .map(|p| p.clamp(0.0, 1.0))
    }

    /// CCDF of the secrecy rate given both caps are non-empty.
    pub fn ccdf_with_eavesdropper(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma(gamma)?;
        let g = &self.geometry;
        let (r1_lo, r1_hi) = g.satellite_distance_support();
        let (re_lo, re_hi) = g.eavesdropper_distance_support();
        try_integrate_smooth(
            |re| {
                let density = g.nearest_eavesdropper_pdf(re);
                if density == 0.0 {
                    return Ok(0.0);
                }
                let inner =
                    try_integrate_smooth(
                        |r1| {
                            Ok(self.conditional_exceedance(gamma, r1, re)
                                * g.nearest_satellite_pdf(r1))
                        },
                        r1_lo,
                        r1_hi,
                        &self.quadrature,
                    )?;
                Ok(inner * density)
            },
            re_lo,
            re_hi,
            &self.quadrature,
        )
        .map(|p| p.clamp(0.0, 1.0))
    }

    /// Diagnostic: the with-eavesdropper CCDF with `r_e` pinned to `r₁`.
    #[doc(hidden)]
    pub fn ccdf_with_eavesdropper_at_serving_distance(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma(gamma)?;
        let g = &self.geometry;
        let (lo, hi) = g.satellite_distance_support();
        try_integrate_smooth(
            |r1| Ok(self.conditional_exceedance(gamma, r1, r1) * g.nearest_satellite_pdf(r1)),
            lo,
            hi,
            &self.quadrature,
        )
    }

    /// `P[secrecy rate >= γ]`, unconditionally.
    pub fn secrecy_ccdf(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma(gamma)?;
        let g = &self.geometry;
        let visible = g.visibility_probability();
        if visible == 0.0 {
            return Ok(0.0);
        }
        let absent = (-g.mean_eavesdroppers()).exp();
        let present = g.eavesdropper_presence_probability();
        let mut total = 0.0;
        if absent > 0.0 {
            total += absent * self.ccdf_no_eavesdropper(gamma)?;
        }
        if present > 0.0 {
            total += present * self.ccdf_with_eavesdropper(gamma)?;
        }
        Ok((visible * total).clamp(0.0, 1.0))
    }

    pub fn secrecy_ccdf_curve(&self, gammas: &[f64]) -> Result<CcdfCurve> {
        let values = gammas
            .iter()
            .map(|&g| self.secrecy_ccdf(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(CcdfCurve {
            gammas: gammas.to_vec(),
            values,
            trials: None,
        })
    }

    /// `P[secrecy rate = 0]`.
    pub fn zero_secrecy_probability(&self) -> Result<f64> {
        Ok(1.0 - self.secrecy_ccdf(0.0)?)
    }

    /// Ergodic secrecy rate in bits/s/Hz: the secrecy CCDF integrated over `γ ∈ [0, ∞)`.
    pub fn ergodic_secrecy_rate(&self) -> Result<f64> {
        if self.geometry.visibility_probability() == 0.0 {
            return Ok(0.0);
        }
        try_integrate_1d(
            |gamma| self.secrecy_ccdf(gamma),
            0.0,
            f64::INFINITY,
            &self.quadrature,
        )
    }
}

/// Rate-threshold grid with exceedance probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcdfCurve {
    pub gammas: Vec<f64>,
    pub values: Vec<f64>,
    /// Number of realizations behind an empirical curve; `None` for analytical ones.
    pub trials: Option<u64>,
}

impl CcdfCurve {
    /// Binomial standard error of entry `i` (zero for analytical curves).
    pub fn std_error(&self, i: usize) -> f64 {
        match self.trials {
            Some(n) if n > 0 => {
                let p = self.values[i];
                (p * (1.0 - p) / n as f64).sqrt()
            }
            _ => 0.0,
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Alignment, LinkBudgetParams};
    use crate::geometry::GeometryParams;
    use crate::EARTH_RADIUS_M;

    fn scenario(mean_sat: f64, mean_eve: f64, alignment: Alignment) -> SecrecyScenario {
        let g = GeometryParams::at_altitude(EARTH_RADIUS_M, 500e3)
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

    fn with_fading(scn: &SecrecyScenario, fading: ShadowedRician) -> SecrecyScenario {
        SecrecyScenario::new(
            *scn.geometry(),
            fading,
            *scn.link(),
            scn.path_loss_exponent(),
        )
        .unwrap()
    }

    fn with_relative_gain(scn: &SecrecyScenario, side_db: f64) -> SecrecyScenario {
        let mut p = *scn.link().params();
        p.side_tx_gain = p.main_tx_gain * 10f64.powf(side_db / 10.0);
        p.alignment = Alignment::SideLobe;
        SecrecyScenario::new(
            *scn.geometry(),
            scn.fading().clone(),
            LinkBudget::new(p).unwrap(),
            scn.path_loss_exponent(),
        )
        .unwrap()
    }

    /// Central difference of order `v`, extrapolated twice (h, h/2, h/4).
    fn richardson_derivative(f: &dyn Fn(f64) -> f64, x: f64, v: u32, h: f64) -> f64 {
        let stencil = |h: f64| {
            let mut acc = 0.0;
            for k in 0..=v {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let offset = (f64::from(v) / 2.0 - f64::from(k)) * h;
                acc += sign * binomial(v, k) * f(x + offset);
            }
            acc / h.powi(v as i32)
        };
        let d1 = stencil(h);
        let d2 = stencil(h / 2.0);
        let d3 = stencil(h / 4.0);
        let e1 = (4.0 * d2 - d1) / 3.0;
        let e2 = (4.0 * d3 - d2) / 3.0;
        (16.0 * e2 - e1) / 15.0
    }

    #[test]
    fn laplace_at_origin_is_one() {
        let scn = scenario(10.0, 1.0, Alignment::SideLobe);
        let g = scn.geometry();
        for re in [g.r_min(), 0.5 * (g.r_min() + g.r_max_eavesdropper())] {
            for gamma in [0.0, 1.0, 4.0] {
                let l = scn.laplace_conditional(0.0, gamma, re).unwrap();
                assert!((l - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn laplace_without_eavesdropper_gain_is_pure_shift() {
        let scn = with_relative_gain(&scenario(10.0, 1.0, Alignment::SideLobe), -300.0);
        let noise = scn.link().normalized_noise();
        let re = scn.geometry().r_min();
        for (s, gamma) in [(1e12, 1.0f64), (3e14, 2.5)] {
            let expected = (-s * (gamma.exp2() - 1.0) * noise).exp();
            let got = scn.laplace_conditional(s, gamma, re).unwrap();
            assert!((got - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn laplace_domain_errors() {
        let scn = scenario(10.0, 1.0, Alignment::SideLobe);
        let g = scn.geometry();
        assert!(scn.laplace_conditional(1.0, 1.0, g.r_min() * 0.9).is_err());
        assert!(scn
            .laplace_conditional(1.0, 1.0, g.r_max_eavesdropper() * 1.1)
            .is_err());
        assert!(scn.laplace_conditional(-1.0, 1.0, g.r_min()).is_err());
        assert!(scn.laplace_derivative(1, 1.0, -0.5, g.r_min()).is_err());
        assert!(scn.secrecy_ccdf(f64::NAN).is_err());
    }

    #[test]
    fn zeroth_derivative_is_transform() {
        let scn = scenario(10.0, 1.0, Alignment::SideLobe);
        let re = scn.geometry().r_min() * 1.3;
        for s in [0.0, 1.0, 2e12] {
            let a = scn.laplace_conditional(s, 1.5, re).unwrap();
            let b = scn.laplace_derivative(0, s, 1.5, re).unwrap();
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
    }

    #[test]
    fn first_derivative_matches_central_difference() {
        let scn = scenario(10.0, 1.0, Alignment::SideLobe);
        let re = scn.geometry().r_min();
        // At s = 1 the transform is flat to ~1e-13 and a difference quotient
        // only sees rounding, so check at the evaluation point s = κ R_min^α.
        let s = scn.fading().kappa() * re * re;
        let f = |x: f64| scn.laplace_conditional(x, 1.0, re).unwrap();
        let h = 1e-5 * s;
        let fd = (f(s + h) - f(s - h)) / (2.0 * h);
        let exact = scn.laplace_derivative(1, s, 1.0, re).unwrap();
        assert!(
            (fd - exact).abs() <= 1e-6 * exact.abs(),
            "s={s}: {fd} vs {exact}"
        );
    }

    #[test]
    fn higher_derivatives_match_richardson() {
        let base = scenario(10.0, 1.0, Alignment::SideLobe);
        let scn = with_fading(&base, ShadowedRician::new(5, 0.1, 0.5).unwrap());
        let re = scn.geometry().r_min() * 1.5;
        let s = scn.fading().kappa() * scn.geometry().r_min().powi(2);
        let f = |x: f64| scn.laplace_conditional(x, 2.0, re).unwrap();
        for v in 1..=5u32 {
            let fd = richardson_derivative(&f, s, v, 0.1 * s);
            let exact = scn.laplace_derivative(v, s, 2.0, re).unwrap();
            let rel = (fd - exact).abs() / exact.abs();
            assert!(rel < 1e-5, "v={v}: {fd} vs {exact} (rel {rel:e})");
        }
    }

    #[test]
    fn ccdf_no_eavesdropper_limits() {
        let scn = scenario(10.0, 1.0, Alignment::SideLobe);
        assert!((scn.ccdf_no_eavesdropper(0.0).unwrap() - 1.0).abs() < 1e-12);
        let mut last = 1.0;
        for gamma in [2.0, 6.0, 10.0, 14.0, 20.0, 30.0] {
            let p = scn.ccdf_no_eavesdropper(gamma).unwrap();
            assert!(p <= last);
            last = p;
        }
        assert!(last < 1e-12);
    }

    #[test]
    fn equal_distances_and_gains_give_a_coin_flip() {
        let scn = scenario(10.0, 1.0, Alignment::MainLobe);
        let p = scn.ccdf_with_eavesdropper_at_serving_distance(0.0).unwrap();
        assert!((p - 0.5).abs() < 1e-9, "{p}");
    }

    #[test]
    fn vanishing_eavesdropper_gain_recovers_user_ccdf() {
        let scn = with_relative_gain(&scenario(10.0, 1.0, Alignment::SideLobe), -120.0);
        assert!((scn.link().relative_gain() - 1e-12).abs() < 1e-24);
        for gamma in [0.0, 2.0, 5.0, 8.0, 11.0, 13.0] {
            let with = scn.ccdf_with_eavesdropper(gamma).unwrap();
            let without = scn.ccdf_no_eavesdropper(gamma).unwrap();
            assert!(with <= without + 1e-12);
            assert!(without - with < 1e-6, "γ={gamma}: {with} vs {without}");
        }
    }

    #[test]
    fn empty_constellations() {
        let scn = scenario(0.0, 1.0, Alignment::SideLobe);
        assert_eq!(scn.secrecy_ccdf(0.0).unwrap(), 0.0);
        assert_eq!(scn.secrecy_ccdf(3.0).unwrap(), 0.0);
        assert_eq!(scn.zero_secrecy_probability().unwrap(), 1.0);
        assert_eq!(scn.ergodic_secrecy_rate().unwrap(), 0.0);
    }

    #[test]
    fn no_eavesdroppers_reduces_to_user_rate() {
        let scn = scenario(10.0, 0.0, Alignment::SideLobe);
        let vis = scn.geometry().visibility_probability();
        for gamma in [0.0, 3.0, 9.0] {
            let got = scn.secrecy_ccdf(gamma).unwrap();
            let expected = vis * scn.ccdf_no_eavesdropper(gamma).unwrap();
            assert!((got - expected).abs() < 1e-15);
        }
        let zero = scn.zero_secrecy_probability().unwrap();
        assert!((zero - (1.0 - vis)).abs() < 1e-12);
    }

    #[test]
    fn main_lobe_never_beats_side_lobe() {
        let main = scenario(10.0, 1.0, Alignment::MainLobe);
        let side = scenario(10.0, 1.0, Alignment::SideLobe);
        for gamma in [0.0, 1.0, 3.0, 6.0] {
            assert!(main.secrecy_ccdf(gamma).unwrap() <= side.secrecy_ccdf(gamma).unwrap());
        }
    }

    #[test]
    fn curve_helpers() {
        let scn = scenario(10.0, 1.0, Alignment::SideLobe);
        let curve = scn.secrecy_ccdf_curve(&[0.0, 1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(curve.is_nonincreasing());
        assert_eq!(curve.std_error(0), 0.0);
        assert!(curve.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn rejects_small_path_loss_exponent() {
        let scn = scenario(10.0, 1.0, Alignment::SideLobe);
        assert!(
            SecrecyScenario::new(*scn.geometry(), scn.fading().clone(), *scn.link(), 1.5).is_err()
        );
    }
}
