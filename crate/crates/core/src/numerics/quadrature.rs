use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerances and budgets for every numerical integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections per finite interval.
    pub max_subdivisions: usize,
    /// Truncation threshold for semi-infinite integrals: stop once the
    /// integrand at the frontier is below `tail_epsilon * |running integral|`.
    pub tail_epsilon: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            tail_epsilon: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        rel_tol: f64,
        abs_tol: f64,
        max_subdivisions: usize,
        tail_epsilon: f64,
    ) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            tail_epsilon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) || !positive(self.tail_epsilon) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be strictly positive: {self:?}"
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn accepts(&self, estimate: f64, error: f64) -> bool {
        error <= self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21), positive half.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_365_523,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gk21<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::NumericalFailure {
            message: format!("non-finite integrand on [{lo}, {hi}]"),
            estimate: value,
            error_bound: f64::INFINITY,
        });
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

fn adaptive<F>(f: &mut F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut segments = vec![gk21(f, lo, hi)?];
    for _ in 0..spec.max_subdivisions {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if spec.accepts(total, error) {
            return Ok((total, error));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval collapsed to adjacent floats; nothing left to refine.
            segments.push(seg);
            break;
        }
        segments.push(gk21(f, seg.lo, mid)?);
        segments.push(gk21(f, mid, seg.hi)?);
    }
    let total: f64 = segments.iter().map(|s| s.value).sum();
    let error: f64 = segments.iter().map(|s| s.error).sum();
    if spec.accepts(total, error) {
        Ok((total, error))
    } else {
        Err(Error::NumericalFailure {
            message: format!("subdivision budget exhausted on [{lo}, {hi}]"),
            estimate: total,
            error_bound: error,
        })
    }
}

/// Adaptive Gauss-Kronrod integral of a fallible integrand.
///
/// `hi` may be `f64::INFINITY`. The half-line is then covered by chunks of
/// doubling width starting at `lo`; each chunk is integrated adaptively, and
/// the expansion stops once the integrand at the frontier drops below
/// `tail_epsilon` times the running integral. This is only sound for
/// integrands that are eventually monotone decreasing, which is the case for
/// every complementary CDF integrated here.
pub fn try_integrate_1d<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !lo.is_finite() || hi.is_nan() || hi < lo {
        return Err(Error::Domain(format!(
            "integration bounds must satisfy finite lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if hi.is_finite() {
        if hi == lo {
            return Ok(0.0);
        }
        return adaptive(&mut f, lo, hi, spec).map(|(v, _)| v);
    }

    const MAX_CHUNKS: usize = 64;
    let mut running = 0.0;
    let mut start = lo;
    let mut width = 1.0;
    for _ in 0..MAX_CHUNKS {
        let end = start + width;
        let (value, _) = adaptive(&mut f, start, end, spec)?;
        running += value;
        let frontier = f(end)?;
        if frontier.abs() <= spec.tail_epsilon * running.abs() {
            return Ok(running);
        }
        start = end;
        width *= 2.0;
    }
    Err(Error::NumericalFailure {
        message: format!("integrand did not decay on [{lo}, inf)"),
        estimate: running,
        error_bound: f64::INFINITY,
    })
}

/// [`try_integrate_1d`] for an infallible integrand.
pub fn integrate_1d<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_1d(|x| Ok(f(x)), lo, hi, spec)
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n`, from the usual cosine initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn try_integrate<F>(&self, mut f: F, lo: f64, hi: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(center + half * x)?;
        }
        Ok(sum * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Shared 64- and 128-point rules.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static GL64: OnceLock<GaussLegendre> = OnceLock::new();
    static GL128: OnceLock<GaussLegendre> = OnceLock::new();
    match n {
        64 => GL64.get_or_init(|| GaussLegendre::new(64)),
        128 => GL128.get_or_init(|| GaussLegendre::new(128)),
        _ => panic!("only the 64- and 128-point rules are cached"),
    }
}

/// Integral of a smooth integrand over a bounded interval.
///
/// Tries the fixed 128-point Gauss-Legendre rule, checked against the
/// 64-point rule; when the two disagree beyond tolerance it falls back to the
/// adaptive Gauss-Kronrod path.
pub fn try_integrate_smooth<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Domain(format!(
            "smooth quadrature needs a bounded interval, got [{lo}, {hi}]"
        )));
    }
    if hi == lo {
        return Ok(0.0);
    }
    let fine = gauss_legendre(128).try_integrate(&mut f, lo, hi)?;
    let coarse = gauss_legendre(64).try_integrate(&mut f, lo, hi)?;
    if spec.accepts(fine, (fine - coarse).abs()) {
        return Ok(fine);
    }
    adaptive(&mut f, lo, hi, spec).map(|(v, _)| v)
}

pub fn integrate_smooth<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_smooth(|x| Ok(f(x)), lo, hi, spec)
}
