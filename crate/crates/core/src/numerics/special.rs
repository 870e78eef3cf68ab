use crate::{Error, Result};

const KUMMER_REL_TOL: f64 = 1e-15;
const KUMMER_MAX_TERMS: usize = 10_000;

/// Rising factorial `(x)_z = x (x+1) ... (x+z-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: f64, z: u32) -> f64 {
    (0..z).fold(1.0, |acc, i| acc * (x + f64::from(i)))
}

/// `Γ(z) = (z-1)!` for positive integers.
///
/// Rejects `z <= 0` rather than returning infinity, so that a stray `Γ(z)`
/// evaluated at `z = 0` surfaces as an error instead of a silent NaN downstream.
pub fn gamma_int(z: i64) -> Result<f64> {
    if z <= 0 {
        return Err(Error::Domain(format!(
            "gamma_int requires a positive integer, got {z}"
        )));
    }
    Ok((1..z).fold(1.0, |acc, i| acc * i as f64))
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

/// Binomial coefficient `C(n, k)` as a float; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Confluent hypergeometric function of the first kind, `₁F₁(a; b; x)`.
///
/// Summed as a power series. Negative arguments go through Kummer's
/// transformation `₁F₁(a; b; x) = eˣ ₁F₁(b-a; b; -x)` first, which keeps the
/// series from cancelling catastrophically.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if !x.is_finite() || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "kummer_1f1 arguments must be finite (a={a}, b={b}, x={x})"
        )));
    }
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::Domain(format!(
            "kummer_1f1 undefined for non-positive integer b={b}"
        )));
    }
    if x < 0.0 {
        return Ok(x.exp() * kummer_series(b - a, b, -x)?);
    }
    kummer_series(a, b, x)
}

fn kummer_series(a: f64, b: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * x / ((b + kf) * (kf + 1.0));
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Past the peak of the terms the tail is dominated by a geometric series.
        if kf > x && term.abs() <= KUMMER_REL_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NumericalFailure {
        message: format!("kummer_1f1({a}, {b}, {x}) did not converge"),
        estimate: sum,
        error_bound: term.abs(),
    })
}
