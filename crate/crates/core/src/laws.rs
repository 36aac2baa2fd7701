//! Distributions of the composite fading variables and the expectations
//! built from them.
//!
//! `X = |h1|^2 |g|^2` is a product of two exponentials (keyhole law) and
//! `W = (|h1|^2 + |h2|^2) |g|^2` a gamma(2) variable times an exponential.
//! Both are parameterized by the mean product `lambda = lambda_s lambda_d`.

use crate::error::{Error, Result};
use crate::specfun::{
    half_x2_k2, integrate_finite, integrate_semi_infinite_scaled, one_minus_half_x2_k2, one_minus_x_k1, x_k1,
    QuadratureSpec,
};

/// Round-off allowance before a probability outside [0, 1] is an error.
const PROBABILITY_SLACK: f64 = 1e-8;

/// Clamps round-off excursions into [0, 1]; larger excursions are errors.
pub fn check_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::ProbabilityExcursion { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `Pr{X > x}` for the product of exponentials with mean product `lambda`.
pub fn keyhole_ccdf(x: f64, lambda: f64) -> f64 {
    x_k1(2.0 * (x / lambda).sqrt())
}

/// `Pr{X <= x}`, accurate for small probabilities.
pub fn keyhole_cdf(x: f64, lambda: f64) -> f64 {
    one_minus_x_k1(2.0 * (x / lambda).sqrt())
}

/// `Pr{W > w}` for gamma(2) times exponential with mean product `lambda`.
pub fn gamma_keyhole_ccdf(w: f64, lambda: f64) -> f64 {
    half_x2_k2(2.0 * (w / lambda).sqrt())
}

/// `Pr{W <= w}`, accurate for small probabilities.
pub fn gamma_keyhole_cdf(w: f64, lambda: f64) -> f64 {
    one_minus_half_x2_k2(2.0 * (w / lambda).sqrt())
}

/// `E ln(1 + c X)` for the keyhole variable.
pub fn keyhole_log_mean(c: f64, lambda: f64, quad: &QuadratureSpec) -> Result<f64> {
    log_mean_from_ccdf(c * lambda, |t| x_k1(2.0 * t.sqrt()), quad)
}

/// `E ln(1 + c W)` for the gamma-keyhole variable.
pub fn gamma_keyhole_log_mean(c: f64, lambda: f64, quad: &QuadratureSpec) -> Result<f64> {
    log_mean_from_ccdf(c * lambda, |t| half_x2_k2(2.0 * t.sqrt()), quad)
}

// E ln(1 + C Z) = ∫ C ccdf(t) / (1 + C t) dt for a unit-scale variable Z.
fn log_mean_from_ccdf<F>(c: f64, ccdf: F, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if c == 0.0 {
        return Ok(0.0);
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale {c} must be positive")));
    }
    let f = |t: f64| c * ccdf(t) / (1.0 + c * t);
    integrate_positive_axis(f, 1.0f64.min(1.0 / c), 1.0, quad)
}

/// `∫_0^∞ f`, split at `knee` (finite part) with the tail mapped at `scale`.
pub fn integrate_positive_axis<F>(f: F, knee: f64, scale: f64, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let head = integrate_finite(&f, 0.0, knee, quad)?;
    let tail = integrate_semi_infinite_scaled(|u| f(knee + u), scale, quad)?;
    Ok(head + tail)
}

/// Carries the first error raised inside an integrand out of the
/// quadrature, which itself only sees a NaN.
#[derive(Default)]
pub struct FirstError(std::cell::RefCell<Option<Error>>);

impl FirstError {
    pub fn value(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    /// The stored error if any, otherwise `outcome`.
    pub fn finish(self, outcome: Result<f64>) -> Result<f64> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => outcome,
        }
    }
}

/// Tighter tolerances for integrals nested inside another quadrature, so
/// the inner noise stays well below the outer target.
pub fn inner_spec(quad: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: (quad.rel_tol * 1e-2).max(1e-13),
        abs_tol: (quad.abs_tol * 1e-2).max(1e-300),
        max_subdivisions: quad.max_subdivisions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_guard() {
        assert_eq!(check_probability(-1e-10).unwrap(), 0.0);
        assert_eq!(check_probability(1.0 + 1e-10).unwrap(), 1.0);
        assert!(check_probability(-1e-6).is_err());
        assert!(check_probability(f64::NAN).is_err());
    }

    #[test]
    fn cdf_limits() {
        assert_eq!(keyhole_cdf(0.0, 1.0), 0.0);
        assert_eq!(gamma_keyhole_cdf(0.0, 1.0), 0.0);
        assert!(keyhole_ccdf(1e4, 1.0) < 1e-80);
        assert!(gamma_keyhole_ccdf(1e4, 1.0) < 1e-80);
        for &x in &[0.01, 0.3, 2.0, 9.0] {
            assert!((keyhole_cdf(x, 2.0) + keyhole_ccdf(x, 2.0) - 1.0).abs() < 1e-14);
            assert!((gamma_keyhole_cdf(x, 2.0) + gamma_keyhole_ccdf(x, 2.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn log_mean_small_scale_matches_first_moment() {
        // E ln(1 + cX) ≈ c E X for tiny c; E X = lambda, E W = 2 lambda.
        let q = QuadratureSpec::default();
        let c = 1e-7;
        assert!(((keyhole_log_mean(c, 3.0, &q).unwrap() / (3.0 * c)) - 1.0).abs() < 1e-5);
        assert!(((gamma_keyhole_log_mean(c, 3.0, &q).unwrap() / (6.0 * c)) - 1.0).abs() < 1e-5);
        assert_eq!(keyhole_log_mean(0.0, 1.0, &q).unwrap(), 0.0);
    }
}
