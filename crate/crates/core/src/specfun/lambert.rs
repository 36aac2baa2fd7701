//! Principal branch of the Lambert W function.

use crate::error::{domain, Result};

// 1/e split into a double and its rounding residue.
const INV_E_HI: f64 = 0.367_879_441_171_442_33;
const INV_E_LO: f64 = -1.242_875_367_278_836_3e-17;
const MAX_HALLEY: usize = 8;
/// Tolerated undershoot of `-1/e` caused by rounding in the caller.
const BRANCH_SLACK: f64 = 1e-15;

/// `W0(x)`, the real solution of `w e^w = x` with `w >= -1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("lambert_w0", "x is NaN"));
    }
    let offset = (x + INV_E_HI) + INV_E_LO; // x + 1/e
    if offset < 0.0 {
        if offset >= -BRANCH_SLACK {
            return Ok(-1.0);
        }
        return Err(domain("lambert_w0", format!("x = {x} is below -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    if x < -0.25 {
        let p = (2.0 * std::f64::consts::E * offset).sqrt();
        let w = branch_series(p);
        if p < 1e-3 {
            // Series truncation error is O(p^6) here and Halley stalls on the
            // vanishing derivative.
            return Ok(w);
        }
        return Ok(halley_exp(x, w));
    }
    if x <= std::f64::consts::E {
        // Rational initial guess, accurate to a few percent on [-0.25, e].
        let w = x * (1.0 + 4.0 / 3.0 * x) / (1.0 + 7.0 / 3.0 * x + 5.0 / 6.0 * x * x);
        return Ok(halley_exp(x, w));
    }
    let l1 = x.ln();
    let l2 = l1.ln();
    Ok(halley_log(l1, l1 - l2 + l2 / l1))
}

fn branch_series(p: f64) -> f64 {
    -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))))
}

// Halley on f(w) = w e^w - x.
fn halley_exp(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let next = w - f / denom;
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs());
        w = next;
        if done {
            break;
        }
    }
    w
}

// Halley on g(w) = w + ln w - ln x, used for x > e where w e^w may overflow.
fn halley_log(ln_x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_HALLEY {
        let g = w + w.ln() - ln_x;
        let g1 = 1.0 + 1.0 / w;
        let g2 = -1.0 / (w * w);
        let next = w - 2.0 * g * g1 / (2.0 * g1 * g1 - g * g2);
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * next.abs();
        w = next;
        if done {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(-1.0 / E).unwrap() + 1.0).abs() < 1e-7);
    }

    #[test]
    fn below_branch_point_is_rejected() {
        assert!(lambert_w0(-0.3679).is_err());
        assert!(lambert_w0(-1.0).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn huge_arguments() {
        let x = 1e300_f64;
        let w = lambert_w0(x).unwrap();
        assert!(((w + w.ln() - x.ln()) / x.ln()).abs() < 1e-15);
    }
}
