//! Generalized exponential integrals `E_n(x) = ∫_1^∞ e^{-xt} / t^n dt`.

use crate::error::{domain, Result};

use super::EULER_GAMMA;

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 1000;

/// `E_n(x)` for `n >= 1`, `x > 0`.
pub fn expint_en(n: u32, x: f64) -> Result<f64> {
    check(n, x)?;
    if x > 1.0 {
        Ok(continued_fraction(n, x) * (-x).exp())
    } else {
        Ok(series(n, x))
    }
}

/// `e^x E_n(x)`, finite for every positive `x` (no overflow or underflow).
pub fn expint_en_scaled(n: u32, x: f64) -> Result<f64> {
    check(n, x)?;
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x > 1.0 {
        Ok(continued_fraction(n, x))
    } else {
        Ok(series(n, x) * x.exp())
    }
}

fn check(n: u32, x: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("expint_en", "order must be at least 1"));
    }
    if !(x > 0.0) {
        return Err(domain("expint_en", format!("x = {x} must be positive")));
    }
    Ok(())
}

// Modified Lentz evaluation of the continued fraction for e^x E_n(x), x > 1.
fn continued_fraction(n: u32, x: f64) -> f64 {
    let nm1 = f64::from(n - 1);
    let mut b = x + f64::from(n);
    let mut c = 1.0 / f64::MIN_POSITIVE;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        let an = -fi * (nm1 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn series(n: u32, x: f64) -> f64 {
    let nm1 = n - 1;
    let mut ans = if nm1 != 0 { 1.0 / f64::from(nm1) } else { -x.ln() - EULER_GAMMA };
    let mut fact = 1.0;
    for i in 1..MAX_TERMS as u32 {
        fact *= -x / f64::from(i);
        let del = if i != nm1 {
            -fact / (f64::from(i) - f64::from(nm1))
        } else {
            let psi = -EULER_GAMMA + (1..=nm1).map(|j| 1.0 / f64::from(j)).sum::<f64>();
            fact * (-x.ln() + psi)
        };
        ans += del;
        if del.abs() < ans.abs() * EPS {
            break;
        }
    }
    ans
}
