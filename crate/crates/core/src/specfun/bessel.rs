//! Modified Bessel functions of the second kind, orders 0, 1 and 2.
//!
//! Below `SERIES_LIMIT` the ascending series are summed directly; above it
//! K0 and K1 come from Steed's continued fraction (Temme's CF2 form) and K2
//! from the forward recurrence `K2 = K0 + 2 K1 / x`.
//!
//! Besides the plain values the module exposes the combinations `x K1(x)`
//! and `(x^2/2) K2(x)` together with their complements, which are the
//! tail probabilities of the product-of-exponentials and gamma-times-
//! exponential laws. The complements are summed without forming `1 - ...`
//! so small outage probabilities keep full relative accuracy.

use crate::error::{domain, Result};

use super::EULER_GAMMA;

const SERIES_LIMIT: f64 = 2.0;
const EPS: f64 = 1e-17;
const MAX_TERMS: usize = 500;

/// `K_order(x)` for `order` in {0, 1, 2} and `x > 0`.
///
/// Returns 0 once `exp(-x)` underflows.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_k", format!("x = {x} must be positive")));
    }
    if x == f64::INFINITY {
        return match order {
            0..=2 => Ok(0.0),
            _ => Err(domain("bessel_k", format!("order {order} not in {{0, 1, 2}}"))),
        };
    }
    let (k0, k1) = k0_k1(x);
    match order {
        0 => Ok(k0),
        1 => Ok(k1),
        2 => Ok(k0 + 2.0 * k1 / x),
        _ => Err(domain("bessel_k", format!("order {order} not in {{0, 1, 2}}"))),
    }
}

/// `x K1(x)`, extended continuously by its limit 1 at `x = 0`.
pub fn x_k1(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x <= SERIES_LIMIT {
        1.0 - one_minus_x_k1_series(x)
    } else {
        x * k0_k1_cf(x).1
    }
}

/// `1 - x K1(x)` without cancellation near `x = 0`.
pub fn one_minus_x_k1(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x <= SERIES_LIMIT {
        one_minus_x_k1_series(x)
    } else {
        1.0 - x * k0_k1_cf(x).1
    }
}

/// `(x^2 / 2) K2(x)`, extended continuously by its limit 1 at `x = 0`.
pub fn half_x2_k2(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    let (k0, k1) = k0_k1(x);
    x * (0.5 * x * k0 + k1)
}

/// `1 - (x^2 / 2) K2(x)` without cancellation near `x = 0`.
pub fn one_minus_half_x2_k2(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x <= SERIES_LIMIT {
        let k0 = k0_series(x);
        one_minus_x_k1_series(x) - 0.5 * x * x * k0
    } else {
        1.0 - half_x2_k2(x)
    }
}

fn k0_k1(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        (k0_series(x), k1_series(x))
    } else {
        k0_k1_cf(x)
    }
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    // I0 and the harmonic-weighted companion sum share the term (q^k / k!^2).
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harm_sum = 0.0;
    let mut harmonic = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        harm_sum += harmonic * term;
        if term < EPS * i0 {
            break;
        }
    }
    -log_term * i0 + harm_sum
}

fn k1_series(x: f64) -> f64 {
    (1.0 - one_minus_x_k1_series(x)) / x
}

// 1 - x K1(x) = -x ln(x/2) I1(x) + (x^2/4) sum_k [psi(k+1) + psi(k+2)] q^k / (k! (k+1)!)
fn one_minus_x_k1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0; // q^k / (k! (k+1)!)
    let mut i1_sum = 1.0;
    let mut psi_a = -EULER_GAMMA; // psi(k+1)
    let mut psi_b = 1.0 - EULER_GAMMA; // psi(k+2)
    let mut psi_sum = psi_a + psi_b;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (kf + 1.0);
        i1_sum += term;
        let add = (psi_a + psi_b) * term;
        psi_sum += add;
        if term < EPS * i1_sum && add.abs() < EPS * psi_sum.abs() {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    -x * (0.5 * x).ln() * i1 + q * psi_sum
}

/// Beyond this, `K0` and `K1` underflow (`e^{-x}` is subnormal or zero).
const UNDERFLOW_LIMIT: f64 = 745.0;

// Steed's continued fraction for K_mu, K_{mu+1} with mu = 0.
fn k0_k1_cf(x: f64) -> (f64, f64) {
    if x > UNDERFLOW_LIMIT {
        return (0.0, 0.0);
    }
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
