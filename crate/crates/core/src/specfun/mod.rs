//! Special functions and quadrature shared by the analytic formulas.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod expint;
mod lambert;
mod quad;

pub use bessel::{bessel_k, half_x2_k2, one_minus_half_x2_k2, one_minus_x_k1, x_k1};
pub use expint::{expint_en, expint_en_scaled};
pub use lambert::lambert_w0;
pub use quad::{integrate_finite, integrate_semi_infinite, integrate_semi_infinite_scaled, QuadratureSpec};

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// `ψ(1) = -γ` and `ψ(2) = 1 - γ`; the only digamma values the bounds need.
pub fn digamma_small_int(n: u32) -> Result<f64> {
    match n {
        1 => Ok(-EULER_GAMMA),
        2 => Ok(1.0 - EULER_GAMMA),
        _ => Err(domain("digamma_small_int", format!("n = {n} not in {{1, 2}}"))),
    }
}
