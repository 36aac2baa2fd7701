//! Full-duplex relaying, relay harvesting with both antennas.
//!
//! With `U = |h1|^2 / (|h1|^2 + |h2|^2)`, `V = |h1|^2 + |h2|^2`,
//! `W = V |g|^2` and `T = U / |f|^2` the interference-limited SINRs are
//!
//! * AF: `γ = T a W / (T/k + k a W + 1)`
//! * DF: `γ = min(T / k, k a W)`
//!
//! `U` is uniform and independent of the gamma(2) variable `V`, so `T` and
//! `W` are independent.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::fd_single::{require_gains, two_region_alpha};
use crate::laws::{
    check_probability, gamma_keyhole_ccdf, gamma_keyhole_cdf, gamma_keyhole_log_mean, inner_spec,
    integrate_positive_axis, FirstError,
};
use crate::model::{k_factor, ChannelRealization, SystemParams, TimeSplit};
use crate::optimize::{maximize_over_alpha, DEFAULT_TOL};
use crate::specfun::{digamma_small_int, expint_en_scaled, integrate_semi_infinite_scaled, QuadratureSpec};

/// `(U, V)` coordinates of the two source-relay gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvDecomposition {
    pub u: f64,
    pub v: f64,
}

impl UvDecomposition {
    pub fn new(h1_sq: f64, h2_sq: f64) -> Result<Self> {
        let v = h1_sq + h2_sq;
        if !(h1_sq >= 0.0 && h2_sq >= 0.0 && v > 0.0) {
            return Err(Error::DegenerateChannel(format!("gains ({h1_sq}, {h2_sq})")));
        }
        Ok(UvDecomposition { u: h1_sq / v, v })
    }

    /// `(|h1|^2, |h2|^2) = (u v, v (1 - u))`.
    pub fn gains(&self) -> (f64, f64) {
        (self.u * self.v, self.v * (1.0 - self.u))
    }
}

// (T, a W) for one realization.
fn t_and_aw(ch: &ChannelRealization, params: &SystemParams) -> (f64, f64) {
    let v = ch.h1_sq + ch.h2_sq;
    let t = if ch.f_sq > 0.0 { ch.h1_sq / (v * ch.f_sq) } else { f64::INFINITY };
    (t, params.a() * v * ch.g_sq)
}

/// Instantaneous AF SINR.
pub fn sinr_af_inst_dual(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> Result<f64> {
    if !(ch.f_sq > 0.0) {
        return Err(Error::DegenerateChannel(
            "loopback gain is zero; the interference-limited AF model is undefined".into(),
        ));
    }
    if ch.h1_sq == 0.0 {
        return Ok(0.0);
    }
    let k = k_factor(params, split);
    let (t, aw) = t_and_aw(ch, params);
    Ok(t * aw / (t / k + k * aw + 1.0))
}

/// Instantaneous DF SINR.
pub fn sinr_df_inst_dual(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> Result<f64> {
    if ch.h1_sq == 0.0 {
        return Ok(0.0);
    }
    let k = k_factor(params, split);
    let (t, aw) = t_and_aw(ch, params);
    Ok((t / k).min(k * aw))
}

/// Closed-form throughput-optimal split for DF.
pub fn optimal_alpha_df_inst_dual(ch: &ChannelRealization, params: &SystemParams) -> Result<TimeSplit> {
    require_gains(&[("h1_sq", ch.h1_sq), ("g_sq", ch.g_sq), ("f_sq", ch.f_sq)])?;
    let v = ch.h1_sq + ch.h2_sq;
    let c3 = params.eta * ch.f_sq * v / ch.h1_sq;
    let c4 = params.eta * params.a() * v * ch.g_sq;
    two_region_alpha(c4, (c3 * c4).sqrt())
}

/// Throughput-optimal split for AF by scalar search.
pub fn optimal_alpha_af_inst_dual(ch: &ChannelRealization, params: &SystemParams) -> Result<TimeSplit> {
    if !(ch.f_sq > 0.0) {
        return Err(Error::DegenerateChannel("loopback gain is zero".into()));
    }
    let (t, aw) = t_and_aw(ch, params);
    let best = maximize_over_alpha(
        |alpha| {
            let k = params.eta * alpha / (1.0 - alpha);
            let sinr = t * aw / (t / k + k * aw + 1.0);
            Ok((1.0 - alpha) * sinr.ln_1p() / LN_2)
        },
        DEFAULT_TOL,
    )?;
    Ok(best.alpha_star)
}

/// `Pr{W <= w}`.
pub fn cdf_w(w: f64, params: &SystemParams) -> f64 {
    gamma_keyhole_cdf(w.max(0.0), params.lambda_sd())
}

/// `Pr{T <= t} = λr t (1 - e^{-1/(λr t)})`.
pub fn cdf_t(t: f64, params: &SystemParams) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let q = 1.0 / (params.lambda_r * t);
    if q == 0.0 {
        return 1.0;
    }
    -(-q).exp_m1() / q
}

/// Density of `T`: `λr (1 - (1 + q) e^{-q})` with `q = 1/(λr t)`.
pub fn density_t(t: f64, params: &SystemParams) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let q = 1.0 / (params.lambda_r * t);
    params.lambda_r * one_minus_one_plus_q_exp(q)
}

// 1 - (1 + q) e^{-q}, summed as a series for small q to avoid cancellation.
fn one_minus_one_plus_q_exp(q: f64) -> f64 {
    if q > 0.1 {
        return 1.0 - (1.0 + q) * (-q).exp();
    }
    let mut term = q; // q^n / n!
    let mut sum = 0.0;
    for n in 2..30 {
        term *= q / n as f64;
        let add = if n % 2 == 0 { 1.0 } else { -1.0 } * (n - 1) as f64 * term;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Outage probability of AF.
///
/// `γ >= γth` needs `T > k γth` and `W >= w0(T)` with
/// `w0(t) = γth (t/k + 1) / (a (t - k γth))`, so
/// `P_out = F_T(k γth) + ∫_{k γth}^∞ F_W(w0(t)) f_T(t) dt`.
pub fn outage_af_dual(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let gth = params.gamma_th();
    let a = params.a();
    let t0 = k * gth;
    let tail = integrate_semi_infinite_scaled(
        |s: f64| {
            let t = t0 + s;
            if s == 0.0 {
                return density_t(t, params);
            }
            let w0 = gth * (t / k + 1.0) / (a * s);
            cdf_w(w0, params) * density_t(t, params)
        },
        t0.max(1.0 / params.lambda_r),
        quad,
    )?;
    check_probability(cdf_t(t0, params) + tail)
}

/// Outage probability of DF (closed form).
pub fn outage_df_dual(params: &SystemParams, split: TimeSplit) -> Result<f64> {
    let k = k_factor(params, split);
    let gth = params.gamma_th();
    let ft = cdf_t(k * gth, params);
    let fw = cdf_w(gth / (k * params.a()), params);
    check_probability(ft + (1.0 - ft) * fw)
}

/// Ergodic rate of AF in bits/s/Hz.
///
/// `log(1 + γ) = log(1 + k a W) - log(1 + k a W / (1 + T/k))`; the second
/// term is averaged over `T` with its density.
pub fn ergodic_af_dual(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let ka = k * params.a();
    let lsd = params.lambda_sd();
    let inner = inner_spec(quad);
    let direct = gamma_keyhole_log_mean(ka, lsd, &inner)?;
    let failure = FirstError::default();
    let scale = 1.0 / params.lambda_r;
    let loss = integrate_positive_axis(
        |t: f64| {
            let w = density_t(t, params);
            if w == 0.0 {
                return 0.0;
            }
            failure.value(gamma_keyhole_log_mean(ka / (1.0 + t / k), lsd, &inner)) * w
        },
        scale,
        scale,
        quad,
    );
    let loss = failure.finish(loss)?;
    Ok(((direct - loss) / LN_2).max(0.0))
}

/// `E ln(1 + T/k)` in closed form, with `v = 1/(k λr)`:
/// `-1 + e^v (E1(v) + k λr (E1(v) + E2(v))) - (ψ(1) + ln kλr + kλr (ψ(2) + ln kλr))`.
pub fn log_mean_t_over_k(params: &SystemParams, split: TimeSplit) -> Result<f64> {
    let klr = k_factor(params, split) * params.lambda_r;
    let v = 1.0 / klr;
    let e1 = expint_en_scaled(1, v)?;
    let e2 = expint_en_scaled(2, v)?;
    let psi1 = digamma_small_int(1)?;
    let psi2 = digamma_small_int(2)?;
    let l = klr.ln();
    Ok(-1.0 + e1 + klr * (e1 + e2) - (psi1 + l + klr * (psi2 + l)))
}

/// Jensen upper bound on [`ergodic_af_dual`].
///
/// `log(1 + γ) = log(1 + T/k) + log(1 + k a W) - log(1 + T/k + k a W)` and
/// the last expectation is bounded below through the geometric means
/// `e^{E ln(T/k)} = e^{-1-ψ(1)} / (k λr)` and
/// `e^{E ln(k a W)} = k a λs λd e^{ψ(1)+ψ(2)}`.
pub fn ergodic_af_upper_dual(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let psi2 = digamma_small_int(2)?;
    upper_dual(params, split, quad, psi2)
}

/// Variant of [`ergodic_af_upper_dual`] that uses `e^{2ψ(1)}` for the `W`
/// geometric-mean factor. Since `ψ(2) > ψ(1)` this bound is looser.
pub fn ergodic_af_upper_dual_loose(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let psi1 = digamma_small_int(1)?;
    upper_dual(params, split, quad, psi1)
}

fn upper_dual(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec, second_psi: f64) -> Result<f64> {
    let k = k_factor(params, split);
    let ka = k * params.a();
    let psi1 = digamma_small_int(1)?;
    let t_term = log_mean_t_over_k(params, split)?;
    let w_term = gamma_keyhole_log_mean(ka, params.lambda_sd(), quad)?;
    let geo_t = (-1.0 - psi1).exp() / (k * params.lambda_r);
    let geo_w = ka * params.lambda_sd() * (psi1 + second_psi).exp();
    Ok((t_term + w_term - (1.0 + geo_t + geo_w).ln()) / LN_2)
}

/// Ergodic rate of DF in bits/s/Hz, `∫ Pr{γ > t} / (1 + t) dt / ln 2` with
/// `Pr{γ > t} = (1 - F_T(k t)) (1 - F_W(t / (k a)))`.
pub fn ergodic_df_dual(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let ka = k * params.a();
    let lsd = params.lambda_sd();
    let ccdf = |t: f64| {
        if t == 0.0 {
            return 1.0;
        }
        (1.0 - cdf_t(k * t, params)) * gamma_keyhole_ccdf(t / ka, lsd) / (1.0 + t)
    };
    let v = integrate_positive_axis(ccdf, 1.0, (ka * lsd).max(1.0), quad)?;
    Ok(v / LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd_single;

    fn split(a: f64) -> TimeSplit {
        TimeSplit::new(a).unwrap()
    }

    #[test]
    fn uv_round_trip() {
        let uv = UvDecomposition::new(0.83, 2.35).unwrap();
        let (x, y) = uv.gains();
        assert!((x - 0.83).abs() < 1e-15 && (y - 2.35).abs() < 1e-15);
        assert!(UvDecomposition::new(0.0, 0.0).is_err());
    }

    #[test]
    fn reduces_to_single_antenna() {
        let p = SystemParams::default().with_ps_db(10.0);
        let ch = ChannelRealization::single(0.83, 0.986, 0.235);
        for &al in &[0.1, 0.3, 0.7] {
            let s = split(al);
            let a = sinr_af_inst_dual(&ch, &p, s).unwrap();
            let b = fd_single::sinr_af_inst(&ch, &p, s).unwrap();
            assert!(((a - b) / b).abs() < 1e-14);
            let c = sinr_df_inst_dual(&ch, &p, s).unwrap();
            let d = fd_single::sinr_df_inst(&ch, &p, s).unwrap();
            assert!(((c - d) / d).abs() < 1e-14);
        }
        assert_eq!(optimal_alpha_df_inst_dual(&ch, &p).unwrap(), fd_single::optimal_alpha_df_inst(&ch, &p).unwrap());
    }

    #[test]
    fn cdf_t_limits_and_density() {
        let p = SystemParams::default();
        assert_eq!(cdf_t(0.0, &p), 0.0);
        assert!((cdf_t(1e12, &p) - 1.0).abs() < 1e-10);
        // Density against a centered difference of the CDF.
        for &t in &[0.05, 1.0, 10.0, 300.0] {
            let h = 1e-5 * t;
            let fd = (cdf_t(t + h, &p) - cdf_t(t - h, &p)) / (2.0 * h);
            assert!(((density_t(t, &p) - fd) / fd).abs() < 1e-6, "t = {t}");
        }
        let q: f64 = 0.09;
        assert!((one_minus_one_plus_q_exp(q) - (1.0 - (1.0 + q) * (-q).exp())).abs() < 1e-15);
    }

    #[test]
    fn outage_floor_at_high_power() {
        let p = SystemParams::default().with_ps_db(160.0);
        let s = split(0.2);
        let floor = cdf_t(k_factor(&p, s) * 7.0, &p);
        assert!((outage_df_dual(&p, s).unwrap() - floor).abs() < 1e-6);
        assert!((outage_af_dual(&p, s, &QuadratureSpec::default()).unwrap() - floor).abs() < 1e-6);
    }
}
