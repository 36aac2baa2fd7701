//! Full-duplex relaying, relay harvesting with a single antenna.
//!
//! All formulas assume the relay is loopback-interference limited: relay
//! noise is negligible next to the residual self-interference `|f|^2 Pr`.
//! With `x = |h1|^2 |g|^2`, `y = |f|^2` and `a = Ps / (N0 d1^m d2^m)`:
//!
//! * AF: `γ = k a x / (1 + k y + k^2 a x y)`
//! * DF: `γ = min(1 / (k y), k a x)`

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::laws::{
    check_probability, inner_spec, integrate_positive_axis, keyhole_ccdf, keyhole_cdf, keyhole_log_mean, FirstError,
};
use crate::model::{k_factor, ChannelRealization, SystemParams, TimeSplit};
use crate::optimize::{maximize_over_alpha, DEFAULT_TOL};
use crate::specfun::{
    digamma_small_int, expint_en_scaled, integrate_semi_infinite, integrate_semi_infinite_scaled, lambert_w0,
    QuadratureSpec,
};

/// Instantaneous AF SINR.
pub fn sinr_af_inst(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> Result<f64> {
    if !(ch.f_sq > 0.0) {
        return Err(Error::DegenerateChannel(
            "loopback gain is zero; the interference-limited AF model is undefined".into(),
        ));
    }
    let k = k_factor(params, split);
    Ok(af_sinr(k, params.a() * ch.h1_sq * ch.g_sq, ch.f_sq))
}

pub(crate) fn af_sinr(k: f64, ax: f64, y: f64) -> f64 {
    k * ax / (1.0 + k * y + k * k * ax * y)
}

/// Instantaneous DF SINR; a zero loopback gain leaves only the second hop.
pub fn sinr_df_inst(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> Result<f64> {
    let k = k_factor(params, split);
    Ok(df_sinr(k, params.a() * ch.h1_sq * ch.g_sq, ch.f_sq))
}

pub(crate) fn df_sinr(k: f64, ax: f64, y: f64) -> f64 {
    let harvest = k * ax;
    if y > 0.0 {
        harvest.min(1.0 / (k * y))
    } else {
        harvest
    }
}

/// `(1 - α) log2(1 + sinr)`.
pub fn throughput_inst(sinr: f64, split: TimeSplit) -> f64 {
    (1.0 - split.alpha()) * sinr.ln_1p() / LN_2
}

/// Closed-form throughput-optimal split for DF.
pub fn optimal_alpha_df_inst(ch: &ChannelRealization, params: &SystemParams) -> Result<TimeSplit> {
    require_gains(&[("h1_sq", ch.h1_sq), ("g_sq", ch.g_sq), ("f_sq", ch.f_sq)])?;
    let c1 = params.eta * ch.f_sq;
    let c2 = params.eta * params.a() * ch.h1_sq * ch.g_sq;
    two_region_alpha(c2, (c1 * c2).sqrt())
}

pub(crate) fn require_gains(gains: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in gains {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::DegenerateChannel(format!("{name} = {v}")));
        }
    }
    Ok(())
}

/// Maximizer of `(1-α) log(1 + min(c α/(1-α), ...))` when the two min-arms
/// cross at `α/(1-α) = 1/r`.
///
/// Left of the crossing the harvest arm is active and the objective peaks at
/// `(y*-1)/(c-1+y*)` with `y* = exp(W((c-1)/e) + 1)`. Right of it the
/// objective decreases, so the crossing itself is optimal whenever the
/// interior peak lies beyond it. Ties go to the crossing.
pub(crate) fn two_region_alpha(c: f64, r: f64) -> Result<TimeSplit> {
    let w = lambert_w0((c - 1.0) / std::f64::consts::E)?;
    let y_star = (w + 1.0).exp();
    let alpha = if y_star < 1.0 + c / r { (w + 1.0).exp_m1() / (c - 1.0 + y_star) } else { 1.0 / (1.0 + r) };
    TimeSplit::new(alpha)
}

/// Throughput-optimal split for AF by scalar search.
pub fn optimal_alpha_af_inst(ch: &ChannelRealization, params: &SystemParams) -> Result<TimeSplit> {
    let ax = params.a() * ch.h1_sq * ch.g_sq;
    let y = ch.f_sq;
    if !(y > 0.0) {
        return Err(Error::DegenerateChannel("loopback gain is zero".into()));
    }
    let best = maximize_over_alpha(
        |alpha| {
            let k = params.eta * alpha / (1.0 - alpha);
            Ok((1.0 - alpha) * af_sinr(k, ax, y).ln_1p() / LN_2)
        },
        DEFAULT_TOL,
    )?;
    Ok(best.alpha_star)
}

/// Outage probability of AF.
///
/// Conditioned on `y < Y = 1/(k γth)` the event `γ < γth` is
/// `x < x0(y) = γth (1/k + y) / (a (1 - k γth y))`; for `y >= Y` it is
/// certain. The conditional integral uses `y = Y (1 - e^{-v})`, under which
/// `1 - k γth y = e^{-v}` and the integrand decays like `e^{-v}`. When
/// `Y ≫ λr` the loopback density confines the mass to `v ≲ λr / Y`, so the
/// map is centred there.
pub fn outage_af(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let gth = params.gamma_th();
    let a = params.a();
    let lsd = params.lambda_sd();
    let lr = params.lambda_r;
    let y_max = 1.0 / (k * gth);
    let floor = (-y_max / lr).exp();
    let conditional = integrate_semi_infinite_scaled(
        |v: f64| {
            if v > 700.0 {
                return 0.0;
            }
            let y = -y_max * (-v).exp_m1();
            let x0 = gth * (1.0 / k + y) * v.exp() / a;
            keyhole_cdf(x0, lsd) * (-y / lr).exp() / lr * y_max * (-v).exp()
        },
        (lr / y_max).min(1.0),
        quad,
    )?;
    check_probability(floor + conditional)
}

/// Outage probability of DF (closed form).
pub fn outage_df(params: &SystemParams, split: TimeSplit) -> Result<f64> {
    let k = k_factor(params, split);
    let gth = params.gamma_th();
    let q = 1.0 / (k * params.lambda_r * gth);
    let loop_ok = -(-q).exp_m1();
    let x_min = gth / (k * params.a());
    let p = (-q).exp() + loop_ok * keyhole_cdf(x_min, params.lambda_sd());
    check_probability(p)
}

/// `(1 - P_out) R_c (1 - α)`.
pub fn throughput_delay_constrained(params: &SystemParams, split: TimeSplit, outage: f64) -> Result<f64> {
    let p = check_probability(outage)?;
    Ok((1.0 - p) * params.rc * (1.0 - split.alpha()))
}

/// Ergodic rate of AF in bits/s/Hz.
///
/// `log(1 + γ) = log(1 + k a x) - log(1 + c(y) x)` with
/// `c(y) = k^2 a y / (1 + k y)`, so the rate is a keyhole expectation minus
/// its average over the exponential loopback gain.
pub fn ergodic_af(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let a = params.a();
    let lsd = params.lambda_sd();
    let lr = params.lambda_r;
    let inner = inner_spec(quad);
    let direct = keyhole_log_mean(k * a, lsd, &inner)?;
    let failure = FirstError::default();
    let loss = integrate_semi_infinite(
        |t: f64| {
            let y = lr * t;
            let c = k * k * a * y / (1.0 + k * y);
            failure.value(keyhole_log_mean(c, lsd, &inner)) * (-t).exp()
        },
        quad,
    );
    let loss = failure.finish(loss)?;
    Ok(((direct - loss) / LN_2).max(0.0))
}

/// Jensen upper bound on [`ergodic_af`].
pub fn ergodic_af_upper(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let a = params.a();
    let lr = params.lambda_r;
    let psi1 = digamma_small_int(1)?;
    let loop_term = expint_en_scaled(1, 1.0 / (k * lr))?;
    let keyhole = keyhole_log_mean(k * a, params.lambda_sd(), quad)?;
    let jensen = (1.0
        + k * (psi1 + lr.ln()).exp()
        + k * k * a * (3.0 * psi1 + (lr * params.lambda_s * params.lambda_d).ln()).exp())
    .ln();
    Ok((loop_term + keyhole - jensen) / LN_2)
}

/// Ergodic rate of DF in bits/s/Hz, `∫ Pr{γ > t} / (1 + t) dt / ln 2`.
pub fn ergodic_df(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let ka = k * params.a();
    let lsd = params.lambda_sd();
    let klr = k * params.lambda_r;
    let ccdf = |t: f64| {
        if t == 0.0 {
            return 1.0;
        }
        -(-1.0 / (klr * t)).exp_m1() * keyhole_ccdf(t / ka, lsd) / (1.0 + t)
    };
    let v = integrate_positive_axis(ccdf, 1.0, (ka * lsd).max(1.0), quad)?;
    Ok(v / LN_2)
}

/// `(1 - α) R_E`.
pub fn throughput_delay_tolerant(split: TimeSplit, rate: f64) -> f64 {
    (1.0 - split.alpha()) * rate
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(a: f64) -> TimeSplit {
        TimeSplit::new(a).unwrap()
    }

    fn fig2() -> (ChannelRealization, SystemParams) {
        let ch = ChannelRealization { h1_sq: 0.83, h2_sq: 2.35, g_sq: 0.986, f_sq: 0.235, g2_sq: 0.0 };
        (ch, SystemParams::default().with_ps_db(10.0))
    }

    #[test]
    fn af_sinr_direct_evaluation() {
        let (ch, p) = fig2();
        // Term-by-term form: numerator Ps h g / (f d d), denominator
        // (1-α)/(ηα f) + k Ps h g / (d d) + 1.
        let alpha = 0.3;
        let k = 0.4 * alpha / (1.0 - alpha);
        let ps = 10.0;
        let num = ps * 0.83 * 0.986 / 0.235;
        let den = (1.0 - alpha) / (0.4 * alpha * 0.235) + k * ps * 0.83 * 0.986 + 1.0;
        let got = sinr_af_inst(&ch, &p, split(alpha)).unwrap();
        assert!(((got - num / den) / got).abs() < 1e-12);
    }

    #[test]
    fn zero_signal_gives_zero() {
        let p = SystemParams::default();
        let ch = ChannelRealization::single(0.0, 1.0, 0.1);
        assert_eq!(sinr_af_inst(&ch, &p, split(0.3)).unwrap(), 0.0);
        assert_eq!(sinr_df_inst(&ch, &p, split(0.3)).unwrap(), 0.0);
        assert!(sinr_af_inst(&ChannelRealization::single(1.0, 1.0, 0.0), &p, split(0.3)).is_err());
    }

    #[test]
    fn df_arms_cross_at_predicted_k() {
        let p = SystemParams::default();
        let ch = ChannelRealization::single(0.7, 1.3, 0.2);
        let ax = p.a() * 0.7 * 1.3;
        let k = (1.0 / (ax * 0.2)).sqrt();
        let alpha = k / (p.eta + k);
        let s = split(alpha);
        let harvest = k_factor(&p, s) * ax;
        assert!((sinr_df_inst(&ch, &p, s).unwrap() - harvest).abs() < 1e-9 * harvest);
        assert!((harvest - 1.0 / (k_factor(&p, s) * 0.2)).abs() < 1e-9 * harvest);
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(throughput_inst(0.0, split(0.4)), 0.0);
        assert!((throughput_inst(7.0, split(0.5)) - 1.5).abs() < 1e-15);
        assert!((throughput_inst(7.0, split(1e-15)) - 3.0).abs() < 1e-12);
        assert!((throughput_delay_tolerant(split(0.5), 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_region_at_unit_c() {
        // W(0) = 0 so y* = e and α1 = (e - 1)/e when the region-1 peak is admissible.
        let e = std::f64::consts::E;
        let a = two_region_alpha(1.0, 1e-3).unwrap();
        assert!((a.alpha() - (e - 1.0) / e).abs() < 1e-14);
        let b = two_region_alpha(1.0, 10.0).unwrap();
        assert!((b.alpha() - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn outage_floors() {
        let p = SystemParams::default().with_ps_db(150.0);
        let s = split(0.2);
        let k = k_factor(&p, s);
        let floor = (-1.0 / (k * p.lambda_r * 7.0)).exp();
        assert!((outage_df(&p, s).unwrap() - floor).abs() < 1e-6);
        assert!((outage_af(&p, s, &QuadratureSpec::default()).unwrap() - floor).abs() < 1e-6);
    }

    #[test]
    fn tiny_threshold_means_no_outage() {
        let p = SystemParams { gamma_th_override: Some(1e-9), ..SystemParams::default() };
        assert!(outage_df(&p, split(0.2)).unwrap() < 1e-6);
        assert!(outage_af(&p, split(0.2), &QuadratureSpec::default()).unwrap() < 1e-6);
    }
}
