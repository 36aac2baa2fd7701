//! Half-duplex relaying baseline.
//!
//! After harvesting, the remaining `1 - α` of the block is split evenly
//! between the two hops, so the relay power is `Pr = 2k Ps |h1|^2 / d1^m`
//! and every rate carries a prelog of 1/2. With `s = Ps / (N0 d1^m)`:
//!
//! * `γ1 = s |h1|^2`, `γ2 = 2k a |h1|^2 |g|^2`
//! * AF: `γ1 γ2 / (γ1 + γ2 + 1)`, DF: `min(γ1, γ2)`

use std::f64::consts::LN_2;

use crate::error::Result;
use crate::fd_single::{require_gains, two_region_alpha};
use crate::laws::{check_probability, inner_spec, integrate_positive_axis, keyhole_log_mean, FirstError};
use crate::model::{k_factor, ChannelRealization, Mode, SystemParams, TimeSplit};
use crate::optimize::{maximize_over_alpha, DEFAULT_TOL};
use crate::specfun::{expint_en_scaled, integrate_finite, integrate_semi_infinite_scaled, QuadratureSpec};

fn hop_snrs(ch: &ChannelRealization, params: &SystemParams, k: f64) -> (f64, f64) {
    let g1 = params.ps_over_n0 * ch.h1_sq / params.path_loss1();
    let g2 = 2.0 * k * params.a() * ch.h1_sq * ch.g_sq;
    (g1, g2)
}

/// Instantaneous AF SNR.
pub fn sinr_af_hd(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> Result<f64> {
    let (g1, g2) = hop_snrs(ch, params, k_factor(params, split));
    Ok(g1 * g2 / (g1 + g2 + 1.0))
}

/// Instantaneous DF SNR.
pub fn sinr_df_hd(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> Result<f64> {
    let (g1, g2) = hop_snrs(ch, params, k_factor(params, split));
    Ok(g1.min(g2))
}

/// `((1 - α)/2) log2(1 + sinr)`.
pub fn throughput_inst_hd(sinr: f64, split: TimeSplit) -> f64 {
    0.5 * (1.0 - split.alpha()) * sinr.ln_1p() / LN_2
}

/// Closed-form throughput-optimal split for DF. The arms cross where
/// `2k |g|^2 / d2^m = 1`.
pub fn optimal_alpha_df_hd(ch: &ChannelRealization, params: &SystemParams) -> Result<TimeSplit> {
    require_gains(&[("h1_sq", ch.h1_sq), ("g_sq", ch.g_sq)])?;
    let c5 = 2.0 * params.eta * params.a() * ch.h1_sq * ch.g_sq;
    let r = 2.0 * params.eta * ch.g_sq / params.path_loss2();
    two_region_alpha(c5, r)
}

/// Throughput-optimal split for AF by scalar search.
pub fn optimal_alpha_af_hd(ch: &ChannelRealization, params: &SystemParams) -> Result<TimeSplit> {
    let best = maximize_over_alpha(
        |alpha| {
            let k = params.eta * alpha / (1.0 - alpha);
            let (g1, g2) = hop_snrs(ch, params, k);
            Ok(0.5 * (1.0 - alpha) * (g1 * g2 / (g1 + g2 + 1.0)).ln_1p() / LN_2)
        },
        DEFAULT_TOL,
    )?;
    Ok(best.alpha_star)
}

/// Outage probability of AF.
///
/// With `x = |h1|^2` and `c = 2k a`, `γ >= γth` requires `s x > γth` and
/// `|g|^2 >= γth (s x + 1) / (c x (s x - γth))`. Hence
/// `P_out = 1 - e^{-γth/(s λs)} + ∫_{γth/s}^∞ f_h(x) (1 - e^{-E(x)}) dx`
/// with `E(x) = γth (s x + 1) / (λd c x (s x - γth))`.
pub fn outage_af_hd(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let gth = params.gamma_th();
    let s = params.ps_over_n0 / params.path_loss1();
    let c = 2.0 * k * params.a();
    let ls = params.lambda_s;
    let ld = params.lambda_d;
    let x0 = gth / s;
    let tail = integrate_semi_infinite_scaled(
        |u: f64| {
            let x = x0 + u;
            let density = (-x / ls).exp() / ls;
            if u == 0.0 {
                return density;
            }
            let e = gth * (s * x + 1.0) / (ld * c * x * (s * u));
            density * -(-e).exp_m1()
        },
        ls,
        quad,
    )?;
    check_probability(-(-x0 / ls).exp_m1() + tail)
}

/// Outage probability of DF.
///
/// `γ = s |h1|^2 min(1, 2k |g|^2 / d2^m)`; conditioning on `|g|^2` gives
/// `P_out = ∫_0^D (1 - e^{-γth d1^m d2^m / (2k λs Ps x)}) f_g(x) dx
///        + e^{-D/λd} (1 - e^{-γth / (λs s)})` with `D = d2^m / (2k)`.
pub fn outage_df_hd(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let gth = params.gamma_th();
    let s = params.ps_over_n0 / params.path_loss1();
    let ls = params.lambda_s;
    let ld = params.lambda_d;
    let d_lim = params.path_loss2() / (2.0 * k);
    let b = gth * params.path_loss2() / (2.0 * k * ls * s);
    let f = |x: f64| {
        if x == 0.0 {
            return 1.0 / ld;
        }
        -(-b / x).exp_m1() * (-x / ld).exp() / ld
    };
    let mut cuts = vec![0.0];
    cuts.extend([b, ld, 40.0 * ld].into_iter().filter(|&c| c < d_lim));
    cuts.sort_by(f64::total_cmp);
    cuts.push(d_lim);
    let mut partial = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            partial += integrate_finite(f, w[0], w[1], quad)?;
        }
    }
    let full = (-d_lim / ld).exp() * -(-gth / (ls * s)).exp_m1();
    check_probability(partial + full)
}

/// Ergodic rate of AF in bits/s/Hz:
/// `E log2(1 + γ2) - E_h[e^q E1(q)] / ln 2`, where
/// `q = (d1^m d2^m + Ps d2^m x) / (2k λd Ps x)` for `|h1|^2 = x`.
pub fn ergodic_af_hd(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let first = keyhole_log_mean(2.0 * k_factor(params, split) * params.a(), params.lambda_sd(), quad)?;
    Ok(((first - ergodic_af_hd_loss(params, split, quad)?) / LN_2).max(0.0))
}

/// `E ln(1 + γ2 / (1 + γ1))`, the subtracted term of the AF rate (nats).
pub fn ergodic_af_hd_loss(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let ps = params.ps_over_n0;
    let (l1, l2) = (params.path_loss1(), params.path_loss2());
    let ls = params.lambda_s;
    let ld = params.lambda_d;
    let failure = FirstError::default();
    let v = integrate_semi_infinite_scaled(
        |x: f64| {
            if x == 0.0 {
                return 0.0;
            }
            let q = (l1 * l2 + ps * l2 * x) / (2.0 * k * ld * ps * x);
            failure.value(expint_en_scaled(1, q)) * (-x / ls).exp() / ls
        },
        ls,
        quad,
    );
    failure.finish(v)
}

/// Ergodic rate of DF in bits/s/Hz.
///
/// `Pr{γ > t} = e^{-D/λd} e^{-t/μ} + (1/λd) ∫_0^D e^{-t d2^m/(2k μ x)} e^{-x/λd} dx`
/// with `μ = λs s` and `D = d2^m/(2k)`. The first part integrates against
/// `1/(1+t)` to `e^{-D/λd} e^{1/μ} E1(1/μ)`; the second is evaluated as a
/// nested integral, outer over `t`.
pub fn ergodic_df_hd(params: &SystemParams, split: TimeSplit, quad: &QuadratureSpec) -> Result<f64> {
    let k = k_factor(params, split);
    let s = params.ps_over_n0 / params.path_loss1();
    let mu = params.lambda_s * s;
    let ld = params.lambda_d;
    let d_lim = params.path_loss2() / (2.0 * k);
    let first = (-d_lim / ld).exp() * expint_en_scaled(1, 1.0 / mu)?;
    let inner = inner_spec(quad);
    let rate = params.path_loss2() / (2.0 * k * mu);
    let failure = FirstError::default();
    let second = integrate_positive_axis(
        |t: f64| {
            let v = integrate_finite(
                |x: f64| {
                    if x == 0.0 {
                        return 0.0;
                    }
                    (-t * rate / x - x / ld).exp()
                },
                0.0,
                d_lim,
                &inner,
            );
            failure.value(v) / (ld * (1.0 + t))
        },
        1.0,
        mu.max(1.0),
        quad,
    );
    let second = failure.finish(second)?;
    Ok((first + second) / LN_2)
}

/// Applies the 1/2 prelog for the given mode. `value` is the SINR for
/// instantaneous mode, the outage probability for delay-constrained mode
/// and the ergodic rate for delay-tolerant mode.
pub fn throughput_hd(mode: Mode, params: &SystemParams, split: TimeSplit, value: f64) -> Result<f64> {
    let keep = 1.0 - split.alpha();
    Ok(match mode {
        Mode::Instantaneous => throughput_inst_hd(value, split),
        Mode::DelayConstrained => 0.5 * (1.0 - check_probability(value)?) * params.rc * keep,
        Mode::DelayTolerant => 0.5 * keep * value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(a: f64) -> TimeSplit {
        TimeSplit::new(a).unwrap()
    }

    #[test]
    fn af_below_both_hops() {
        let p = SystemParams::default().with_ps_db(10.0);
        let ch = ChannelRealization::single(0.83, 0.986, 0.235);
        let s = split(0.3);
        let (g1, g2) = hop_snrs(&ch, &p, k_factor(&p, s));
        let af = sinr_af_hd(&ch, &p, s).unwrap();
        assert!(af <= g1.min(g2));
        // Direct expression with Pr written out.
        let k = k_factor(&p, s);
        let pr = 2.0 * k * 10.0 * 0.83;
        let direct = 10.0 * pr * 0.986 * 0.83 / (0.986 * pr + 0.83 * 10.0 + 1.0);
        assert!(((af - direct) / direct).abs() < 1e-14);
        assert_eq!(sinr_af_hd(&ChannelRealization::single(0.83, 0.0, 0.2), &p, s).unwrap(), 0.0);
    }

    #[test]
    fn df_first_arm_when_relay_link_strong() {
        let p = SystemParams::default();
        let ch = ChannelRealization::single(0.5, 3.0, 0.1);
        let s = split(0.5);
        assert!(2.0 * k_factor(&p, s) * 3.0 >= 1.0);
        assert_eq!(sinr_df_hd(&ch, &p, s).unwrap(), p.ps_over_n0 * 0.5);
    }

    #[test]
    fn prelog_halves() {
        let p = SystemParams::default();
        assert!((throughput_inst_hd(7.0, split(1e-15)) - 1.5).abs() < 1e-12);
        assert!((throughput_hd(Mode::DelayConstrained, &p, split(1e-15), 0.0).unwrap() - 1.5).abs() < 1e-12);
        assert!((throughput_hd(Mode::DelayTolerant, &p, split(0.5), 2.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn df_outage_large_k_limit() {
        // k → ∞ leaves only the first hop.
        let p = SystemParams::default().with_ps_db(10.0);
        let s = split(1.0 - 1e-9);
        let want = -(-7.0f64 / 10.0).exp_m1();
        let got = outage_df_hd(&p, s, &QuadratureSpec::default()).unwrap();
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn tiny_threshold() {
        let p = SystemParams { gamma_th_override: Some(1e-10), ..SystemParams::default() };
        let q = QuadratureSpec::default();
        assert!(outage_df_hd(&p, split(0.3), &q).unwrap() < 1e-6);
        assert!(outage_af_hd(&p, split(0.3), &q).unwrap() < 1e-6);
    }
}
