//! Seeded Monte Carlo estimates of outage, ergodic rate and throughput.
//!
//! Trials are cut into fixed-size chunks; chunk `i` draws from substream
//! `i` of the seed and chunk results are merged in index order, so an
//! estimate does not depend on the number of worker threads.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    draw_channel, k_factor, relay_power_dual, relay_power_single, ChannelRealization, ChannelSampler, Duplex,
    LinkConfig, Protocol, SystemParams, TimeSplit,
};
use crate::{fd_dual, fd_single, hd};

const CHUNK: u64 = 1 << 16;
/// Two-sided 97.5% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;
/// Largest tolerated fraction of failed per-draw optimizations.
const MAX_FAILURE_FRACTION: f64 = 1e-4;

/// Which end-to-end SINR expression a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinrModel {
    /// Relay and destination noise included.
    Exact,
    /// Relay noise neglected next to the loopback interference; this is
    /// the model behind every analytic formula.
    InterferenceLimited,
}

/// Monte Carlo estimate with its 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn std_error(&self) -> f64 {
        self.half_width_95 / Z95
    }
}

/// SINR with relay noise for every duplex variant.
///
/// `γ1 = Ps |h1|^2 / (d1^m (|f|^2 Pr + 1))` and `γ2 = Pr |g|^2 / d2^m`,
/// combined as `γ1 γ2 / (γ1 + γ2 + 1)` for AF and `min(γ1, γ2)` for DF.
/// Half-duplex relays see no loopback and harvest `2k`. The two-antenna
/// half-duplex relay harvests and combines on both antennas and transmits
/// with maximum-ratio weights over `g` and `g2`.
pub fn sinr_exact(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit, config: &LinkConfig) -> f64 {
    let s = params.ps_over_n0 / params.path_loss1();
    let l2 = params.path_loss2();
    let (g1, g2) = match config.duplex {
        Duplex::FdSingle | Duplex::FdDual => {
            let pr = if config.duplex == Duplex::FdSingle {
                relay_power_single(ch, params, split)
            } else {
                relay_power_dual(ch, params, split)
            };
            (s * ch.h1_sq / (ch.f_sq * pr + 1.0), pr * ch.g_sq / l2)
        }
        Duplex::HdSingle => {
            let pr = 2.0 * k_factor(params, split) * s * ch.h1_sq;
            (s * ch.h1_sq, pr * ch.g_sq / l2)
        }
        Duplex::HdDualMrc => {
            let v = ch.h1_sq + ch.h2_sq;
            let pr = 2.0 * k_factor(params, split) * s * v;
            (s * v, pr * (ch.g_sq + ch.g2_sq) / l2)
        }
    };
    combine(config.protocol, g1, g2)
}

fn combine(protocol: Protocol, g1: f64, g2: f64) -> f64 {
    match protocol {
        Protocol::Af => {
            if g1 == 0.0 || g2 == 0.0 {
                0.0
            } else {
                g1 * g2 / (g1 + g2 + 1.0)
            }
        }
        Protocol::Df => g1.min(g2),
    }
}

/// Interference-limited SINR, delegated to the analytic modules. The
/// half-duplex variants have no loopback and fall back to [`sinr_exact`].
pub fn sinr_interference_limited(
    ch: &ChannelRealization,
    params: &SystemParams,
    split: TimeSplit,
    config: &LinkConfig,
) -> Result<f64> {
    match (config.duplex, config.protocol) {
        (Duplex::FdSingle, Protocol::Af) => fd_single::sinr_af_inst(ch, params, split),
        (Duplex::FdSingle, Protocol::Df) => fd_single::sinr_df_inst(ch, params, split),
        (Duplex::FdDual, Protocol::Af) => fd_dual::sinr_af_inst_dual(ch, params, split),
        (Duplex::FdDual, Protocol::Df) => fd_dual::sinr_df_inst_dual(ch, params, split),
        (Duplex::HdSingle, Protocol::Af) => hd::sinr_af_hd(ch, params, split),
        (Duplex::HdSingle, Protocol::Df) => hd::sinr_df_hd(ch, params, split),
        (Duplex::HdDualMrc, _) => Ok(sinr_exact(ch, params, split, config)),
    }
}

/// SINR under the chosen model.
pub fn sinr(
    ch: &ChannelRealization,
    params: &SystemParams,
    split: TimeSplit,
    config: &LinkConfig,
    model: SinrModel,
) -> Result<f64> {
    match model {
        SinrModel::Exact => Ok(sinr_exact(ch, params, split, config)),
        SinrModel::InterferenceLimited => sinr_interference_limited(ch, params, split, config),
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
    aux: f64,
    failed: u64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        Moments {
            n: self.n + o.n,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
            aux: self.aux + o.aux,
            failed: self.failed + o.failed,
        }
    }
}

/// Per-draw sample function: `Ok(Some((v, aux)))` records `v` and adds
/// `aux` to a side sum, `Ok(None)` counts a tolerated failure.
fn run<F>(params: &SystemParams, trials: u64, seed: u64, sample: F) -> Result<Moments>
where
    F: Fn(&ChannelRealization) -> Result<Option<(f64, f64)>> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    params.validate()?;
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut sampler = ChannelSampler::new(seed, i);
            let n = CHUNK.min(trials - i * CHUNK);
            let mut m = Moments::default();
            for _ in 0..n {
                let ch = draw_channel(&mut sampler, params);
                match sample(&ch)? {
                    Some((v, aux)) => {
                        m.n += 1;
                        m.sum += v;
                        m.sum_sq += v * v;
                        m.aux += aux;
                    }
                    None => m.failed += 1,
                }
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total)
}

fn estimate(m: Moments, trials: u64, seed: u64) -> McEstimate {
    let n = m.n.max(1) as f64;
    let mean = m.sum / n;
    let var = if m.n > 1 { ((m.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    McEstimate { mean, half_width_95: Z95 * (var / n).sqrt(), trials, seed }
}

/// Fraction of draws with SINR below `gamma_th`.
pub fn mc_outage(
    params: &SystemParams,
    split: TimeSplit,
    config: &LinkConfig,
    model: SinrModel,
    gamma_th: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    let m = run(params, trials, seed, |ch| {
        let g = sinr(ch, params, split, config, model)?;
        Ok(Some((if g < gamma_th { 1.0 } else { 0.0 }, 0.0)))
    })?;
    let p = m.sum / m.n as f64;
    Ok(McEstimate { mean: p, half_width_95: Z95 * (p * (1.0 - p) / m.n as f64).sqrt(), trials, seed })
}

/// Mean of `log2(1 + SINR)`.
pub fn mc_ergodic(
    params: &SystemParams,
    split: TimeSplit,
    config: &LinkConfig,
    model: SinrModel,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    let m = run(params, trials, seed, |ch| Ok(Some((sinr(ch, params, split, config, model)?.ln_1p() / LN_2, 0.0))))?;
    Ok(estimate(m, trials, seed))
}

/// Mean instantaneous throughput at a fixed split.
pub fn mc_throughput_fixed(
    params: &SystemParams,
    split: TimeSplit,
    config: &LinkConfig,
    model: SinrModel,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    let pre = config.duplex.prelog() * (1.0 - split.alpha());
    let m =
        run(params, trials, seed, |ch| Ok(Some((pre * sinr(ch, params, split, config, model)?.ln_1p() / LN_2, 0.0))))?;
    Ok(estimate(m, trials, seed))
}

/// Per-draw optimal split: closed form for DF, scalar search otherwise.
pub fn optimal_alpha_instantaneous(
    ch: &ChannelRealization,
    params: &SystemParams,
    config: &LinkConfig,
    model: SinrModel,
) -> Result<TimeSplit> {
    let closed = model == SinrModel::InterferenceLimited || !config.duplex.is_full_duplex();
    match (config.duplex, config.protocol) {
        (Duplex::FdSingle, Protocol::Df) if closed => fd_single::optimal_alpha_df_inst(ch, params),
        (Duplex::FdDual, Protocol::Df) if closed => fd_dual::optimal_alpha_df_inst_dual(ch, params),
        (Duplex::HdSingle, Protocol::Df) => hd::optimal_alpha_df_hd(ch, params),
        (Duplex::FdSingle, Protocol::Af) if closed => fd_single::optimal_alpha_af_inst(ch, params),
        (Duplex::FdDual, Protocol::Af) if closed => fd_dual::optimal_alpha_af_inst_dual(ch, params),
        (Duplex::HdSingle, Protocol::Af) => hd::optimal_alpha_af_hd(ch, params),
        _ => {
            let r = crate::optimize::maximize_over_alpha(
                |alpha| {
                    let s = TimeSplit::new(alpha)?;
                    Ok((1.0 - alpha) * sinr(ch, params, s, config, model)?.ln_1p())
                },
                crate::optimize::DEFAULT_TOL,
            )?;
            Ok(r.alpha_star)
        }
    }
}

/// Per-draw optimized throughput with the average optimal split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantaneousEstimate {
    pub throughput: McEstimate,
    pub mean_alpha: f64,
    pub failed: u64,
}

/// Mean throughput when α is re-optimized on every draw.
///
/// Draws whose optimization fails are excluded from the mean; more than
/// 0.01% failures abort the run.
pub fn mc_throughput_instantaneous(
    params: &SystemParams,
    config: &LinkConfig,
    model: SinrModel,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(mc_instantaneous_detail(params, config, model, trials, seed)?.throughput)
}

/// As [`mc_throughput_instantaneous`], also reporting the mean α* and the
/// number of failed draws.
pub fn mc_instantaneous_detail(
    params: &SystemParams,
    config: &LinkConfig,
    model: SinrModel,
    trials: u64,
    seed: u64,
) -> Result<InstantaneousEstimate> {
    let prelog = config.duplex.prelog();
    let m = run(params, trials, seed, |ch| {
        let Ok(split) = optimal_alpha_instantaneous(ch, params, config, model) else {
            return Ok(None);
        };
        let g = sinr(ch, params, split, config, model)?;
        Ok(Some((prelog * (1.0 - split.alpha()) * g.ln_1p() / LN_2, split.alpha())))
    })?;
    if m.failed as f64 > MAX_FAILURE_FRACTION * trials as f64 {
        return Err(Error::OptimizerFailures { failed: m.failed, trials });
    }
    Ok(InstantaneousEstimate {
        throughput: estimate(m, trials, seed),
        mean_alpha: m.aux / m.n.max(1) as f64,
        failed: m.failed,
    })
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`. Sorts in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at significance 0.01.
pub fn ks_critical_001(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// Draws of the dual-antenna composite variables.
#[derive(Debug, Clone, Default)]
pub struct DualSamples {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: Vec<f64>,
}

/// `n` draws of `U`, `V`, `W = V |g|^2` and `T = U / |f|^2` (single stream).
pub fn sample_dual_variables(params: &SystemParams, n: usize, seed: u64) -> DualSamples {
    let mut sampler = ChannelSampler::new(seed, 0);
    let mut out = DualSamples::default();
    for _ in 0..n {
        let ch = draw_channel(&mut sampler, params);
        let v = ch.h1_sq + ch.h2_sq;
        let u = ch.h1_sq / v;
        out.u.push(u);
        out.v.push(v);
        out.w.push(v * ch.g_sq);
        out.t.push(u / ch.f_sq);
    }
    out
}

/// Pearson correlation coefficient.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Mode;

    fn cfg(d: Duplex, p: Protocol) -> LinkConfig {
        LinkConfig::new(d, p, Mode::Instantaneous)
    }

    #[test]
    fn no_loopback_reduces_to_noise_limited_dual_hop() {
        let p = SystemParams::default();
        let s = TimeSplit::new(0.3).unwrap();
        let ch = ChannelRealization::single(0.7, 1.2, 0.0);
        let pr = relay_power_single(&ch, &p, s);
        let g1 = p.ps_over_n0 * 0.7;
        let g2 = pr * 1.2;
        let got = sinr_exact(&ch, &p, s, &cfg(Duplex::FdSingle, Protocol::Af));
        assert!((got - g1 * g2 / (g1 + g2 + 1.0)).abs() < 1e-12 * got);
    }

    #[test]
    fn exact_df_below_interference_limited() {
        let p = SystemParams::default();
        let s = TimeSplit::new(0.2).unwrap();
        let mut sampler = ChannelSampler::new(3, 0);
        for _ in 0..1000 {
            let ch = draw_channel(&mut sampler, &p);
            for d in [Duplex::FdSingle, Duplex::FdDual] {
                let c = cfg(d, Protocol::Df);
                let il = sinr_interference_limited(&ch, &p, s, &c).unwrap();
                assert!(sinr_exact(&ch, &p, s, &c) <= il * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn interference_limited_af_drops_relay_noise_only() {
        // With the +1 removed from γ1 the exact composition is the analytic AF SINR.
        let p = SystemParams::default().with_ps_db(10.0);
        let s = TimeSplit::new(0.3).unwrap();
        let ch = ChannelRealization::single(0.83, 0.986, 0.235);
        let pr = relay_power_single(&ch, &p, s);
        let g1 = 10.0 * 0.83 / (0.235 * pr);
        let g2 = pr * 0.986;
        let want = g1 * g2 / (g1 + g2 + 1.0);
        let got = fd_single::sinr_af_inst(&ch, &p, s).unwrap();
        assert!(((got - want) / want).abs() < 1e-13);
    }

    #[test]
    fn outage_extremes() {
        let p = SystemParams::default();
        let s = TimeSplit::new(0.2).unwrap();
        let c = cfg(Duplex::FdSingle, Protocol::Df);
        assert_eq!(mc_outage(&p, s, &c, SinrModel::Exact, 0.0, 5000, 1).unwrap().mean, 0.0);
        assert_eq!(mc_outage(&p, s, &c, SinrModel::Exact, f64::INFINITY, 5000, 1).unwrap().mean, 1.0);
    }

    #[test]
    fn deterministic_across_chunking() {
        let p = SystemParams::default();
        let s = TimeSplit::new(0.2).unwrap();
        let c = cfg(Duplex::FdDual, Protocol::Af);
        let a = mc_ergodic(&p, s, &c, SinrModel::Exact, 150_000, 9).unwrap();
        let b = mc_ergodic(&p, s, &c, SinrModel::Exact, 150_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ks_of_uniform_grid() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&mut xs, |x| x) <= 0.0005 + 1e-12);
    }
}
