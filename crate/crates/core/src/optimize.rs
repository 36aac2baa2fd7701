//! Maximization of throughput over the harvesting fraction α.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Duplex, LinkConfig, Mode, Protocol, SystemParams, TimeSplit};
use crate::simulate::{self, McEstimate, SinrModel};
use crate::specfun::QuadratureSpec;
use crate::{fd_dual, fd_single, hd};

/// Search interval margin: α is confined to `[ALPHA_EPS, 1 - ALPHA_EPS]`.
pub const ALPHA_EPS: f64 = 1e-6;
/// Default bracket width at which golden-section search stops.
pub const DEFAULT_TOL: f64 = 1e-6;
const GRID_POINTS: usize = 64;
const MAX_GOLDEN_EVALS: usize = 80;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    GoldenSection,
    GridRefine,
}

/// Optimal split with the throughput it attains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputResult {
    pub alpha_star: TimeSplit,
    pub throughput: f64,
    pub objective_evals: usize,
    pub method: Method,
    /// Monte Carlo estimate behind `throughput`, when it came from simulation.
    pub mc: Option<McEstimate>,
}

/// Settings for [`optimal_throughput`]. The Monte Carlo fields are used in
/// instantaneous mode and for variants without closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub tol: f64,
    pub quad: QuadratureSpec,
    pub trials: u64,
    pub seed: u64,
    pub model: SinrModel,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            tol: DEFAULT_TOL,
            quad: QuadratureSpec::default(),
            trials: 100_000,
            seed: 0,
            model: SinrModel::InterferenceLimited,
        }
    }
}

struct Memo<F> {
    f: F,
    cache: HashMap<u64, f64>,
}

impl<F: FnMut(f64) -> Result<f64>> Memo<F> {
    fn eval(&mut self, alpha: f64) -> Result<f64> {
        if let Some(&v) = self.cache.get(&alpha.to_bits()) {
            return Ok(v);
        }
        let v = (self.f)(alpha)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { alpha });
        }
        self.cache.insert(alpha.to_bits(), v);
        Ok(v)
    }
}

/// Maximizes `objective` over α.
///
/// A 64-point grid picks the best bracket, golden-section search narrows it
/// to `tol`, and a three-point polish around the incumbent finishes. The
/// better of the grid point and the refined point is returned; ties go to
/// the smaller α.
pub fn maximize_over_alpha<F>(objective: F, tol: f64) -> Result<ThroughputResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let mut memo = Memo { f: objective, cache: HashMap::new() };
    let lo = ALPHA_EPS;
    let hi = 1.0 - ALPHA_EPS;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();

    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = memo.eval(x)?;
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let grid_alpha = grid[best_i];

    let mut a = grid[best_i.saturating_sub(1)];
    let mut b = grid[(best_i + 1).min(GRID_POINTS - 1)];
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = memo.eval(x1)?;
    let mut f2 = memo.eval(x2)?;
    let mut evals = 2;
    while b - a > tol && evals < MAX_GOLDEN_EVALS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = memo.eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = memo.eval(x2)?;
        }
        evals += 1;
    }
    let (mut ref_alpha, mut ref_v) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };

    let h = tol.min(0.5 * (b - a).max(tol));
    for x in [ref_alpha - h, ref_alpha + h] {
        if x >= lo && x <= hi {
            let v = memo.eval(x)?;
            if v > ref_v || (v == ref_v && x < ref_alpha) {
                ref_alpha = x;
                ref_v = v;
            }
        }
    }

    let (alpha, value, method) = if ref_v > best_v || (ref_v == best_v && ref_alpha < grid_alpha) {
        (ref_alpha, ref_v, Method::GoldenSection)
    } else {
        (grid_alpha, best_v, Method::GridRefine)
    };
    Ok(ThroughputResult {
        alpha_star: TimeSplit::new(alpha)?,
        throughput: value,
        objective_evals: memo.cache.len(),
        method,
        mc: None,
    })
}

/// Outage probability from the closed forms of the chosen variant.
pub fn analytic_outage(
    params: &SystemParams,
    split: TimeSplit,
    duplex: Duplex,
    protocol: Protocol,
    quad: &QuadratureSpec,
) -> Result<f64> {
    match (duplex, protocol) {
        (Duplex::FdSingle, Protocol::Af) => fd_single::outage_af(params, split, quad),
        (Duplex::FdSingle, Protocol::Df) => fd_single::outage_df(params, split),
        (Duplex::FdDual, Protocol::Af) => fd_dual::outage_af_dual(params, split, quad),
        (Duplex::FdDual, Protocol::Df) => fd_dual::outage_df_dual(params, split),
        (Duplex::HdSingle, Protocol::Af) => hd::outage_af_hd(params, split, quad),
        (Duplex::HdSingle, Protocol::Df) => hd::outage_df_hd(params, split, quad),
        (Duplex::HdDualMrc, _) => Err(Error::MonteCarloOnly("hd-dual-mrc")),
    }
}

/// Ergodic rate `E log2(1 + γ)` from the closed forms, without prelog.
pub fn analytic_ergodic(
    params: &SystemParams,
    split: TimeSplit,
    duplex: Duplex,
    protocol: Protocol,
    quad: &QuadratureSpec,
) -> Result<f64> {
    match (duplex, protocol) {
        (Duplex::FdSingle, Protocol::Af) => fd_single::ergodic_af(params, split, quad),
        (Duplex::FdSingle, Protocol::Df) => fd_single::ergodic_df(params, split, quad),
        (Duplex::FdDual, Protocol::Af) => fd_dual::ergodic_af_dual(params, split, quad),
        (Duplex::FdDual, Protocol::Df) => fd_dual::ergodic_df_dual(params, split, quad),
        (Duplex::HdSingle, Protocol::Af) => hd::ergodic_af_hd(params, split, quad),
        (Duplex::HdSingle, Protocol::Df) => hd::ergodic_df_hd(params, split, quad),
        (Duplex::HdDualMrc, _) => Err(Error::MonteCarloOnly("hd-dual-mrc")),
    }
}

/// Throughput at a fixed split for the delay-constrained and delay-tolerant
/// modes.
pub fn analytic_throughput(
    params: &SystemParams,
    split: TimeSplit,
    config: &LinkConfig,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let value = match config.mode {
        Mode::Instantaneous => {
            return Err(Error::MonteCarloOnly("instantaneous throughput"));
        }
        Mode::DelayConstrained => analytic_outage(params, split, config.duplex, config.protocol, quad)?,
        Mode::DelayTolerant => analytic_ergodic(params, split, config.duplex, config.protocol, quad)?,
    };
    match (config.duplex, config.mode) {
        (Duplex::HdSingle, mode) => hd::throughput_hd(mode, params, split, value),
        (_, Mode::DelayConstrained) => fd_single::throughput_delay_constrained(params, split, value),
        _ => Ok(fd_single::throughput_delay_tolerant(split, value)),
    }
}

/// Simulated throughput at a fixed split; delay-constrained mode counts
/// a draw as `R_c` when its SINR clears the threshold.
pub fn mc_throughput(
    params: &SystemParams,
    split: TimeSplit,
    config: &LinkConfig,
    opts: &OptimizeOptions,
) -> Result<McEstimate> {
    let pre = config.duplex.prelog() * (1.0 - split.alpha());
    match config.mode {
        Mode::Instantaneous | Mode::DelayTolerant => {
            simulate::mc_throughput_fixed(params, split, config, opts.model, opts.trials, opts.seed)
        }
        Mode::DelayConstrained => {
            let p = simulate::mc_outage(params, split, config, opts.model, params.gamma_th(), opts.trials, opts.seed)?;
            let scale = pre * params.rc;
            Ok(McEstimate { mean: scale * (1.0 - p.mean), half_width_95: scale * p.half_width_95, ..p })
        }
    }
}

/// Throughput maximized over α.
///
/// Delay-constrained and delay-tolerant modes search the analytic
/// objective. Instantaneous mode averages per-draw optima by simulation and
/// reports the mean optimal split. Variants without closed forms search a
/// common-random-number Monte Carlo objective.
pub fn optimal_throughput(
    params: &SystemParams,
    config: &LinkConfig,
    opts: &OptimizeOptions,
) -> Result<ThroughputResult> {
    params.validate()?;
    if config.mode == Mode::Instantaneous {
        let est = simulate::mc_instantaneous_detail(params, config, opts.model, opts.trials, opts.seed)?;
        let method = match config.protocol {
            Protocol::Df if config.duplex != Duplex::HdDualMrc => Method::ClosedForm,
            _ => Method::GoldenSection,
        };
        let alpha = est.mean_alpha.clamp(ALPHA_EPS, 1.0 - ALPHA_EPS);
        return Ok(ThroughputResult {
            alpha_star: TimeSplit::new(alpha)?,
            throughput: est.throughput.mean,
            objective_evals: est.throughput.trials as usize,
            method,
            mc: Some(est.throughput),
        });
    }
    if config.duplex.has_analytics() {
        return maximize_over_alpha(|a| analytic_throughput(params, TimeSplit::new(a)?, config, &opts.quad), opts.tol);
    }
    let mut r = maximize_over_alpha(|a| Ok(mc_throughput(params, TimeSplit::new(a)?, config, opts)?.mean), opts.tol)?;
    r.mc = Some(mc_throughput(params, r.alpha_star, config, opts)?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_peak() {
        let r = maximize_over_alpha(|a| Ok(-(a - 0.37) * (a - 0.37)), DEFAULT_TOL).unwrap();
        assert!((r.alpha_star.alpha() - 0.37).abs() <= 1e-6, "{}", r.alpha_star.alpha());
    }

    #[test]
    fn constant_objective_takes_lowest_alpha() {
        let r = maximize_over_alpha(|_| Ok(1.0), DEFAULT_TOL).unwrap();
        assert_eq!(r.alpha_star.alpha(), ALPHA_EPS);
        assert_eq!(r.method, Method::GridRefine);
    }

    #[test]
    fn non_finite_objective_reports_alpha() {
        let r = maximize_over_alpha(|a| Ok(if a > 0.5 { f64::NAN } else { a }), DEFAULT_TOL);
        assert!(matches!(r, Err(Error::NonFiniteObjective { alpha }) if alpha > 0.5));
    }

    #[test]
    fn returned_value_is_objective_at_alpha() {
        let f = |a: f64| (1.0 - a) * (1.0 + 3.2735 * a / (1.0 - a)).log2();
        let r = maximize_over_alpha(|a| Ok(f(a)), DEFAULT_TOL).unwrap();
        assert_eq!(r.throughput, f(r.alpha_star.alpha()));
        assert!(r.objective_evals <= GRID_POINTS + MAX_GOLDEN_EVALS + 2);
    }
}
