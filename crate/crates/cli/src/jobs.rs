//! Sweep points and their evaluation.

use fdrelay::model::{ChannelRealization, Duplex, LinkConfig, Mode, SystemParams, TimeSplit};
use fdrelay::optimize::{
    analytic_ergodic, analytic_outage, analytic_throughput, mc_throughput, optimal_throughput, OptimizeOptions,
};
use fdrelay::simulate::{self, McEstimate, SinrModel};
use fdrelay::Result;
use rayon::prelude::*;

use crate::csv::Row;

#[derive(Debug, Clone, Copy)]
pub enum Task {
    /// Analytic values at a fixed split, or at the optimal split when
    /// `alpha` is `None`. `mc` adds a simulated throughput.
    Point { alpha: Option<TimeSplit>, mc: bool },
    /// Interference-limited analytic values next to a simulation of the
    /// exact model at a fixed split.
    ExactCompare { alpha: TimeSplit },
    /// Throughput of one realization at a fixed split.
    Curve { ch: ChannelRealization, alpha: TimeSplit },
    /// Per-realization optimal split.
    Marker { ch: ChannelRealization },
}

#[derive(Debug, Clone)]
pub struct Job {
    pub sweep_var: String,
    pub value: f64,
    pub params: SystemParams,
    pub config: LinkConfig,
    pub task: Task,
}

/// Evaluates every job concurrently; rows come back in job order.
pub fn run_jobs(jobs: &[Job], opts: &OptimizeOptions) -> Result<Vec<Row>> {
    jobs.par_iter().map(|j| evaluate(j, opts)).collect()
}

fn with_mc(mut row: Row, est: McEstimate) -> Row {
    row.mc_mean = Some(est.mean);
    row.mc_ci95 = Some(est.half_width_95);
    row.trials = Some(est.trials);
    row.seed = Some(est.seed);
    row
}

/// Instantaneous mode at a fixed split has the delay-tolerant value.
fn fixed_split_config(config: &LinkConfig) -> LinkConfig {
    match config.mode {
        Mode::Instantaneous => LinkConfig { mode: Mode::DelayTolerant, ..*config },
        _ => *config,
    }
}

pub fn evaluate(job: &Job, opts: &OptimizeOptions) -> Result<Row> {
    let p = &job.params;
    let cfg = &job.config;
    let row = Row::new(job.sweep_var.clone(), job.value, *cfg);
    let analytic = cfg.duplex.has_analytics();
    match job.task {
        Task::Point { alpha, mc } => {
            let (split, throughput, est) = match alpha {
                Some(s) => {
                    let t = if analytic {
                        Some(analytic_throughput(p, s, &fixed_split_config(cfg), &opts.quad)?)
                    } else {
                        None
                    };
                    (s, t, None)
                }
                None => {
                    let r = optimal_throughput(p, cfg, opts)?;
                    (r.alpha_star, Some(r.throughput), r.mc)
                }
            };
            let per_draw = alpha.is_none() && cfg.mode == Mode::Instantaneous;
            let mut row = Row { alpha_star: Some(split.alpha()), throughput, ..row };
            if analytic && !per_draw {
                row.outage = Some(analytic_outage(p, split, cfg.duplex, cfg.protocol, &opts.quad)?);
                row.ergodic_rate = Some(analytic_ergodic(p, split, cfg.duplex, cfg.protocol, &opts.quad)?);
            }
            let est = match est {
                Some(e) => Some(e),
                None if mc || throughput.is_none() => Some(mc_throughput(p, split, &fixed_split_config(cfg), opts)?),
                None => None,
            };
            if let Some(e) = est {
                row = with_mc(row, e);
                row.throughput = row.throughput.or(Some(e.mean));
            }
            Ok(row)
        }
        Task::ExactCompare { alpha } => {
            let mut row = Row { alpha_star: Some(alpha.alpha()), ..row };
            let est = match cfg.mode {
                Mode::DelayConstrained => {
                    row.outage = Some(analytic_outage(p, alpha, cfg.duplex, cfg.protocol, &opts.quad)?);
                    simulate::mc_outage(p, alpha, cfg, SinrModel::Exact, p.gamma_th(), opts.trials, opts.seed)?
                }
                _ => {
                    row.ergodic_rate = Some(analytic_ergodic(p, alpha, cfg.duplex, cfg.protocol, &opts.quad)?);
                    simulate::mc_ergodic(p, alpha, cfg, SinrModel::Exact, opts.trials, opts.seed)?
                }
            };
            Ok(with_mc(row, est))
        }
        Task::Curve { ch, alpha } => {
            let g = simulate::sinr(&ch, p, alpha, cfg, opts.model)?;
            let t = cfg.duplex.prelog() * (1.0 - alpha.alpha()) * log2_1p(g);
            Ok(Row { alpha_star: Some(alpha.alpha()), throughput: Some(t), ..row })
        }
        Task::Marker { ch } => {
            let s = simulate::optimal_alpha_instantaneous(&ch, p, cfg, opts.model)?;
            let g = simulate::sinr(&ch, p, s, cfg, opts.model)?;
            let t = cfg.duplex.prelog() * (1.0 - s.alpha()) * log2_1p(g);
            Ok(Row { alpha_star: Some(s.alpha()), throughput: Some(t), ..row })
        }
    }
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

pub fn mentions_mc_only(jobs: &[Job]) -> bool {
    jobs.iter().any(|j| j.config.duplex == Duplex::HdDualMrc)
}
