//! Data recipes for the six result figures.
//!
//! Every recipe starts from the base parameters (defaults unless a config
//! file or override changes them) and emits all curves of the figure.

use fdrelay::model::{ChannelRealization, Duplex, LinkConfig, Mode, Protocol, SystemParams, TimeSplit};

use crate::jobs::{Job, Task};

const ANALYTIC: [Duplex; 3] = [Duplex::FdSingle, Duplex::FdDual, Duplex::HdSingle];
const FULL_DUPLEX: [Duplex; 2] = [Duplex::FdSingle, Duplex::FdDual];

/// The single realization used for the split curves.
pub fn reference_draw() -> ChannelRealization {
    ChannelRealization { h2_sq: 2.35, ..ChannelRealization::single(0.83, 0.986, 0.235) }
}

fn grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

fn split(a: f64) -> TimeSplit {
    TimeSplit::new(a).expect("recipe split inside (0, 1)")
}

fn point(var: &str, value: f64, params: SystemParams, config: LinkConfig) -> Job {
    Job { sweep_var: var.into(), value, params, config, task: Task::Point { alpha: None, mc: false } }
}

pub fn jobs(n: u8, base: &SystemParams, snr_db: &[f64]) -> Vec<Job> {
    match n {
        1 => interference_check(base, snr_db),
        2 => split_curves(base),
        3 => optimized_over_snr(base, snr_db),
        4 => loopback_sweep(base),
        5 => delay_tolerant_df(base, snr_db),
        6 => rate_sweep(base),
        _ => Vec::new(),
    }
}

/// Exact-model simulation against the interference-limited formulas:
/// outage at α = 0.2 and ergodic rate at α = 0.1.
fn interference_check(base: &SystemParams, snr_db: &[f64]) -> Vec<Job> {
    let mut out = Vec::new();
    for (mode, alpha) in [(Mode::DelayConstrained, 0.2), (Mode::DelayTolerant, 0.1)] {
        for duplex in FULL_DUPLEX {
            for protocol in Protocol::ALL {
                for &db in snr_db {
                    out.push(Job {
                        sweep_var: "ps_db".into(),
                        value: db,
                        params: base.with_ps_db(db),
                        config: LinkConfig::new(duplex, protocol, mode),
                        task: Task::ExactCompare { alpha: split(alpha) },
                    });
                }
            }
        }
    }
    out
}

/// Instantaneous throughput of one realization over α at 10 dB, with the
/// optimal split of each curve as an `alpha_star` row.
fn split_curves(base: &SystemParams) -> Vec<Job> {
    let params = base.with_ps_db(10.0);
    let ch = reference_draw();
    let mut out = Vec::new();
    for protocol in [Protocol::Df, Protocol::Af] {
        for duplex in ANALYTIC {
            let config = LinkConfig::new(duplex, protocol, Mode::Instantaneous);
            for a in grid(0.005, 0.005, 0.995) {
                out.push(Job {
                    sweep_var: "alpha".into(),
                    value: a,
                    params,
                    config,
                    task: Task::Curve { ch, alpha: split(a) },
                });
            }
            out.push(Job { sweep_var: "alpha_star".into(), value: 10.0, params, config, task: Task::Marker { ch } });
        }
    }
    out
}

/// Optimized throughput of every mode over SNR.
fn optimized_over_snr(base: &SystemParams, snr_db: &[f64]) -> Vec<Job> {
    let mut out = Vec::new();
    for duplex in ANALYTIC {
        for protocol in Protocol::ALL {
            for mode in Mode::ALL {
                for &db in snr_db {
                    out.push(point("ps_db", db, base.with_ps_db(db), LinkConfig::new(duplex, protocol, mode)));
                }
            }
        }
    }
    out
}

/// DF throughput over the loopback strength at 20 and 50 dB.
fn loopback_sweep(base: &SystemParams) -> Vec<Job> {
    let mut out = Vec::new();
    for db in [20.0, 50.0] {
        let var = format!("lambda_r@ps_db={db}");
        for duplex in ANALYTIC {
            for mode in [Mode::DelayConstrained, Mode::DelayTolerant] {
                for lr in grid(0.05, 0.05, 1.0) {
                    let params = SystemParams { lambda_r: lr, ..base.with_ps_db(db) };
                    out.push(point(&var, lr, params, LinkConfig::new(duplex, Protocol::Df, mode)));
                }
            }
        }
    }
    out
}

/// Delay-tolerant DF over SNR, including the two-antenna half-duplex relay,
/// for weak and strong loopback.
fn delay_tolerant_df(base: &SystemParams, snr_db: &[f64]) -> Vec<Job> {
    let mut out = Vec::new();
    for lr in [0.1, 0.3] {
        let var = format!("ps_db@lambda_r={lr}");
        for duplex in Duplex::ALL {
            for &db in snr_db {
                let params = SystemParams { lambda_r: lr, ..base.with_ps_db(db) };
                out.push(point(&var, db, params, LinkConfig::new(duplex, Protocol::Df, Mode::DelayTolerant)));
            }
        }
    }
    out
}

/// Delay-constrained throughput over the source rate at 40 dB.
fn rate_sweep(base: &SystemParams) -> Vec<Job> {
    let mut out = Vec::new();
    for duplex in ANALYTIC {
        for protocol in Protocol::ALL {
            for rc in grid(0.25, 0.25, 12.0) {
                let params = SystemParams { rc, gamma_th_override: None, ..base.with_ps_db(40.0) };
                out.push(point("rc", rc, params, LinkConfig::new(duplex, protocol, Mode::DelayConstrained)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_include_both_ends() {
        assert_eq!(grid(0.0, 5.0, 50.0).len(), 11);
        let g = grid(0.25, 0.25, 12.0);
        assert_eq!((g.len(), g[47]), (48, 12.0));
    }

    #[test]
    fn every_recipe_has_jobs() {
        let p = SystemParams::default();
        for n in 1..=6 {
            assert!(!jobs(n, &p, &[0.0, 10.0]).is_empty(), "figure {n}");
        }
        assert!(jobs(7, &p, &[0.0]).is_empty());
    }
}
