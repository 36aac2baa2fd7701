mod csv;
mod figures;
mod jobs;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdrelay::model::{Duplex, LinkConfig, Mode, Protocol, SystemParams, TimeSplit};
use fdrelay::optimize::OptimizeOptions;
use fdrelay::simulate::SinrModel;
use fdrelay::specfun::QuadratureSpec;
use fdrelay::validation::{self, SuiteOptions, MIN_RECOMMENDED_TRIALS};
use fdrelay::Error;

use crate::csv::Row;
use crate::jobs::{Job, Task};

#[derive(Parser)]
#[command(name = "fdrelay", version, about = "Throughput of energy-harvesting full-duplex and half-duplex relay links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Outage, ergodic rate and throughput at one operating point.
    Eval,
    /// Sweep one parameter and write CSV rows.
    Sweep {
        /// Swept variable.
        #[arg(long, value_enum, default_value = "ps-db")]
        var: SweepVar,
        /// Grid `start:step:stop` for the swept variable (`--snr-db` for ps-db).
        #[arg(long)]
        range: Option<Grid>,
    },
    /// Write the data behind result figure 1 to 6.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        n: u8,
    },
    /// Optimal split and throughput at each SNR.
    Optimize,
    /// Run the validation criteria.
    Selftest {
        /// Criterion ids to run, comma separated; all when absent.
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=10))]
        only: Vec<u8>,
    },
}

#[derive(Args)]
struct Common {
    /// Parameter file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Monte Carlo trials (selftest defaults to 1e6).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// CSV output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Source SNR in dB: a value or `start:step:stop`.
    #[arg(long = "snr-db", global = true, allow_hyphen_values = true)]
    snr_db: Option<Grid>,
    /// Fixed time split; optimized when absent.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Duplex variants, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_duplex)]
    duplex: Vec<Duplex>,
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_protocol)]
    protocol: Vec<Protocol>,
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_mode)]
    mode: Vec<Mode>,
    #[arg(long = "gamma-th-override", global = true)]
    gamma_th_override: Option<f64>,
    /// Add Monte Carlo columns.
    #[arg(long, global = true)]
    mc: bool,
    /// SINR model used by the simulator.
    #[arg(long, global = true, value_enum, default_value = "interference-limited")]
    model: ModelArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepVar {
    PsDb,
    LambdaR,
    Rc,
    Alpha,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    InterferenceLimited,
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
struct Grid(Vec<f64>);

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [v] if v.is_finite() => Ok(Grid(vec![v])),
            [start, step, stop] => {
                if !(start.is_finite() && stop.is_finite() && start < stop) {
                    return Err(format!("grid needs start < stop, got {s:?}"));
                }
                if !(step > 0.0 && step.is_finite()) {
                    return Err(format!("grid step must be positive, got {s:?}"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                if n > 1_000_000 {
                    return Err(format!("grid {s:?} has too many points"));
                }
                Ok(Grid((0..=n).map(|i| start + step * i as f64).collect()))
            }
            _ => Err(format!("expected a value or start:step:stop, got {s:?}")),
        }
    }
}

fn parse_duplex(s: &str) -> Result<Duplex, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Validation(String),
    Numerical(String),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::Config { .. }
            | Error::DegenerateChannel(_)
            | Error::MonteCarloOnly(_) => Failure::Validation(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Selftest) => ExitCode::from(3),
    }
}

fn base_params(c: &Common) -> Result<SystemParams, Failure> {
    let mut p = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
            SystemParams::from_config_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?
        }
        None => SystemParams::default(),
    };
    if let Some(g) = c.gamma_th_override {
        p.gamma_th_override = Some(g);
    }
    p.validate()?;
    Ok(p)
}

fn options(c: &Common, default_trials: u64) -> Result<OptimizeOptions, Failure> {
    let trials = c.trials.unwrap_or(default_trials);
    if trials == 0 {
        return Err(Failure::Validation("--trials must be at least 1".into()));
    }
    if c.mc && trials < MIN_RECOMMENDED_TRIALS {
        return Err(Failure::Validation(format!(
            "Monte Carlo columns need at least {MIN_RECOMMENDED_TRIALS} trials, got {trials}"
        )));
    }
    Ok(OptimizeOptions {
        trials,
        seed: c.seed,
        model: match c.model {
            ModelArg::InterferenceLimited => SinrModel::InterferenceLimited,
            ModelArg::Exact => SinrModel::Exact,
        },
        quad: QuadratureSpec::default(),
        ..OptimizeOptions::default()
    })
}

fn alpha(c: &Common) -> Result<Option<TimeSplit>, Failure> {
    c.alpha.map(|a| TimeSplit::new(a).map_err(Failure::from)).transpose()
}

fn or_default<T: Clone>(v: &[T], d: T) -> Vec<T> {
    if v.is_empty() {
        vec![d]
    } else {
        v.to_vec()
    }
}

fn configs(c: &Common) -> Vec<LinkConfig> {
    let mut out = Vec::new();
    for d in or_default(&c.duplex, Duplex::FdSingle) {
        for p in or_default(&c.protocol, Protocol::Df) {
            for m in or_default(&c.mode, Mode::DelayConstrained) {
                out.push(LinkConfig::new(d, p, m));
            }
        }
    }
    out
}

fn snr_values(c: &Common, base: &SystemParams) -> Vec<f64> {
    match &c.snr_db {
        Some(g) => g.0.clone(),
        None => vec![10.0 * base.ps_over_n0.log10()],
    }
}

fn single_snr(c: &Common, base: &SystemParams) -> Result<SystemParams, Failure> {
    match snr_values(c, base)[..] {
        [db] => Ok(base.with_ps_db(db)),
        _ => Err(Failure::Validation("--snr-db must be a single value here".into())),
    }
}

fn emit(out: Option<&Path>, rows: &[Row]) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let f =
                File::create(path).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
            csv::write_rows(&mut BufWriter::new(f), rows)?;
        }
        None => csv::write_rows(&mut io::stdout().lock(), rows)?,
    }
    Ok(())
}

fn mc_only_notice(jobs: &[Job]) {
    if jobs::mentions_mc_only(jobs) {
        eprintln!(
            "note: hd-dual-mrc has no analytic formulas (MC-only mode); its analytic columns stay empty \
             and its values come from simulation"
        );
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Selftest { only } => return selftest(c, only),
        &Command::Figure { n } => {
            let base = base_params(c)?;
            let opts = options(c, 100_000)?;
            let db = c.snr_db.clone().map(|g| g.0).unwrap_or_else(|| (0..=10).map(|i| 5.0 * i as f64).collect());
            let jobs = figures::jobs(n, &base, &db);
            mc_only_notice(&jobs);
            let rows = jobs::run_jobs(&jobs, &opts)?;
            return emit(c.out.as_deref(), &rows);
        }
        _ => {}
    }
    let base = base_params(c)?;
    let opts = options(c, 100_000)?;
    let fixed = alpha(c)?;
    let task = Task::Point { alpha: fixed, mc: c.mc };
    let mut jobs = Vec::new();
    match &cli.command {
        Command::Eval | Command::Optimize => {
            if matches!(cli.command, Command::Optimize) && fixed.is_some() {
                return Err(Failure::Validation("optimize searches alpha; drop --alpha".into()));
            }
            let dbs = match cli.command {
                Command::Eval => vec![10.0 * single_snr(c, &base)?.ps_over_n0.log10()],
                _ => snr_values(c, &base),
            };
            for cfg in configs(c) {
                for &db in &dbs {
                    jobs.push(Job {
                        sweep_var: "ps_db".into(),
                        value: db,
                        params: base.with_ps_db(db),
                        config: cfg,
                        task,
                    });
                }
            }
        }
        Command::Sweep { var, range } => {
            let values = match (var, range, &c.snr_db) {
                (SweepVar::PsDb, Some(g), _) | (SweepVar::PsDb, None, Some(g)) => g.0.clone(),
                (_, Some(g), _) => g.0.clone(),
                (_, None, _) => return Err(Failure::Validation("sweep needs --range start:step:stop".into())),
            };
            let at = if matches!(var, SweepVar::PsDb) { base } else { single_snr(c, &base)? };
            for cfg in configs(c) {
                for &v in &values {
                    let (name, params, t) = match var {
                        SweepVar::PsDb => ("ps_db", at.with_ps_db(v), task),
                        SweepVar::LambdaR => ("lambda_r", SystemParams { lambda_r: v, ..at }, task),
                        SweepVar::Rc => ("rc", SystemParams { rc: v, ..at }, task),
                        SweepVar::Alpha => ("alpha", at, Task::Point { alpha: Some(TimeSplit::new(v)?), mc: c.mc }),
                    };
                    params.validate()?;
                    jobs.push(Job { sweep_var: name.into(), value: v, params, config: cfg, task: t });
                }
            }
        }
        Command::Selftest { .. } | Command::Figure { .. } => unreachable!(),
    }
    mc_only_notice(&jobs);
    let rows = jobs::run_jobs(&jobs, &opts)?;
    match cli.command {
        Command::Eval | Command::Optimize => {
            print_table(&rows, &mut io::stdout().lock())?;
            if let Some(path) = &c.out {
                emit(Some(path), &rows)?;
            }
            Ok(())
        }
        _ => emit(c.out.as_deref(), &rows),
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

fn print_table(rows: &[Row], out: &mut impl Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<12} {:>6} {:<8} {:<17} {:>9} {:>10} {:>10} {:>10}  monte carlo (95% CI)",
        "duplex", "ps_db", "protocol", "mode", "alpha", "throughput", "outage", "ergodic"
    )?;
    for r in rows {
        let mc = match (r.mc_mean, r.mc_ci95) {
            (Some(m), Some(h)) => format!("{m:.6} +/- {h:.6}"),
            _ => "-".into(),
        };
        writeln!(
            out,
            "{:<12} {:>6} {:<8} {:<17} {:>9} {:>10} {:>10} {:>10}  {}",
            r.config.duplex.to_string(),
            r.value,
            r.config.protocol.to_string(),
            r.config.mode.to_string(),
            cell(r.alpha_star),
            cell(r.throughput),
            cell(r.outage),
            cell(r.ergodic_rate),
            mc
        )?;
    }
    out.flush()
}

fn selftest(c: &Common, only: &[u8]) -> Result<(), Failure> {
    let trials = c.trials.unwrap_or(1_000_000);
    if trials == 0 {
        return Err(Failure::Validation("--trials must be at least 1".into()));
    }
    if trials < MIN_RECOMMENDED_TRIALS {
        eprintln!(
            "warning: {trials} trials is below {MIN_RECOMMENDED_TRIALS}; the confidence-interval checks are underpowered"
        );
    }
    let opts = SuiteOptions { trials, seed: c.seed, ..SuiteOptions::default() };
    println!("selftest: {trials} trials, seed {}", c.seed);
    let start = Instant::now();
    let checks: Vec<_> = if only.is_empty() {
        validation::run_suite(&opts, |chk| println!("{chk}"))
    } else {
        only.iter()
            .map(|&id| {
                let chk = validation::run_criterion(id, &opts);
                println!("{chk}");
                chk
            })
            .collect()
    };
    let failed = checks.iter().filter(|k| !k.passed).count();
    println!(
        "selftest: {} of {} criteria passed in {:.1} s",
        checks.len() - failed,
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        Err(Failure::Selftest)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!("20".parse::<Grid>().unwrap(), Grid(vec![20.0]));
        assert_eq!("0:5:20".parse::<Grid>().unwrap().0, vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!("0.1:0.1:0.3".parse::<Grid>().unwrap().0.len(), 3);
        for bad in ["5:1:0", "0:0:1", "0:-1:5", "a", "1:2", ""] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_product_defaults() {
        let cli = Cli::try_parse_from(["fdrelay", "eval", "--duplex", "fd-single,hd", "--mode", "dt"]).unwrap();
        let cs = configs(&cli.common);
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.protocol == Protocol::Df && c.mode == Mode::DelayTolerant));
    }
}
