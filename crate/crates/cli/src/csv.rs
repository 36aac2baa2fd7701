use std::io::{self, Write};

use fdrelay::model::LinkConfig;

pub const HEADER: &str =
    "sweep_var,value,duplex,protocol,mode,alpha_star,throughput,outage,ergodic_rate,mc_mean,mc_ci95,trials,seed";

/// One output line. Quantities that were not computed stay `None` and are
/// written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_var: String,
    pub value: f64,
    pub config: LinkConfig,
    pub alpha_star: Option<f64>,
    pub throughput: Option<f64>,
    pub outage: Option<f64>,
    pub ergodic_rate: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_ci95: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl Row {
    pub fn new(sweep_var: impl Into<String>, value: f64, config: LinkConfig) -> Self {
        Row {
            sweep_var: sweep_var.into(),
            value,
            config,
            alpha_star: None,
            throughput: None,
            outage: None,
            ergodic_rate: None,
            mc_mean: None,
            mc_ci95: None,
            trials: None,
            seed: None,
        }
    }

    pub fn to_line(&self) -> String {
        [
            self.sweep_var.clone(),
            self.value.to_string(),
            self.config.duplex.to_string(),
            self.config.protocol.to_string(),
            self.config.mode.to_string(),
            opt(self.alpha_star),
            opt(self.throughput),
            opt(self.outage),
            opt(self.ergodic_rate),
            opt(self.mc_mean),
            opt(self.mc_ci95),
            opt(self.trials),
            opt(self.seed),
        ]
        .join(",")
    }
}

pub fn write_rows(out: &mut impl Write, rows: &[Row]) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_line())?;
    }
    out.flush()
}
