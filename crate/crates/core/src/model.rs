//! Link parameters, fading realizations and configuration selectors.
//!
//! Powers are ratios to the receiver noise power, so the noise power itself
//! never appears. The block length is normalized to one.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Static link parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Source transmit power over noise power (linear).
    pub ps_over_n0: f64,
    /// Energy conversion efficiency.
    pub eta: f64,
    /// Path-loss exponent.
    pub m: f64,
    /// Source-relay distance.
    pub d1: f64,
    /// Relay-destination distance.
    pub d2: f64,
    /// Mean of the source-relay gains |h1|^2 and |h2|^2.
    pub lambda_s: f64,
    /// Mean of the relay-destination gain |g|^2.
    pub lambda_d: f64,
    /// Mean of the residual loopback gain |f|^2.
    pub lambda_r: f64,
    /// Fixed source rate in bits/s/Hz.
    pub rc: f64,
    /// Replaces `2^rc - 1` as the outage threshold when set.
    pub gamma_th_override: Option<f64>,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            ps_over_n0: 100.0,
            eta: 0.4,
            m: 3.0,
            d1: 1.0,
            d2: 1.0,
            lambda_s: 1.0,
            lambda_d: 1.0,
            lambda_r: 0.1,
            rc: 3.0,
            gamma_th_override: None,
        }
    }
}

/// Converts decibels to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl SystemParams {
    /// Checks every field against its admissible range.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ps_over_n0", self.ps_over_n0),
            ("eta", self.eta),
            ("d1", self.d1),
            ("d2", self.d2),
            ("lambda_s", self.lambda_s),
            ("lambda_d", self.lambda_d),
            ("lambda_r", self.lambda_r),
            ("rc", self.rc),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive and finite")));
            }
        }
        if self.eta > 1.0 {
            return Err(Error::InvalidParameter(format!("eta = {} exceeds 1", self.eta)));
        }
        if !(self.m >= 2.0 && self.m.is_finite()) {
            return Err(Error::InvalidParameter(format!("m = {} must be at least 2", self.m)));
        }
        if let Some(g) = self.gamma_th_override {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!("gamma_th_override = {g} must be positive")));
            }
        }
        Ok(())
    }

    /// Copy with the source power set from a dB value.
    pub fn with_ps_db(mut self, db: f64) -> Self {
        self.ps_over_n0 = db_to_linear(db);
        self
    }

    /// Outage threshold `2^rc - 1`, or the override.
    pub fn gamma_th(&self) -> f64 {
        self.gamma_th_override.unwrap_or_else(|| {
            // expm1 keeps small rates accurate; exp2 is exact at integer rates.
            if self.rc < 1.0 {
                (self.rc * std::f64::consts::LN_2).exp_m1()
            } else {
                self.rc.exp2() - 1.0
            }
        })
    }

    /// `d1^m`.
    pub fn path_loss1(&self) -> f64 {
        self.d1.powf(self.m)
    }

    /// `d2^m`.
    pub fn path_loss2(&self) -> f64 {
        self.d2.powf(self.m)
    }

    /// End-to-end power scale `Ps / (N0 d1^m d2^m)`.
    pub fn a(&self) -> f64 {
        self.ps_over_n0 / (self.path_loss1() * self.path_loss2())
    }

    /// Mean of the product gain `|h1|^2 |g|^2`.
    pub fn lambda_sd(&self) -> f64 {
        self.lambda_s * self.lambda_d
    }

    /// Parses `key = value` lines on top of the defaults.
    ///
    /// Keys are the field names; any key may carry a `_db` suffix, in which
    /// case the value is read in decibels. `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut p = SystemParams::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Config { line, message: format!("expected key = value, found {content:?}") })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| Error::Config {
                line,
                message: format!("value for {key} is not a number: {:?}", value.trim()),
            })?;
            let (name, v) = match key.strip_suffix("_db") {
                Some(base) => (base, db_to_linear(value)),
                None => (key, value),
            };
            let slot = match name {
                "ps_over_n0" => &mut p.ps_over_n0,
                "eta" => &mut p.eta,
                "m" => &mut p.m,
                "d1" => &mut p.d1,
                "d2" => &mut p.d2,
                "lambda_s" => &mut p.lambda_s,
                "lambda_d" => &mut p.lambda_d,
                "lambda_r" => &mut p.lambda_r,
                "rc" => &mut p.rc,
                "gamma_th_override" | "gamma_th" => {
                    p.gamma_th_override = Some(v);
                    continue;
                }
                _ => return Err(Error::Config { line, message: format!("unknown key {key:?}") }),
            };
            *slot = v;
        }
        p.validate()?;
        Ok(p)
    }
}

/// One block of fading gains (squared magnitudes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub h1_sq: f64,
    pub h2_sq: f64,
    pub g_sq: f64,
    pub f_sq: f64,
    /// Second relay-destination gain, used only by the two-antenna
    /// half-duplex relay when it transmits with both antennas.
    pub g2_sq: f64,
}

impl ChannelRealization {
    /// Realization with the given single-antenna gains and `h2 = g2 = 0`.
    pub fn single(h1_sq: f64, g_sq: f64, f_sq: f64) -> Self {
        ChannelRealization { h1_sq, h2_sq: 0.0, g_sq, f_sq, g2_sq: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("h1_sq", self.h1_sq),
            ("h2_sq", self.h2_sq),
            ("g_sq", self.g_sq),
            ("f_sq", self.f_sq),
            ("g2_sq", self.g2_sq),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be nonnegative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Duplex {
    FdSingle,
    FdDual,
    HdSingle,
    HdDualMrc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Af,
    Df,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Instantaneous,
    DelayConstrained,
    DelayTolerant,
}

impl Duplex {
    pub const ALL: [Duplex; 4] = [Duplex::FdSingle, Duplex::FdDual, Duplex::HdSingle, Duplex::HdDualMrc];

    pub fn is_full_duplex(self) -> bool {
        matches!(self, Duplex::FdSingle | Duplex::FdDual)
    }

    /// Whether closed-form or quadrature formulas exist.
    pub fn has_analytics(self) -> bool {
        self != Duplex::HdDualMrc
    }

    /// Prelog factor: 1 for full duplex, 1/2 for half duplex.
    pub fn prelog(self) -> f64 {
        if self.is_full_duplex() {
            1.0
        } else {
            0.5
        }
    }
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Af, Protocol::Df];
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Instantaneous, Mode::DelayConstrained, Mode::DelayTolerant];
}

/// Selects the formula family: duplex variant, relaying protocol and
/// transmission mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinkConfig {
    pub duplex: Duplex,
    pub protocol: Protocol,
    pub mode: Mode,
}

impl LinkConfig {
    pub fn new(duplex: Duplex, protocol: Protocol, mode: Mode) -> Self {
        LinkConfig { duplex, protocol, mode }
    }

    /// Fails for configurations that only the simulator can evaluate.
    pub fn require_analytics(&self) -> Result<()> {
        if self.duplex.has_analytics() {
            Ok(())
        } else {
            Err(Error::MonteCarloOnly("hd-dual-mrc"))
        }
    }
}

impl fmt::Display for Duplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Duplex::FdSingle => "fd-single",
            Duplex::FdDual => "fd-dual",
            Duplex::HdSingle => "hd-single",
            Duplex::HdDualMrc => "hd-dual-mrc",
        })
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Af => "af",
            Protocol::Df => "df",
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Instantaneous => "instantaneous",
            Mode::DelayConstrained => "delay-constrained",
            Mode::DelayTolerant => "delay-tolerant",
        })
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('_', "-")
}

impl FromStr for Duplex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match normalize(s).as_str() {
            "fd-single" | "fdsingle" => Ok(Duplex::FdSingle),
            "fd-dual" | "fddual" => Ok(Duplex::FdDual),
            "hd-single" | "hdsingle" | "hd" => Ok(Duplex::HdSingle),
            "hd-dual-mrc" | "hddualmrc" | "hd-dual" => Ok(Duplex::HdDualMrc),
            _ => Err(Error::InvalidParameter(format!("unknown duplex variant {s:?}"))),
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match normalize(s).as_str() {
            "af" => Ok(Protocol::Af),
            "df" => Ok(Protocol::Df),
            _ => Err(Error::InvalidParameter(format!("unknown protocol {s:?}"))),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match normalize(s).as_str() {
            "instantaneous" | "inst" => Ok(Mode::Instantaneous),
            "delay-constrained" | "dc" => Ok(Mode::DelayConstrained),
            "delay-tolerant" | "dt" => Ok(Mode::DelayTolerant),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

/// Fraction of the block spent harvesting, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TimeSplit(f64);

impl TimeSplit {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(TimeSplit(alpha))
        } else {
            Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

/// `k = eta alpha / (1 - alpha)`, harvested-to-transmit power conversion.
pub fn k_factor(params: &SystemParams, split: TimeSplit) -> f64 {
    let a = split.alpha();
    params.eta * a / (1.0 - a)
}

/// Relay transmit power (over N0) harvested by one antenna.
pub fn relay_power_single(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> f64 {
    k_factor(params, split) * params.ps_over_n0 * ch.h1_sq / params.path_loss1()
}

/// Relay transmit power (over N0) harvested by both antennas.
pub fn relay_power_dual(ch: &ChannelRealization, params: &SystemParams, split: TimeSplit) -> f64 {
    k_factor(params, split) * params.ps_over_n0 * (ch.h1_sq + ch.h2_sq) / params.path_loss1()
}

/// Seeded source of channel draws.
///
/// Each `(seed, stream)` pair addresses an independent ChaCha8 keystream, so
/// parallel workers can draw from disjoint substreams reproducibly.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    rng: ChaCha8Rng,
}

impl ChannelSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ChannelSampler { rng }
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }

    /// Exponential variate with the given mean, by inversion.
    pub fn exponential(&mut self, mean: f64) -> f64 {
        -mean * self.uniform().ln()
    }
}

/// Draws one realization: `h1, h2, g, f, g2` in that order.
pub fn draw_channel(sampler: &mut ChannelSampler, params: &SystemParams) -> ChannelRealization {
    ChannelRealization {
        h1_sq: sampler.exponential(params.lambda_s),
        h2_sq: sampler.exponential(params.lambda_s),
        g_sq: sampler.exponential(params.lambda_d),
        f_sq: sampler.exponential(params.lambda_r),
        g2_sq: sampler.exponential(params.lambda_d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(a: f64) -> TimeSplit {
        TimeSplit::new(a).unwrap()
    }

    #[test]
    fn k_factor_values() {
        let p = SystemParams::default();
        assert!((k_factor(&p, split(0.5)) - 0.4).abs() < 1e-15);
        assert!(k_factor(&p, split(1e-12)) < 1e-11);
        let p1 = SystemParams { eta: 1.0, ..p };
        assert_eq!(k_factor(&p1, split(0.5)), 1.0);
    }

    #[test]
    fn relay_powers() {
        let p = SystemParams { ps_over_n0: 10.0, ..Default::default() };
        let ch = ChannelRealization::single(1.0, 1.0, 0.1);
        assert!((relay_power_single(&ch, &p, split(0.5)) - 4.0).abs() < 1e-12);
        assert_eq!(relay_power_single(&ChannelRealization::single(0.0, 1.0, 0.1), &p, split(0.5)), 0.0);
        assert_eq!(relay_power_dual(&ch, &p, split(0.5)), relay_power_single(&ch, &p, split(0.5)));
        let both = ChannelRealization { h2_sq: 1.0, ..ch };
        assert!((relay_power_dual(&both, &p, split(0.5)) - 8.0).abs() < 1e-12);
        let fig = ChannelRealization { h1_sq: 0.83, h2_sq: 2.35, ..ch };
        assert!((relay_power_dual(&fig, &p, split(0.5)) - 12.72).abs() < 1e-12);
    }

    #[test]
    fn gamma_th_default_and_override() {
        let p = SystemParams::default();
        assert!((p.gamma_th() - 7.0).abs() < 1e-14);
        let q = SystemParams { gamma_th_override: Some(3.0), ..p };
        assert_eq!(q.gamma_th(), 3.0);
    }

    #[test]
    fn time_split_rejects_endpoints() {
        assert!(TimeSplit::new(0.0).is_err());
        assert!(TimeSplit::new(1.0).is_err());
        assert!(TimeSplit::new(f64::NAN).is_err());
    }

    #[test]
    fn validation() {
        assert!(SystemParams::default().validate().is_ok());
        assert!(SystemParams { eta: 1.5, ..Default::default() }.validate().is_err());
        assert!(SystemParams { m: 1.5, ..Default::default() }.validate().is_err());
        assert!(SystemParams { lambda_r: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn config_parsing() {
        let p = SystemParams::from_config_str("# link\nps_over_n0_db = 20\n\neta=0.5 # efficiency\nlambda_r = 0.2\n")
            .unwrap();
        assert!((p.ps_over_n0 - 100.0).abs() < 1e-9);
        assert_eq!(p.eta, 0.5);
        assert_eq!(p.lambda_r, 0.2);
        assert_eq!(p.m, 3.0);

        match SystemParams::from_config_str("eta = 0.4\nbogus = 1\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match SystemParams::from_config_str("eta 0.4\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        assert!(SystemParams::from_config_str("eta = 2\n").is_err());
    }

    #[test]
    fn enum_round_trip() {
        for d in Duplex::ALL {
            assert_eq!(d.to_string().parse::<Duplex>().unwrap(), d);
        }
        for p in Protocol::ALL {
            assert_eq!(p.to_string().parse::<Protocol>().unwrap(), p);
        }
        for m in Mode::ALL {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("xx".parse::<Mode>().is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_streams_differ() {
        let p = SystemParams::default();
        let mut a = ChannelSampler::new(7, 0);
        let mut b = ChannelSampler::new(7, 0);
        let mut c = ChannelSampler::new(7, 1);
        let x = draw_channel(&mut a, &p);
        assert_eq!(x, draw_channel(&mut b, &p));
        assert_ne!(x, draw_channel(&mut c, &p));
    }
}
