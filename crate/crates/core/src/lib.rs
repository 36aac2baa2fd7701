//! Throughput analysis of dual-hop relay links whose relay is powered by
//! energy harvested from the source's RF signal (time-switching receiver).
//!
//! The crate covers full-duplex relaying with one or two harvesting
//! antennas and the half-duplex baseline, for amplify-and-forward and
//! decode-and-forward relaying. For every configuration it provides the
//! instantaneous SINR, the outage probability, the ergodic rate and the
//! throughput-optimal time split, plus a seeded Monte Carlo simulator that
//! serves as an independent check of each formula.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fd_dual;
pub mod fd_single;
pub mod hd;
pub mod laws;
pub mod model;
pub mod optimize;
pub mod simulate;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
