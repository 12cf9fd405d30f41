//! Planning toolkit for trusted-node BB84 backbone networks.
//!
//! The crate models the key-generation performance of individual quantum
//! key distribution links from device and fiber parameters, and optimizes
//! the placement of optical switches and the Alice/Bob device assignment
//! along a backbone so that equipment cost is minimal at the maximal
//! end-to-end secret-key throughput.
//!
//! Modules:
//!
//! * [`model`] — deterministic click model of one link: transmittance,
//!   duty cycle, detection and dark-count probabilities, QBER, sifted rate
//!   with dead-time correction;
//! * [`secrecy`] — secret-key-rate lower bounds for plain and two-decoy
//!   BB84 from the observed gains and error rates;
//! * [`device`] — exhaustive optimization of the detector working point
//!   and signal intensity over a candidate list;
//! * [`backbone`] — cluster splitting, odd/even time sharing, exhaustive
//!   switch-placement search and cheapest device assignment;
//! * [`netfile`] — the TOML network description format;
//! * [`blocks`] — block-wise QBER monitoring of measured keys;
//! * [`report`] — byte-stable table and CSV rendering;
//! * [`cli`] — the `qkd-netplan` command-line front end.
//!
//! Start with the runnable examples: `cargo run --example link_rates`,
//! `backbone_plan`, `device_sweep`, `security_range`, `block_qber`.

pub mod backbone;
pub mod blocks;
pub mod cli;
pub mod device;
pub mod error;
pub mod model;
pub mod netfile;
pub mod report;
pub mod secrecy;

pub use backbone::{
    best_configurations, cheapest_implementation, cluster_split, effective_rate,
    enumerate_implementations, plan, subgroup_rate, Configuration, CostModel, Implementation,
    NetworkSpec, PlanReport,
};
pub use blocks::{block_qber, BlockQberSeries};
pub use device::{optimize, sweep_mu, DetectorCandidate, OptimizationResult};
pub use error::{Error, Result};
pub use model::{
    link_stats, DetectorCount, DetectorParams, LinkBudget, LinkStats, ProtocolConfig,
    ProtocolVariant, QberOptions, Scheme,
};
pub use netfile::NetworkFile;
pub use secrecy::{
    binary_entropy, decoy_bounds, link_performance, no_decoy_bounds, secret_rate, GainError,
    LinkPerformance, SecrecyResult,
};
