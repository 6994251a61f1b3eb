//! Two-armed bandit simulation and inference under strategy-driven limit laws.
//!
//! The crate covers arm laws and play ([`env`]), the decision rules
//! ([`strategies`]), running statistics ([`statistics`]), the limiting Bandit
//! distribution ([`banditdist`]), hypothesis tests ([`inference`]), rate
//! functions ([`ldp`]) and the experiment driver ([`harness`]).

// NaN-rejecting guards are written `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod banditdist;
pub mod env;
pub mod error;
pub mod fmt;
pub mod harness;
pub mod inference;
pub mod ks;
pub mod ldp;
pub mod normal;
pub mod quadrature;
pub mod rng;
pub mod statistics;
pub mod strategies;

pub use banditdist::{bandit_cdf, bandit_pdf, BanditCdf, BanditParams, SdeConfig};
pub use env::{play, Arm, ArmModel, Order, TabEnv, Trajectory};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use statistics::{StatParams, StatState};
pub use strategies::{Policy, StrategyKind, StrategySpec, StrategyState};
