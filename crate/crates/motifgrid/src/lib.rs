//! Motif census and significance analysis for sparse, layered feed-forward
//! networks.
//!
//! A pruned feed-forward network is described purely by its binary
//! connectivity masks ([`mask::MaskStack`]). This crate counts the eight
//! 2nd- and 3rd-order sub-graph families exactly ([`motif`]), generates
//! randomized null ensembles with matched layer sizes and per-layer edge
//! counts ([`ensemble`]), and turns the two into per-motif z-scores and
//! distribution summaries ([`significance`]). A brute-force enumerator
//! ([`oracle`]) provides independent ground truth for testing, and a small
//! trainer ([`trainer`]) produces realistic pruned masks via iterative
//! magnitude pruning of toy regressors.
//!
//! Everything is deterministic given a root seed, including under the
//! rayon-backed `parallel` feature (enabled by default). Building with
//! `--no-default-features` swaps in sequential fallbacks with identical
//! results.

pub mod ensemble;
pub mod io;
pub mod mask;
pub mod motif;
pub mod oracle;
pub mod report;
pub mod significance;
pub mod trainer;

mod exec;
mod rng;

pub use mask::{CleanupMode, InvalidStackError, MaskMatrix, MaskStack, SparsityProfile};
pub use motif::{MotifCensus, MotifCounts, MotifKind};
pub use significance::ZScoreReport;
