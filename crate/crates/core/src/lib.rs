//! Simulator and analysis toolkit for hierarchical long-range quantum
//! state-transfer protocols.
//!
//! The library builds the nested-cube and gapped-chain geometries of the
//! protocol family, produces per-step coupling schedules with exact
//! closed-form runtimes, evolves single-excitation states (and mode
//! matrices for multi-qubit transfer) with real-orthogonal propagators,
//! injects multiplicative Gaussian coupling noise, and evaluates the
//! analytic error bounds (random-matrix, Duhamel, and long-range
//! power-law bounds) alongside Monte Carlo experiments.
//!
//! See the `examples/` directory for runnable demonstrations of each
//! capability; the `hierhop` binary exposes the same functionality as a
//! small CLI.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod linalg;
pub mod noise;
pub mod ortho;
pub mod schedule;

pub mod cli;

pub use config::{Convention, ProtocolConfig, Variant};
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
