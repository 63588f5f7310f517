//! Coded Map-Shuffle-Reduce over a shared wireless channel.
//!
//! A network controller Lagrange-encodes a dataset, replicates the coded rows
//! in batches across `K` full-duplex devices, and waits for the fastest `q`
//! devices to finish their Map computations. The non-stragglers then exchange
//! intermediate values so every device can reduce its assigned polynomial
//! outputs. This crate provides:
//!
//! * exact prime-field arithmetic and Lagrange encode/decode ([`field`],
//!   [`poly`], [`lagrange`]),
//! * the combinatorial batch placement and its feasibility conditions
//!   ([`placement`]),
//! * closed-form Map/Shuffle/total delay for three shuffle strategies —
//!   coded multicasting, one-shot cooperative zero-forcing, and superposition
//!   coding — under a CSI-accuracy parameter `alpha` ([`delay`]),
//! * constructive shuffle schedules, decodability audits, and an end-to-end
//!   functional simulation with Monte Carlo straggler sampling ([`sim`]),
//! * a JSON-configured CLI driver emitting plot-ready CSV ([`config`],
//!   [`driver`]).
//!
//! All delay values are exact rationals ([`rational::Ratio`]); floating point
//! appears only in Monte Carlo sampling and at serialization.

pub mod config;
pub mod delay;
pub mod driver;
pub mod field;
pub mod lagrange;
pub mod placement;
pub mod poly;
pub mod rational;
pub mod sim;

pub use config::{OutputFormat, RunConfig, SchemeSel};
pub use delay::{DelayBreakdown, Mode, Scheme};
pub use field::PrimeField;
pub use placement::SystemConfig;
pub use rational::{Delay, Ratio};

/// Errors across the encode/placement/delay/simulation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero in GF({p})")]
    DivisionByZero { p: u64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate interpolation nodes: {0}")]
    DegenerateNodes(String),
    #[error("insufficient intermediate values: have {have}, need {need}")]
    InsufficientIvs { have: usize, need: usize },
    #[error("infeasible batching: {0}")]
    InfeasibleBatching(String),
    #[error("infeasible shuffle: {0}")]
    InfeasibleShuffle(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("schedule construction failed: {0}")]
    Schedule(String),
    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("field GF({p}) too small: need more than {required} distinct nodes")]
    FieldTooSmall { p: u64, required: u64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 2 for configuration
    /// problems the caller can fix, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::InfeasibleConfig(_)
            | Error::InfeasibleBatching(_)
            | Error::InfeasibleShuffle(_)
            | Error::FieldTooSmall { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
