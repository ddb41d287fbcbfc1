//! Exact spectral classification for one-dimensional primitive substitution
//! rules: balanced-pair coincidence analysis, discrepancy growth rates,
//! orbit separation dimension, and window boundary estimates.

pub mod algebraic;
mod cli;
pub mod corpus;
pub mod error;
pub mod oracle;
pub mod osd;
pub mod pairs;
pub mod parse;
pub mod report;
pub mod rule;
pub mod spectral;

pub use error::{AlgebraicError, OracleError, OsdError, PairError, ParseError, RuleError};

/// CLI entry point; returns the process exit code.
pub use cli::run_cli;
