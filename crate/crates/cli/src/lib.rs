//! Staged command-line pipeline around `mtaudit-core`: validate inputs,
//! generate sentences, translate, classify pronouns, score, aggregate and
//! report. Every stage writes its artifacts atomically and appends a
//! provenance line to `manifest.jsonl`.

pub mod config;
pub mod error;
pub mod manifest;
pub mod pipeline;
pub mod report;

pub use config::{AuditConfig, Overrides};
pub use error::{CliError, Result};
pub use pipeline::{run_stage, Stage};
