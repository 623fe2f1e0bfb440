//! Measurement of gendered-pronoun bias in black-box translation engines.
//!
//! Gender-neutral source sentences ("ő egy orvos") are generated for every
//! occupation in a registry, translated, and the pronoun chosen by the
//! engine is compared against an optimal deterministic translator built
//! from one of three reference points: source-country employment shares,
//! target-country employment shares, or perception-survey scores.
//!
//! The bias score of a translation is `(E_t - E_o) / E_o`, where `E_t` are
//! the error points of the engine's pronoun (the percentage of workers it
//! does not represent) and `E_o` the error points of the majority pronoun.

mod csvio;
pub mod error;

pub mod aggregation;
pub mod gendering;
pub mod lexicon;
pub mod scoring;
pub mod sentences;
pub mod survey;
pub mod translation;

pub use error::{Error, Result};
