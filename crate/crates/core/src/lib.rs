//! Belief-spread simulation and matched-control citation analysis for
//! studying how scientific retractions propagate.
//!
//! The crate has two halves:
//!
//! * [`sim`] — a discrete-time agent-based model of how a false claim and
//!   its later correction travel over a contact network, with seeded
//!   Monte Carlo sweeps over the retraction delay.
//! * the analysis pipeline — [`ingest`] loads, filters, and synthesizes
//!   bibliographic corpora, [`linkage`] merges record sets by DOI and fuzzy
//!   title matching, [`matching`] pairs retracted papers with exactly
//!   matched controls and computes citation outcomes, [`stats`] supplies
//!   the hypothesis tests and least-squares regression, and [`attention`]
//!   aggregates mention streams around the retraction date.
//!
//! Everything that consumes randomness takes an explicit seed and is
//! bit-identical across runs and thread counts for the same inputs.

pub mod attention;
pub mod ingest;
pub mod linkage;
pub mod matching;
pub mod sim;
pub mod stats;
