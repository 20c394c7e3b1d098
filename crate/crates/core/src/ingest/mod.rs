//! Corpus and mention-stream loading, validation, filtering, and the
//! seeded synthetic-corpus generator used to validate the pipeline
//! end to end.

mod filters;
mod io;
mod synth;

pub use filters::{filter_bulk_retractions, filter_retraction_window};
pub use io::{
    load_corpus, load_mentions, write_corpus_csv, write_corpus_jsonl, write_mentions_csv,
    write_mentions_jsonl, CorpusLoad, Format, MentionLoad,
};
pub use synth::{gen_synthetic, CellTruth, SynthConfig, SynthOutput, TruthManifest};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad file format: {0}")]
    Format(String),
    #[error("invalid synthetic-corpus config: {0}")]
    InvalidConfig(String),
}

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Option<Self> {
        (1..=12).contains(&month).then_some(YearMonth { year, month })
    }

    /// Months since year 0, for offset arithmetic across year boundaries.
    pub fn month_index(&self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_month_index(index: i64) -> Self {
        YearMonth {
            year: index.div_euclid(12) as i32,
            month: (index.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn plus_months(&self, offset: i64) -> Self {
        Self::from_month_index(self.month_index() + offset)
    }
}

/// One bibliographic record. Optional fields are genuinely absent in real
/// corpora; the regression stage does its own complete-case filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub doi: Option<String>,
    pub title: String,
    pub pub_year: i32,
    pub venue: String,
    pub discipline: String,
    pub retraction_date: Option<YearMonth>,
    pub retraction_reason: Option<String>,
    pub n_authors: Option<u32>,
    pub journal_rank: Option<f64>,
    pub subject_area: Option<String>,
    /// Yearly citation counts; no key may precede pub_year.
    pub citations_by_year: BTreeMap<i32, u32>,
}

impl PaperRecord {
    /// Field-level invariant check; returns the offending field and reason.
    pub fn check_invariants(&self) -> Result<(), (String, String)> {
        if let Some(rd) = &self.retraction_date {
            if rd.year < self.pub_year {
                return Err((
                    "retraction_year".into(),
                    format!(
                        "retraction year {} precedes publication year {}",
                        rd.year, self.pub_year
                    ),
                ));
            }
        }
        if let Some((&year, _)) = self.citations_by_year.iter().next() {
            if year < self.pub_year {
                return Err((
                    "citations_by_year".into(),
                    format!("citation year {year} precedes publication year {}", self.pub_year),
                ));
            }
        }
        if let Some(0) = self.n_authors {
            return Err(("n_authors".into(), "must be positive when present".into()));
        }
        Ok(())
    }

    pub fn is_retracted(&self) -> bool {
        self.retraction_date.is_some()
    }
}

/// Recognized mention source labels.
pub const SOURCE_TYPES: [&str; 5] = ["news", "blog", "social", "repository", "other"];

/// One online mention of a paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MentionEvent {
    pub paper_id: String,
    pub timestamp: YearMonth,
    pub source_type: String,
    pub weight: f64,
}

impl MentionEvent {
    pub fn check_invariants(&self) -> Result<(), (String, String)> {
        if self.weight < 0.0 || !self.weight.is_finite() {
            return Err(("weight".into(), format!("must be non-negative, got {}", self.weight)));
        }
        if !SOURCE_TYPES.contains(&self.source_type.as_str()) {
            return Err((
                "source_type".into(),
                format!("unknown label {:?}", self.source_type),
            ));
        }
        Ok(())
    }
}

/// A malformed input row: kept out of the loaded set but reported, never
/// silently dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaViolation {
    /// 1-based data row number (header excluded).
    pub row: usize,
    pub field: String,
    pub reason: String,
}
