//! Mention-stream analysis around the retraction date: fixed 12-month
//! windows per paper, monthly series for the figure, per-tier summaries,
//! and the regression dataset builder.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{MentionEvent, PaperRecord};
use crate::matching::{pre_retraction_citations, MatchError, TierSpec};
use crate::stats::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum AttentionError {
    #[error("paper {0} has no retraction date")]
    MissingRetractionDate(String),
    #[error("no rows remain after complete-case filtering")]
    EmptyAfterFiltering,
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowMode {
    /// Offsets −6..=+5: twelve months with the retraction month inside at
    /// offset 0. The canonical analysis window.
    CenteredIncludingRetraction,
    /// Offsets −6..=+6 without 0: the figure's display convention, which
    /// drops the retraction month itself.
    SymmetricExcludingRetraction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    /// Total window width in months; must be even and positive.
    pub months: u32,
    pub mode: WindowMode,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            months: 12,
            mode: WindowMode::CenteredIncludingRetraction,
        }
    }
}

impl WindowConfig {
    pub fn contains(&self, offset: i64) -> bool {
        assert!(self.months >= 2 && self.months.is_multiple_of(2), "window width must be even");
        let half = (self.months / 2) as i64;
        match self.mode {
            WindowMode::CenteredIncludingRetraction => (-half..half).contains(&offset),
            WindowMode::SymmetricExcludingRetraction => {
                offset != 0 && (-half..=half).contains(&offset)
            }
        }
    }
}

/// Control covariates carried alongside each paper's window totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Controls {
    pub pub_year: i32,
    pub years_to_retraction: i32,
    pub journal_rank: Option<f64>,
    pub reason: Option<String>,
    pub n_authors: Option<u32>,
    pub subject_area: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttentionRow {
    pub paper_id: String,
    /// Σ weights of in-window mentions.
    pub window_score: f64,
    /// Count of in-window mentions.
    pub window_mentions: usize,
    pub pre_citations: u64,
    pub controls: Controls,
}

fn offset_of(event: &MentionEvent, retraction: crate::ingest::YearMonth) -> i64 {
    event.timestamp.month_index() - retraction.month_index()
}

fn row_from_own_mentions(
    paper: &PaperRecord,
    own_mentions: &[&MentionEvent],
    config: &WindowConfig,
) -> Result<AttentionRow, AttentionError> {
    let retraction = paper
        .retraction_date
        .ok_or_else(|| AttentionError::MissingRetractionDate(paper.paper_id.clone()))?;
    let mut window_score = 0.0;
    let mut window_mentions = 0;
    for event in own_mentions {
        if config.contains(offset_of(event, retraction)) {
            window_score += event.weight;
            window_mentions += 1;
        }
    }
    Ok(AttentionRow {
        paper_id: paper.paper_id.clone(),
        window_score,
        window_mentions,
        pre_citations: pre_retraction_citations(paper, retraction.year)?,
        controls: Controls {
            pub_year: paper.pub_year,
            years_to_retraction: retraction.year - paper.pub_year,
            journal_rank: paper.journal_rank,
            reason: paper.retraction_reason.clone(),
            n_authors: paper.n_authors,
            subject_area: paper.subject_area.clone(),
        },
    })
}

/// Window totals for one paper; `mentions` may cover the whole corpus —
/// events for other papers are ignored.
pub fn window_attention(
    paper: &PaperRecord,
    mentions: &[MentionEvent],
    config: &WindowConfig,
) -> Result<AttentionRow, AttentionError> {
    let own: Vec<&MentionEvent> = mentions
        .iter()
        .filter(|m| m.paper_id == paper.paper_id)
        .collect();
    row_from_own_mentions(paper, &own, config)
}

fn group_by_paper(mentions: &[MentionEvent]) -> HashMap<&str, Vec<&MentionEvent>> {
    let mut grouped: HashMap<&str, Vec<&MentionEvent>> = HashMap::new();
    for m in mentions {
        grouped.entry(m.paper_id.as_str()).or_default().push(m);
    }
    grouped
}

/// One row per retracted paper, in corpus order.
pub fn build_attention_rows(
    corpus: &[PaperRecord],
    mentions: &[MentionEvent],
    config: &WindowConfig,
) -> Result<Vec<AttentionRow>, AttentionError> {
    let grouped = group_by_paper(mentions);
    let empty: Vec<&MentionEvent> = Vec::new();
    corpus
        .par_iter()
        .filter(|p| p.is_retracted())
        .map(|p| {
            let own = grouped.get(p.paper_id.as_str()).unwrap_or(&empty);
            row_from_own_mentions(p, own, config)
        })
        .collect()
}

pub const SERIES_OFFSETS: std::ops::RangeInclusive<i64> = -6..=6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthlyPoint {
    pub offset: i64,
    pub raw_score: f64,
    /// log(1 + raw_score), non-negative by construction.
    pub log_score: f64,
}

/// Per-month scores at offsets −6..=+6 with offset 0 omitted from
/// `points` (the figure's convention) but kept in `month0_raw` so window
/// totals remain reconstructible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthlySeries {
    pub paper_id: String,
    pub points: Vec<MonthlyPoint>,
    pub month0_raw: f64,
}

pub fn monthly_series(
    paper: &PaperRecord,
    mentions: &[MentionEvent],
) -> Result<MonthlySeries, AttentionError> {
    let retraction = paper
        .retraction_date
        .ok_or_else(|| AttentionError::MissingRetractionDate(paper.paper_id.clone()))?;
    let mut raw: HashMap<i64, f64> = HashMap::new();
    for m in mentions.iter().filter(|m| m.paper_id == paper.paper_id) {
        let offset = offset_of(m, retraction);
        if SERIES_OFFSETS.contains(&offset) {
            *raw.entry(offset).or_insert(0.0) += m.weight;
        }
    }
    let points = SERIES_OFFSETS
        .filter(|&o| o != 0)
        .map(|offset| {
            let raw_score = raw.get(&offset).copied().unwrap_or(0.0);
            MonthlyPoint {
                offset,
                raw_score,
                log_score: raw_score.ln_1p(),
            }
        })
        .collect();
    Ok(MonthlySeries {
        paper_id: paper.paper_id.clone(),
        points,
        month0_raw: raw.get(&0).copied().unwrap_or(0.0),
    })
}

/// Series for every retracted paper, in corpus order.
pub fn build_monthly_series(
    corpus: &[PaperRecord],
    mentions: &[MentionEvent],
) -> Result<Vec<MonthlySeries>, AttentionError> {
    corpus
        .iter()
        .filter(|p| p.is_retracted())
        .map(|p| monthly_series(p, mentions))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttentionTierSummary {
    pub tier_label: String,
    pub n: usize,
    pub mean_score: Option<f64>,
    pub mean_mentions: Option<f64>,
}

pub fn tier_attention_summary(
    rows: &[AttentionRow],
    spec: &TierSpec,
) -> Vec<AttentionTierSummary> {
    let mut buckets: Vec<Vec<&AttentionRow>> = vec![Vec::new(); spec.n_tiers()];
    for row in rows {
        buckets[spec.tier_of(row.pre_citations)].push(row);
    }
    buckets
        .iter()
        .enumerate()
        .map(|(t, rows)| {
            let n = rows.len();
            AttentionTierSummary {
                tier_label: spec.label(t),
                n,
                mean_score: (n > 0)
                    .then(|| rows.iter().map(|r| r.window_score).sum::<f64>() / n as f64),
                mean_mentions: (n > 0)
                    .then(|| rows.iter().map(|r| r.window_mentions as f64).sum::<f64>() / n as f64),
            }
        })
        .collect()
}

/// Complete-case regression inputs: shared design matrix plus both
/// outcome vectors (window score and mention count).
#[derive(Debug, Clone)]
pub struct RegressionDataset {
    pub paper_ids: Vec<String>,
    pub y_score: Vec<f64>,
    pub y_mentions: Vec<f64>,
    pub design: Matrix,
    pub column_names: Vec<String>,
    pub dropped_count: usize,
}

/// Most frequent level, ties broken toward the lexicographically smaller
/// label, so the omitted reference is deterministic.
fn reference_level<'a>(levels: impl Iterator<Item = &'a str>) -> Option<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for level in levels {
        *counts.entry(level).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(level, _)| level.to_string())
}

/// Dummy columns for every non-reference level, lexicographically ordered.
fn dummy_levels(values: &[&str], reference: &str) -> Vec<String> {
    let mut levels: Vec<String> = values
        .iter()
        .filter(|&&v| v != reference)
        .map(|&v| v.to_string())
        .collect();
    levels.sort();
    levels.dedup();
    levels
}

/// Build the regression dataset: complete cases only, intercept first,
/// numeric controls passed through, categoricals one-hot with the most
/// frequent level omitted.
pub fn build_regression_dataset(
    rows: &[AttentionRow],
) -> Result<RegressionDataset, AttentionError> {
    let complete: Vec<&AttentionRow> = rows
        .iter()
        .filter(|r| {
            r.controls.journal_rank.is_some()
                && r.controls.reason.is_some()
                && r.controls.n_authors.is_some()
                && r.controls.subject_area.is_some()
        })
        .collect();
    let dropped_count = rows.len() - complete.len();
    if complete.is_empty() {
        return Err(AttentionError::EmptyAfterFiltering);
    }

    let reasons: Vec<&str> = complete
        .iter()
        .map(|r| r.controls.reason.as_deref().unwrap())
        .collect();
    let subjects: Vec<&str> = complete
        .iter()
        .map(|r| r.controls.subject_area.as_deref().unwrap())
        .collect();
    let reason_ref = reference_level(reasons.iter().copied()).unwrap();
    let subject_ref = reference_level(subjects.iter().copied()).unwrap();
    let reason_dummies = dummy_levels(&reasons, &reason_ref);
    let subject_dummies = dummy_levels(&subjects, &subject_ref);

    let mut column_names = vec![
        "intercept".to_string(),
        "pre_citations".to_string(),
        "pub_year".to_string(),
        "years_to_retraction".to_string(),
        "journal_rank".to_string(),
        "n_authors".to_string(),
    ];
    column_names.extend(reason_dummies.iter().map(|l| format!("reason={l}")));
    column_names.extend(subject_dummies.iter().map(|l| format!("subject_area={l}")));

    let k = column_names.len();
    let mut design = Matrix::zeros(complete.len(), k);
    for (i, row) in complete.iter().enumerate() {
        let c = &row.controls;
        design.set(i, 0, 1.0);
        design.set(i, 1, row.pre_citations as f64);
        design.set(i, 2, c.pub_year as f64);
        design.set(i, 3, c.years_to_retraction as f64);
        design.set(i, 4, c.journal_rank.unwrap());
        design.set(i, 5, c.n_authors.unwrap() as f64);
        let mut col = 6;
        for level in &reason_dummies {
            design.set(i, col, f64::from(reasons[i] == level));
            col += 1;
        }
        for level in &subject_dummies {
            design.set(i, col, f64::from(subjects[i] == level));
            col += 1;
        }
    }

    Ok(RegressionDataset {
        paper_ids: complete.iter().map(|r| r.paper_id.clone()).collect(),
        y_score: complete.iter().map(|r| r.window_score).collect(),
        y_mentions: complete.iter().map(|r| r.window_mentions as f64).collect(),
        design,
        column_names,
        dropped_count,
    })
}

pub fn write_attention_rows_csv<W: Write>(out: W, rows: &[AttentionRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "paper_id",
        "window_score",
        "window_mentions",
        "pre_citations",
        "pub_year",
        "years_to_retraction",
        "journal_rank",
        "reason",
        "n_authors",
        "subject_area",
    ])?;
    for r in rows {
        let c = &r.controls;
        w.write_record([
            r.paper_id.clone(),
            r.window_score.to_string(),
            r.window_mentions.to_string(),
            r.pre_citations.to_string(),
            c.pub_year.to_string(),
            c.years_to_retraction.to_string(),
            c.journal_rank.map(|v| v.to_string()).unwrap_or_default(),
            c.reason.clone().unwrap_or_default(),
            c.n_authors.map(|v| v.to_string()).unwrap_or_default(),
            c.subject_area.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_monthly_series_csv<W: Write>(out: W, series: &[MonthlySeries]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["paper_id", "offset", "log_score"])?;
    for s in series {
        for p in &s.points {
            w.write_record([
                s.paper_id.clone(),
                p.offset.to_string(),
                p.log_score.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_attention_tier_summary_csv<W: Write>(
    out: W,
    summaries: &[AttentionTierSummary],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tier", "n", "mean_score", "mean_mentions"])?;
    for s in summaries {
        w.write_record([
            s.tier_label.clone(),
            s.n.to_string(),
            s.mean_score.map(|v| v.to_string()).unwrap_or_default(),
            s.mean_mentions.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
