//! Exact covariate matching of retracted papers to never-retracted
//! controls, the two citation outcomes, and citation-tier stratification.
//!
//! A control must share publication year, venue, discipline, and
//! pre-retraction citations with its retracted paper, where *both*
//! pre-citation windows are `[pub_year, retraction_year]` of the retracted
//! paper — that shared anchor is what makes the counts comparable.
//! Because the pre terms are equal by construction, the
//! difference-in-differences (Post_r − Pre_r) − (Post_m − Pre_m) collapses
//! to Post_r − Post_m, which is Outcome 1.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::PaperRecord;

#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    #[error("publication year {pub_year} is after retraction year {retraction_year}")]
    YearOrderViolation { pub_year: i32, retraction_year: i32 },
    #[error("paper {0} has no retraction date")]
    MissingRetractionDate(String),
    #[error("paper id {0} not present in the corpus")]
    UnknownPaper(String),
}

/// Trim + casefold, the equality used for venue and discipline matching.
pub fn norm_label(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Citations from publication through the retraction year, both inclusive.
pub fn pre_retraction_citations(
    record: &PaperRecord,
    retraction_year: i32,
) -> Result<u64, MatchError> {
    if record.pub_year > retraction_year {
        return Err(MatchError::YearOrderViolation {
            pub_year: record.pub_year,
            retraction_year,
        });
    }
    Ok(record
        .citations_by_year
        .range(record.pub_year..=retraction_year)
        .map(|(_, &c)| c as u64)
        .sum())
}

/// Citations in the `horizon_years` years strictly after the retraction
/// year: `[retraction_year + 1, retraction_year + horizon_years]`.
pub fn post_retraction_citations(
    record: &PaperRecord,
    retraction_year: i32,
    horizon_years: i32,
) -> u64 {
    assert!(horizon_years >= 1, "horizon must cover at least one year");
    record
        .citations_by_year
        .range(retraction_year + 1..=retraction_year + horizon_years)
        .map(|(_, &c)| c as u64)
        .sum()
}

/// The exact-match covariates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MatchKey {
    pub pub_year: i32,
    pub venue: String,
    pub discipline: String,
    pub pre_citations: u64,
}

impl MatchKey {
    pub fn of(record: &PaperRecord, retraction_year: i32) -> Result<MatchKey, MatchError> {
        Ok(MatchKey {
            pub_year: record.pub_year,
            venue: norm_label(&record.venue),
            discipline: norm_label(&record.discipline),
            pre_citations: pre_retraction_citations(record, retraction_year)?,
        })
    }
}

/// A retracted paper with its exact-matched, never-retracted controls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedSet {
    pub retracted_id: String,
    pub control_ids: Vec<String>,
    pub retraction_year: i32,
}

/// Read-only lookup structures over one corpus.
pub struct CorpusIndex<'a> {
    corpus: &'a [PaperRecord],
    by_id: HashMap<&'a str, usize>,
    /// Never-retracted papers keyed by (pub_year, venue, discipline);
    /// pre-citation equality is checked per query because the window
    /// depends on the retracted paper's retraction year.
    controls_by_covariates: HashMap<(i32, String, String), Vec<usize>>,
}

impl<'a> CorpusIndex<'a> {
    pub fn build(corpus: &'a [PaperRecord]) -> CorpusIndex<'a> {
        let mut by_id = HashMap::with_capacity(corpus.len());
        let mut controls_by_covariates: HashMap<(i32, String, String), Vec<usize>> =
            HashMap::new();
        for (i, r) in corpus.iter().enumerate() {
            by_id.insert(r.paper_id.as_str(), i);
            if !r.is_retracted() {
                controls_by_covariates
                    .entry((r.pub_year, norm_label(&r.venue), norm_label(&r.discipline)))
                    .or_default()
                    .push(i);
            }
        }
        CorpusIndex {
            corpus,
            by_id,
            controls_by_covariates,
        }
    }

    pub fn get(&self, paper_id: &str) -> Result<&'a PaperRecord, MatchError> {
        self.by_id
            .get(paper_id)
            .map(|&i| &self.corpus[i])
            .ok_or_else(|| MatchError::UnknownPaper(paper_id.to_string()))
    }
}

/// All never-retracted papers sharing the retracted paper's MatchKey;
/// `None` when there are none (the paper then drops out of the analysis).
pub fn find_controls(
    retracted: &PaperRecord,
    index: &CorpusIndex,
) -> Result<Option<MatchedSet>, MatchError> {
    let retraction_year = retracted
        .retraction_date
        .ok_or_else(|| MatchError::MissingRetractionDate(retracted.paper_id.clone()))?
        .year;
    let pre_r = pre_retraction_citations(retracted, retraction_year)?;
    let key = (
        retracted.pub_year,
        norm_label(&retracted.venue),
        norm_label(&retracted.discipline),
    );
    let mut control_ids = Vec::new();
    if let Some(candidates) = index.controls_by_covariates.get(&key) {
        for &i in candidates {
            let candidate = &index.corpus[i];
            if pre_retraction_citations(candidate, retraction_year)? == pre_r {
                control_ids.push(candidate.paper_id.clone());
            }
        }
    }
    if control_ids.is_empty() {
        return Ok(None);
    }
    Ok(Some(MatchedSet {
        retracted_id: retracted.paper_id.clone(),
        control_ids,
        retraction_year,
    }))
}

fn eps_log_ratio(post_r: u64, post_m: u64, epsilon: f64) -> f64 {
    ((post_r as f64 + epsilon) / (post_m as f64 + epsilon)).ln()
}

/// Mean over controls of Post_r − Post_m (more negative = bigger penalty).
pub fn outcome1(
    matched: &MatchedSet,
    index: &CorpusIndex,
    horizon_years: i32,
) -> Result<f64, MatchError> {
    let retracted = index.get(&matched.retracted_id)?;
    let post_r = post_retraction_citations(retracted, matched.retraction_year, horizon_years);
    let mut sum = 0.0;
    for id in &matched.control_ids {
        let post_m = post_retraction_citations(index.get(id)?, matched.retraction_year, horizon_years);
        sum += post_r as f64 - post_m as f64;
    }
    Ok(sum / matched.control_ids.len() as f64)
}

/// Mean over controls of ln((Post_r + ε) / (Post_m + ε)); finite for all
/// non-negative counts, exactly 0 when every Post_m equals Post_r.
pub fn outcome2(
    matched: &MatchedSet,
    index: &CorpusIndex,
    horizon_years: i32,
    epsilon: f64,
) -> Result<f64, MatchError> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let retracted = index.get(&matched.retracted_id)?;
    let post_r = post_retraction_citations(retracted, matched.retraction_year, horizon_years);
    let mut sum = 0.0;
    for id in &matched.control_ids {
        let post_m = post_retraction_citations(index.get(id)?, matched.retraction_year, horizon_years);
        sum += eps_log_ratio(post_r, post_m, epsilon);
    }
    Ok(sum / matched.control_ids.len() as f64)
}

/// Half-open citation tiers `[0, b₀), [b₀, b₁), …, [b_last, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TierSpec {
    boundaries: Vec<u64>,
}

impl TierSpec {
    /// The published default tiers [0,1), [1,9), [9,31), [31,∞).
    pub fn canonical() -> TierSpec {
        TierSpec { boundaries: vec![1, 9, 31] }
    }

    /// Strictly ascending positive cut points.
    pub fn new(boundaries: Vec<u64>) -> Option<TierSpec> {
        if boundaries.is_empty()
            || boundaries[0] == 0
            || boundaries.windows(2).any(|w| w[0] >= w[1])
        {
            return None;
        }
        Some(TierSpec { boundaries })
    }

    /// Nearest-rank percentiles of the sample as cut points, deduplicated,
    /// zeros dropped (a zero cut would leave the first tier empty).
    pub fn from_percentiles(pre_values: &[u64], percentiles: &[f64]) -> Option<TierSpec> {
        if pre_values.is_empty() {
            return None;
        }
        let mut sorted = pre_values.to_vec();
        sorted.sort_unstable();
        let mut boundaries: Vec<u64> = percentiles
            .iter()
            .map(|&p| {
                let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
                sorted[rank.clamp(1, sorted.len()) - 1]
            })
            .filter(|&b| b > 0)
            .collect();
        boundaries.sort_unstable();
        boundaries.dedup();
        TierSpec::new(boundaries)
    }

    pub fn n_tiers(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn tier_of(&self, pre_citations: u64) -> usize {
        self.boundaries.iter().take_while(|&&b| b <= pre_citations).count()
    }

    pub fn label(&self, tier: usize) -> String {
        assert!(tier < self.n_tiers(), "tier {tier} out of range");
        let lower = if tier == 0 { 0 } else { self.boundaries[tier - 1] };
        match self.boundaries.get(tier) {
            Some(upper) => format!("[{lower},{upper})"),
            None => format!("[{lower},inf)"),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.n_tiers()).map(|t| self.label(t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingConfig {
    pub horizon_years: i32,
    pub epsilon: f64,
    pub tier_spec: TierSpec,
}

impl Default for MatchingConfig {
    fn default() -> Self {
        MatchingConfig {
            horizon_years: 5,
            epsilon: 1e-5,
            tier_spec: TierSpec::canonical(),
        }
    }
}

/// Per-retracted-paper analysis output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub retracted_id: String,
    pub tier: usize,
    pub tier_label: String,
    pub pre_citations: u64,
    pub outcome1: f64,
    pub outcome2: f64,
    pub n_controls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeReport {
    pub rows: Vec<OutcomeRow>,
    pub matched_sets: Vec<MatchedSet>,
    /// Retracted papers with no exact match, excluded from analysis.
    pub unmatched: Vec<String>,
}

/// Match every retracted paper in the corpus and compute both outcomes.
/// Row order follows corpus order of the retracted papers.
pub fn compute_outcomes(
    corpus: &[PaperRecord],
    config: &MatchingConfig,
) -> Result<OutcomeReport, MatchError> {
    let index = CorpusIndex::build(corpus);
    let retracted: Vec<&PaperRecord> = corpus.iter().filter(|r| r.is_retracted()).collect();
    let per_paper: Vec<(String, Option<(MatchedSet, OutcomeRow)>)> = retracted
        .par_iter()
        .map(|paper| {
            let Some(set) = find_controls(paper, &index)? else {
                return Ok((paper.paper_id.clone(), None));
            };
            let pre = pre_retraction_citations(paper, set.retraction_year)?;
            let tier = config.tier_spec.tier_of(pre);
            let row = OutcomeRow {
                retracted_id: paper.paper_id.clone(),
                tier,
                tier_label: config.tier_spec.label(tier),
                pre_citations: pre,
                outcome1: outcome1(&set, &index, config.horizon_years)?,
                outcome2: outcome2(&set, &index, config.horizon_years, config.epsilon)?,
                n_controls: set.control_ids.len(),
            };
            Ok((paper.paper_id.clone(), Some((set, row))))
        })
        .collect::<Result<_, MatchError>>()?;

    let mut report = OutcomeReport {
        rows: Vec::new(),
        matched_sets: Vec::new(),
        unmatched: Vec::new(),
    };
    for (id, matched) in per_paper {
        match matched {
            Some((set, row)) => {
                report.matched_sets.push(set);
                report.rows.push(row);
            }
            None => report.unmatched.push(id),
        }
    }
    Ok(report)
}

/// Group rows into tiers by pre-citations; result has exactly
/// `spec.n_tiers()` buckets, some possibly empty.
pub fn stratify<'a>(rows: &'a [OutcomeRow], spec: &TierSpec) -> Vec<Vec<&'a OutcomeRow>> {
    let mut tiers: Vec<Vec<&OutcomeRow>> = vec![Vec::new(); spec.n_tiers()];
    for row in rows {
        tiers[spec.tier_of(row.pre_citations)].push(row);
    }
    tiers
}

/// Midpoint-averaged median; `None` on empty input.
fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TierSummary {
    pub tier_label: String,
    pub n: usize,
    pub outcome1_mean: Option<f64>,
    pub outcome2_median: Option<f64>,
    pub outcome2_mean: Option<f64>,
    pub outcome2_max: Option<f64>,
}

/// Outcome 1 is summarized by its mean, Outcome 2 by median (the headline
/// number) plus mean and max; empty tiers report n = 0 and null summaries.
pub fn summarize_tiers(stratified: &[Vec<&OutcomeRow>], spec: &TierSpec) -> Vec<TierSummary> {
    stratified
        .iter()
        .enumerate()
        .map(|(t, rows)| {
            let n = rows.len();
            let mut o2: Vec<f64> = rows.iter().map(|r| r.outcome2).collect();
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
            TierSummary {
                tier_label: spec.label(t),
                n,
                outcome1_mean: (n > 0)
                    .then(|| mean(&rows.iter().map(|r| r.outcome1).collect::<Vec<_>>())),
                outcome2_median: median(&mut o2),
                outcome2_mean: (n > 0).then(|| mean(&o2)),
                outcome2_max: o2.last().copied(),
            }
        })
        .collect()
}

pub fn write_matched_sets_csv<W: Write>(out: W, sets: &[MatchedSet]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["retracted_id", "control_id"])?;
    for set in sets {
        for control in &set.control_ids {
            w.write_record([set.retracted_id.as_str(), control.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_outcomes_csv<W: Write>(out: W, rows: &[OutcomeRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["retracted_id", "tier", "outcome1", "outcome2", "n_controls"])?;
    for r in rows {
        w.write_record([
            r.retracted_id.clone(),
            r.tier_label.clone(),
            r.outcome1.to_string(),
            r.outcome2.to_string(),
            r.n_controls.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A reloaded outcomes row (tier carried as its label).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeCsvRow {
    pub retracted_id: String,
    pub tier_label: String,
    pub outcome1: f64,
    pub outcome2: f64,
    pub n_controls: usize,
}

pub fn read_outcomes_csv<R: std::io::Read>(input: R) -> Result<Vec<OutcomeCsvRow>, String> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let expected = ["retracted_id", "tier", "outcome1", "outcome2", "n_controls"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(format!("unexpected outcomes header {headers:?}"));
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let field = |k: usize| record.get(k).unwrap_or("").trim();
        rows.push(OutcomeCsvRow {
            retracted_id: field(0).to_string(),
            tier_label: field(1).to_string(),
            outcome1: field(2)
                .parse()
                .map_err(|e| format!("row {}: bad outcome1: {e}", i + 1))?,
            outcome2: field(3)
                .parse()
                .map_err(|e| format!("row {}: bad outcome2: {e}", i + 1))?,
            n_controls: field(4)
                .parse()
                .map_err(|e| format!("row {}: bad n_controls: {e}", i + 1))?,
        });
    }
    Ok(rows)
}

pub fn write_tier_summary_csv<W: Write>(out: W, summaries: &[TierSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "tier",
        "n",
        "outcome1_mean",
        "outcome2_median",
        "outcome2_mean",
        "outcome2_max",
    ])?;
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in summaries {
        w.write_record([
            s.tier_label.clone(),
            s.n.to_string(),
            cell(s.outcome1_mean),
            cell(s.outcome2_median),
            cell(s.outcome2_mean),
            cell(s.outcome2_max),
        ])?;
    }
    w.flush()?;
    Ok(())
}
