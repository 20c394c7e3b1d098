//! Seeded synthetic corpus with known injected effects, used as the oracle
//! for end-to-end pipeline validation.
//!
//! Layout: one cell per retracted paper. A cell shares (pub_year, venue,
//! discipline, pre-citation profile) between the retracted paper and its
//! controls, with a venue unique to the cell so cells never cross-match.
//! Post-retraction citations are Poisson with rate
//! `BASE_POST_RATE + POST_RATE_PER_PRE * pre`, multiplied for the
//! retracted paper by its tier's penalty; expected Outcome 2 per cell is
//! therefore ≈ log(penalty). Mention counts for retracted papers are
//! `round(max(0, Normal(MENTION_INTERCEPT + attention_beta * pre,
//! MENTION_NOISE_SD)))`, all inside the 12-month retraction window, plus
//! two out-of-window noise events per paper.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::{IngestError, MentionEvent, PaperRecord, YearMonth};

pub const BASE_POST_RATE: f64 = 5.0;
pub const POST_RATE_PER_PRE: f64 = 1.0;
pub const POST_HORIZON_YEARS: i32 = 5;
pub const MENTION_INTERCEPT: f64 = 20.0;
pub const MENTION_NOISE_SD: f64 = 5.0;
pub const MENTION_WEIGHT_MEAN: f64 = 3.0;

/// Pre-citation draw ranges per tier, aligned with the canonical tier
/// boundaries [0,1), [1,9), [9,31), [31,∞).
const TIER_PRE_RANGES: [(u32, u32); 4] = [(0, 0), (1, 8), (9, 30), (31, 99)];

const DISCIPLINES: [&str; 6] = ["biology", "chemistry", "physics", "medicine", "cs", "math"];
const REASONS: [&str; 3] = ["error", "fraud", "plagiarism"];
const SUBJECTS: [&str; 4] = ["life", "physical", "formal", "applied"];
const SOURCES: [&str; 5] = ["news", "blog", "social", "repository", "other"];
const OUT_OF_WINDOW_OFFSETS: [i64; 7] = [-9, -8, -7, 6, 7, 8, 9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_retracted: usize,
    pub n_controls_per_cell: usize,
    /// Post-retraction rate multipliers, indexed by citation tier.
    pub tier_penalties: [f64; 4],
    /// True slope of pre-retraction citations on mention count.
    pub attention_beta: f64,
    pub rng_seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.n_retracted == 0 {
            return Err(IngestError::InvalidConfig("n_retracted must be positive".into()));
        }
        if self.n_controls_per_cell == 0 {
            return Err(IngestError::InvalidConfig(
                "n_controls_per_cell must be positive".into(),
            ));
        }
        for (i, &p) in self.tier_penalties.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(IngestError::InvalidConfig(format!(
                    "tier_penalties[{i}] = {p} outside [0, 1]"
                )));
            }
        }
        if !self.attention_beta.is_finite() {
            return Err(IngestError::InvalidConfig("attention_beta must be finite".into()));
        }
        Ok(())
    }
}

/// Injected ground truth for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTruth {
    pub retracted_id: String,
    pub tier: usize,
    pub pre_citations: u32,
    pub penalty: f64,
    /// Expected 5-year post-citation total for each control.
    pub lambda_control: f64,
}

/// Everything injected into the corpus, for oracle comparisons downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthManifest {
    pub tier_penalties: [f64; 4],
    pub attention_beta: f64,
    pub base_post_rate: f64,
    pub post_rate_per_pre: f64,
    pub post_horizon_years: i32,
    pub mention_intercept: f64,
    pub mention_noise_sd: f64,
    pub mention_weight_mean: f64,
    pub cells: Vec<CellTruth>,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub corpus: Vec<PaperRecord>,
    pub mentions: Vec<MentionEvent>,
    pub truth: TruthManifest,
}

fn poisson_total(lambda: f64, n_draws: i32, rng: &mut ChaCha8Rng) -> Vec<u32> {
    if lambda <= 0.0 {
        return vec![0; n_draws as usize];
    }
    let per_year = Poisson::new(lambda / n_draws as f64).expect("positive rate");
    (0..n_draws).map(|_| per_year.sample(rng) as u32).collect()
}

/// Split `pre` citations over [pub_year, retraction_year]: front-loaded
/// half at publication, remainder in the retraction year.
fn pre_citation_entries(pre: u32, pub_year: i32, retraction_year: i32) -> Vec<(i32, u32)> {
    let first = pre.div_ceil(2);
    let rest = pre - first;
    let mut entries = Vec::new();
    if first > 0 {
        entries.push((pub_year, first));
    }
    if rest > 0 {
        entries.push((retraction_year, rest));
    }
    entries
}

#[allow(clippy::too_many_arguments)] // private record assembler, called from two sites
fn make_paper(
    id: String,
    doi: String,
    title: String,
    pub_year: i32,
    venue: &str,
    discipline: &str,
    retraction: Option<(YearMonth, &str)>,
    pre_entries: &[(i32, u32)],
    post_counts: &[u32],
    post_start: i32,
    rng: &mut ChaCha8Rng,
) -> PaperRecord {
    let mut citations_by_year = std::collections::BTreeMap::new();
    for &(year, count) in pre_entries {
        citations_by_year.insert(year, count);
    }
    for (k, &count) in post_counts.iter().enumerate() {
        if count > 0 {
            citations_by_year.insert(post_start + k as i32, count);
        }
    }
    PaperRecord {
        paper_id: id,
        doi: Some(doi),
        title,
        pub_year,
        venue: venue.to_string(),
        discipline: discipline.to_string(),
        retraction_date: retraction.map(|(d, _)| d),
        retraction_reason: retraction.map(|(_, r)| r.to_string()),
        n_authors: Some(rng.gen_range(1..=15)),
        journal_rank: Some(rng.gen::<f64>()),
        subject_area: Some(SUBJECTS[rng.gen_range(0..SUBJECTS.len())].to_string()),
        citations_by_year,
    }
}

/// Generate the corpus, mention stream, and truth manifest. Bit-identical
/// output for identical config.
pub fn gen_synthetic(config: &SynthConfig) -> Result<SynthOutput, IngestError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mention_count_noise =
        Normal::new(0.0, MENTION_NOISE_SD).expect("valid normal parameters");
    let weight_dist = Exp::new(1.0 / MENTION_WEIGHT_MEAN).expect("positive rate");

    let mut corpus = Vec::with_capacity(config.n_retracted * (1 + config.n_controls_per_cell));
    let mut mentions = Vec::new();
    let mut cells = Vec::with_capacity(config.n_retracted);

    for i in 0..config.n_retracted {
        let tier = i % 4;
        let (lo, hi) = TIER_PRE_RANGES[tier];
        let pre = rng.gen_range(lo..=hi);
        let pub_year = 2000 + rng.gen_range(0..10);
        let retraction_year = pub_year + rng.gen_range(2..=6);
        let retraction = YearMonth::new(retraction_year, rng.gen_range(1..=12)).unwrap();
        let venue = format!("venue-{i:05}");
        let discipline = DISCIPLINES[rng.gen_range(0..DISCIPLINES.len())];
        let reason = REASONS[rng.gen_range(0..REASONS.len())];
        let pre_entries = pre_citation_entries(pre, pub_year, retraction_year);
        let lambda_control = BASE_POST_RATE + POST_RATE_PER_PRE * pre as f64;
        let lambda_retracted = lambda_control * config.tier_penalties[tier];
        let post_start = retraction_year + 1;

        let retracted_id = format!("R{i:05}");
        let post_r = poisson_total(lambda_retracted, POST_HORIZON_YEARS, &mut rng);
        corpus.push(make_paper(
            retracted_id.clone(),
            format!("10.5555/r{i:05}"),
            format!("Observations {i:05} on {discipline} series {pre}"),
            pub_year,
            &venue,
            discipline,
            Some((retraction, reason)),
            &pre_entries,
            &post_r,
            post_start,
            &mut rng,
        ));

        for j in 0..config.n_controls_per_cell {
            let post_m = poisson_total(lambda_control, POST_HORIZON_YEARS, &mut rng);
            corpus.push(make_paper(
                format!("C{i:05}-{j}"),
                format!("10.5555/c{i:05}-{j}"),
                format!("Observations {i:05} on {discipline} series {pre} variant {j}"),
                pub_year,
                &venue,
                discipline,
                None,
                &pre_entries,
                &post_m,
                post_start,
                &mut rng,
            ));
        }

        let expected = MENTION_INTERCEPT + config.attention_beta * pre as f64;
        let n_mentions =
            (expected + mention_count_noise.sample(&mut rng)).max(0.0).round() as usize;
        for _ in 0..n_mentions {
            let offset = rng.gen_range(-6..=5);
            mentions.push(MentionEvent {
                paper_id: retracted_id.clone(),
                timestamp: retraction.plus_months(offset),
                source_type: SOURCES[rng.gen_range(0..SOURCES.len())].to_string(),
                weight: weight_dist.sample(&mut rng),
            });
        }
        for _ in 0..2 {
            let offset = *OUT_OF_WINDOW_OFFSETS.choose(&mut rng).unwrap();
            mentions.push(MentionEvent {
                paper_id: retracted_id.clone(),
                timestamp: retraction.plus_months(offset),
                source_type: SOURCES[rng.gen_range(0..SOURCES.len())].to_string(),
                weight: weight_dist.sample(&mut rng),
            });
        }

        cells.push(CellTruth {
            retracted_id,
            tier,
            pre_citations: pre,
            penalty: config.tier_penalties[tier],
            lambda_control,
        });
    }

    Ok(SynthOutput {
        corpus,
        mentions,
        truth: TruthManifest {
            tier_penalties: config.tier_penalties,
            attention_beta: config.attention_beta,
            base_post_rate: BASE_POST_RATE,
            post_rate_per_pre: POST_RATE_PER_PRE,
            post_horizon_years: POST_HORIZON_YEARS,
            mention_intercept: MENTION_INTERCEPT,
            mention_noise_sd: MENTION_NOISE_SD,
            mention_weight_mean: MENTION_WEIGHT_MEAN,
            cells,
        },
    })
}
