//! Rank-based tests: Kruskal-Wallis with midranks and tie correction, and
//! Dunn's pairwise post-hoc comparisons with Holm adjustment.

use serde::Serialize;

use super::special;
use super::{holm_adjust, DegreesOfFreedom, StatsError, TestResult};

/// Midranks of the pooled values plus the tie statistic sum(t^3 - t).
///
/// Tied observations all receive the mean of the ranks they span.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share the average 1-based rank.
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    (ranks, tie_term)
}

fn validated_groups<S: AsRef<[f64]>>(groups: &[S]) -> Result<Vec<&[f64]>, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups {
            needed: 2,
            got: groups.len(),
        });
    }
    let mut out = Vec::with_capacity(groups.len());
    for (i, g) in groups.iter().enumerate() {
        let g = g.as_ref();
        if g.is_empty() {
            return Err(StatsError::DegenerateGroup {
                group: i,
                reason: "empty group",
            });
        }
        super::check_finite(g)?;
        out.push(g);
    }
    Ok(out)
}

/// Kruskal-Wallis rank test across k groups, chi-squared approximation with
/// k - 1 degrees of freedom and the standard tie correction.
///
/// When every pooled observation is identical the statistic is undefined;
/// the result is reported as statistic 0, p 1 with `degenerate` set.
pub fn kruskal_wallis<S: AsRef<[f64]>>(groups: &[S]) -> Result<TestResult, StatsError> {
    let groups = validated_groups(groups)?;
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = pooled.len() as f64;
    if pooled.len() < 3 {
        return Err(StatsError::DegenerateGroup {
            group: 0,
            reason: "fewer than 3 pooled observations",
        });
    }
    let (ranks, tie_term) = midranks(&pooled);
    let df = groups.len() as f64 - 1.0;
    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= 0.0 {
        // Every observation tied with every other.
        return Ok(TestResult {
            method: "kruskal-wallis",
            statistic: 0.0,
            df: DegreesOfFreedom::One(df),
            p_value: 1.0,
            degenerate: true,
        });
    }
    let mut h = 0.0;
    let mut offset = 0;
    for g in &groups {
        let ni = g.len() as f64;
        let mean_rank = ranks[offset..offset + g.len()].iter().sum::<f64>() / ni;
        let dev = mean_rank - (n + 1.0) / 2.0;
        h += ni * dev * dev;
        offset += g.len();
    }
    h *= 12.0 / (n * (n + 1.0));
    h /= correction;
    Ok(TestResult {
        method: "kruskal-wallis",
        statistic: h,
        df: DegreesOfFreedom::One(df),
        p_value: special::chi2_upper_tail_p(h, df),
        degenerate: false,
    })
}

/// One pairwise comparison from a post-hoc table.
#[derive(Debug, Clone, Serialize)]
pub struct PairwiseComparison {
    pub group_a: usize,
    pub group_b: usize,
    pub statistic: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
}

/// All k(k-1)/2 pairwise comparisons, ordered by (group_a, group_b).
#[derive(Debug, Clone, Serialize)]
pub struct PairwiseTable {
    pub comparisons: Vec<PairwiseComparison>,
}

/// Dunn's post-hoc z tests on the pooled midranks, tie-corrected, with
/// two-sided normal p-values and Holm-adjusted significance.
///
/// With all groups identical every z is 0 and every adjusted p is 1.
pub fn dunn_posthoc<S: AsRef<[f64]>>(groups: &[S]) -> Result<PairwiseTable, StatsError> {
    let groups = validated_groups(groups)?;
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = pooled.len() as f64;
    let (ranks, tie_term) = midranks(&pooled);
    let mut mean_ranks = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for g in &groups {
        let ni = g.len() as f64;
        mean_ranks.push(ranks[offset..offset + g.len()].iter().sum::<f64>() / ni);
        offset += g.len();
    }
    // Pooled rank variance with tie correction; zero iff everything tied.
    let base_var = n * (n + 1.0) / 12.0 - tie_term / (12.0 * (n - 1.0));
    let mut comparisons = Vec::new();
    let mut raw = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let inv = 1.0 / groups[i].len() as f64 + 1.0 / groups[j].len() as f64;
            let var = base_var * inv;
            let z = if var > 0.0 {
                (mean_ranks[i] - mean_ranks[j]) / var.sqrt()
            } else {
                0.0
            };
            let p = special::normal_two_sided_p(z);
            raw.push(p);
            comparisons.push(PairwiseComparison {
                group_a: i,
                group_b: j,
                statistic: z,
                p_raw: p,
                p_adjusted: f64::NAN,
            });
        }
    }
    for (c, adj) in comparisons.iter_mut().zip(holm_adjust(&raw)?) {
        c.p_adjusted = adj;
    }
    Ok(PairwiseTable { comparisons })
}
