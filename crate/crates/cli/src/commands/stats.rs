use std::collections::BTreeMap;
use std::fs::File;

use anyhow::{anyhow, bail, Context, Result};
use retraction_core::matching::read_outcomes_csv;
use retraction_core::stats::{
    dunn_posthoc, holm_adjust, kruskal_wallis, welch_anova, welch_t, PairwiseComparison,
    PairwiseTable, TestResult,
};
use serde::Serialize;

use super::write_json;
use crate::manifest::Manifest;
use crate::{Ctx, OutcomeSel, StatsArgs};

#[derive(Serialize)]
struct GroupInfo {
    tier: String,
    n: usize,
}

#[derive(Serialize)]
struct OutcomeTests {
    welch_anova: TestResult,
    kruskal_wallis: TestResult,
    /// Pairwise Welch t tests, Holm-adjusted; group indices refer to the
    /// report's `groups` order.
    pairwise_welch: PairwiseTable,
    dunn: PairwiseTable,
}

#[derive(Serialize)]
struct StatsReport {
    groups: Vec<GroupInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcome1: Option<OutcomeTests>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcome2: Option<OutcomeTests>,
}

/// Lower bound of a tier label like "[9,31)" — the group sort key.
fn tier_lower_bound(label: &str) -> Result<u64> {
    label
        .strip_prefix('[')
        .and_then(|s| s.split(',').next())
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| anyhow!("malformed tier label {label:?}"))
}

fn pairwise_welch(groups: &[Vec<f64>]) -> Result<PairwiseTable> {
    let mut comparisons = Vec::new();
    let mut raw_p = Vec::new();
    for a in 0..groups.len() {
        for b in (a + 1)..groups.len() {
            let t = welch_t(&groups[a], &groups[b])?;
            raw_p.push(t.p_value);
            comparisons.push(PairwiseComparison {
                group_a: a,
                group_b: b,
                statistic: t.statistic,
                p_raw: t.p_value,
                p_adjusted: f64::NAN, // filled from the Holm pass below
            });
        }
    }
    for (c, adj) in comparisons.iter_mut().zip(holm_adjust(&raw_p)?) {
        c.p_adjusted = adj;
    }
    Ok(PairwiseTable { comparisons })
}

fn test_outcome(groups: &[Vec<f64>]) -> Result<OutcomeTests> {
    Ok(OutcomeTests {
        welch_anova: welch_anova(groups)?,
        kruskal_wallis: kruskal_wallis(groups)?,
        pairwise_welch: pairwise_welch(groups)?,
        dunn: dunn_posthoc(groups)?,
    })
}

pub fn run(args: &StatsArgs, ctx: &Ctx) -> Result<()> {
    let selection = crate::config::resolve(
        args.outcome,
        ctx.cfg.get("stats", "outcome")?,
        OutcomeSel::Both,
    );
    let file = File::open(&args.outcomes)
        .with_context(|| format!("opening {}", args.outcomes.display()))?;
    let rows = read_outcomes_csv(file)
        .map_err(|e| anyhow!("{}: {e}", args.outcomes.display()))?;
    if rows.is_empty() {
        bail!("{} holds no outcome rows", args.outcomes.display());
    }

    // Group by tier label, ordered by the label's lower bound.
    let mut by_tier: BTreeMap<u64, (String, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in &rows {
        let entry = by_tier
            .entry(tier_lower_bound(&row.tier_label)?)
            .or_insert_with(|| (row.tier_label.clone(), Vec::new(), Vec::new()));
        entry.1.push(row.outcome1);
        entry.2.push(row.outcome2);
    }
    let groups: Vec<GroupInfo> = by_tier
        .values()
        .map(|(label, o1, _)| GroupInfo { tier: label.clone(), n: o1.len() })
        .collect();
    for g in &groups {
        if g.n < 2 {
            bail!("tier {} has {} row(s); each tested tier needs at least 2", g.tier, g.n);
        }
    }
    if groups.len() < 2 {
        bail!("only one tier present; group tests need at least 2");
    }
    let o1_groups: Vec<Vec<f64>> = by_tier.values().map(|(_, o1, _)| o1.clone()).collect();
    let o2_groups: Vec<Vec<f64>> = by_tier.values().map(|(_, _, o2)| o2.clone()).collect();

    let report = StatsReport {
        groups,
        outcome1: match selection {
            OutcomeSel::Outcome2 => None,
            _ => Some(test_outcome(&o1_groups)?),
        },
        outcome2: match selection {
            OutcomeSel::Outcome1 => None,
            _ => Some(test_outcome(&o2_groups)?),
        },
    };

    let mut manifest = Manifest::new(
        "stats",
        serde_json::json!({
            "outcomes": args.outcomes.display().to_string(),
            "outcome": selection,
        }),
    )?;
    manifest.add_input(&args.outcomes)?;
    let path = write_json(&ctx.out_dir, "stats_report.json", &report)?;
    manifest.add_output(&path)?;
    manifest.write(&ctx.out_dir)?;

    for (name, tests) in [("outcome1", &report.outcome1), ("outcome2", &report.outcome2)] {
        if let Some(t) = tests {
            println!(
                "{name}: Welch ANOVA p = {:.3e}, Kruskal-Wallis p = {:.3e}",
                t.welch_anova.p_value, t.kruskal_wallis.p_value
            );
        }
    }
    Ok(())
}
