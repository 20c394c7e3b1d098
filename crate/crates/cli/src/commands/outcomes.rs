use anyhow::{bail, Result};
use retraction_core::ingest::PaperRecord;
use retraction_core::matching::{
    compute_outcomes, pre_retraction_citations, stratify, summarize_tiers,
    write_matched_sets_csv, write_outcomes_csv, write_tier_summary_csv, MatchingConfig,
    TierSpec,
};

use super::{load_corpus_reporting, write_output};
use crate::config::resolve;
use crate::manifest::Manifest;
use crate::{Ctx, MatchArgs, OutcomesArgs};

fn check_horizon(horizon: i32) -> Result<i32> {
    if horizon < 1 {
        bail!("--horizon must be at least 1 year, got {horizon}");
    }
    Ok(horizon)
}

pub fn run_match(args: &MatchArgs, ctx: &Ctx) -> Result<()> {
    let horizon = check_horizon(resolve(args.horizon, ctx.cfg.get("match", "horizon")?, 5))?;
    let corpus = load_corpus_reporting(&args.corpus)?;
    let config = MatchingConfig {
        horizon_years: horizon,
        ..MatchingConfig::default()
    };
    let report = compute_outcomes(&corpus, &config)?;

    let mut manifest = Manifest::new(
        "match",
        serde_json::json!({
            "corpus": args.corpus.display().to_string(),
            "horizon_years": horizon,
        }),
    )?;
    manifest.add_input(&args.corpus)?;
    let sets = write_output(&ctx.out_dir, "matched_sets.csv", |out| {
        write_matched_sets_csv(out, &report.matched_sets)
    })?;
    manifest.add_output(&sets)?;
    manifest.write(&ctx.out_dir)?;

    println!(
        "matched {} of {} retracted papers",
        report.matched_sets.len(),
        report.matched_sets.len() + report.unmatched.len()
    );
    Ok(())
}

/// Cut points either given directly or derived from percentiles of the
/// retracted papers' pre-citation distribution.
fn resolve_tier_spec(
    boundaries: Option<Vec<u64>>,
    percentiles: Option<Vec<f64>>,
    corpus: &[PaperRecord],
) -> Result<TierSpec> {
    if let Some(pcts) = percentiles {
        let pre: Vec<u64> = corpus
            .iter()
            .filter(|r| r.is_retracted())
            .map(|r| pre_retraction_citations(r, r.retraction_date.unwrap().year))
            .collect::<Result<_, _>>()?;
        return match TierSpec::from_percentiles(&pre, &pcts) {
            Some(spec) => Ok(spec),
            None => bail!("percentiles {pcts:?} yield no usable cut points"),
        };
    }
    match boundaries {
        None => Ok(TierSpec::canonical()),
        Some(b) => match TierSpec::new(b.clone()) {
            Some(spec) => Ok(spec),
            None => bail!("tier cut points {b:?} must be strictly increasing and nonzero"),
        },
    }
}

pub fn run_outcomes(args: &OutcomesArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let horizon = check_horizon(resolve(args.horizon, cfg.get("outcomes", "horizon")?, 5))?;
    let epsilon = resolve(args.epsilon, cfg.get("outcomes", "epsilon")?, 1e-5);
    let boundaries = args.tiers.clone().or(cfg.get("outcomes", "tiers")?);
    let percentiles = args
        .tier_percentiles
        .clone()
        .or(cfg.get("outcomes", "tier_percentiles")?);

    let corpus = load_corpus_reporting(&args.corpus)?;
    let tier_spec = resolve_tier_spec(boundaries, percentiles, &corpus)?;
    let config = MatchingConfig {
        horizon_years: horizon,
        epsilon,
        tier_spec: tier_spec.clone(),
    };
    let report = compute_outcomes(&corpus, &config)?;
    let stratified = stratify(&report.rows, &tier_spec);
    let summaries = summarize_tiers(&stratified, &tier_spec);

    let mut manifest = Manifest::new(
        "outcomes",
        serde_json::json!({
            "corpus": args.corpus.display().to_string(),
            "horizon_years": horizon,
            "epsilon": epsilon,
            "tier_spec": tier_spec,
        }),
    )?;
    manifest.add_input(&args.corpus)?;
    let outcomes = write_output(&ctx.out_dir, "outcomes.csv", |out| {
        write_outcomes_csv(out, &report.rows)
    })?;
    let tiers = write_output(&ctx.out_dir, "tier_summary.csv", |out| {
        write_tier_summary_csv(out, &summaries)
    })?;
    let unmatched = write_output(&ctx.out_dir, "unmatched.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["paper_id"])?;
        for id in &report.unmatched {
            w.write_record([id])?;
        }
        w.flush()?;
        csv::Result::Ok(())
    })?;
    manifest.add_output(&outcomes)?;
    manifest.add_output(&tiers)?;
    manifest.add_output(&unmatched)?;
    manifest.write(&ctx.out_dir)?;

    println!(
        "computed outcomes for {} papers ({} unmatched)",
        report.rows.len(),
        report.unmatched.len()
    );
    Ok(())
}
