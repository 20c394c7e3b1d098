use anyhow::{bail, Result};
use retraction_core::attention::{
    build_attention_rows, build_monthly_series, build_regression_dataset,
    tier_attention_summary, write_attention_rows_csv, write_attention_tier_summary_csv,
    write_monthly_series_csv, WindowConfig, WindowMode,
};
use retraction_core::matching::TierSpec;
use retraction_core::stats::{ols, RegressionFit};
use serde::Serialize;

use super::{load_corpus_reporting, load_mentions_reporting, write_json, write_output};
use crate::config::resolve;
use crate::manifest::Manifest;
use crate::{AttentionArgs, Ctx, WindowModeKind};

#[derive(Serialize)]
struct RegressionReport {
    columns: Vec<String>,
    n_obs: usize,
    dropped_count: usize,
    /// Window score regressed on pre-citations and controls.
    score_model: RegressionFit,
    /// Mention count regressed on the same design.
    mentions_model: RegressionFit,
}

pub fn run(args: &AttentionArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let mode_kind = resolve(
        args.window_mode,
        cfg.get("attention", "window_mode")?,
        WindowModeKind::Centered,
    );
    let months = resolve(args.window_months, cfg.get("attention", "window_months")?, 12);
    if months < 2 || months % 2 != 0 {
        bail!("--window-months must be even and at least 2, got {months}");
    }
    let window = WindowConfig {
        months,
        mode: match mode_kind {
            WindowModeKind::Centered => WindowMode::CenteredIncludingRetraction,
            WindowModeKind::Symmetric => WindowMode::SymmetricExcludingRetraction,
        },
    };
    let boundaries = args.tiers.clone().or(cfg.get("attention", "tiers")?);
    let tier_spec = match boundaries {
        None => TierSpec::canonical(),
        Some(b) => match TierSpec::new(b.clone()) {
            Some(spec) => spec,
            None => bail!("tier cut points {b:?} must be strictly increasing and nonzero"),
        },
    };

    let corpus = load_corpus_reporting(&args.corpus)?;
    let mentions = load_mentions_reporting(&args.mentions)?;
    let rows = build_attention_rows(&corpus, &mentions, &window)?;
    if rows.is_empty() {
        bail!("corpus {} holds no retracted papers", args.corpus.display());
    }
    let series = build_monthly_series(&corpus, &mentions)?;
    let summaries = tier_attention_summary(&rows, &tier_spec);
    let dataset = build_regression_dataset(&rows)?;
    let score_model = ols(&dataset.y_score, &dataset.design)?;
    let mentions_model = ols(&dataset.y_mentions, &dataset.design)?;
    let regression = RegressionReport {
        columns: dataset.column_names.clone(),
        n_obs: dataset.y_score.len(),
        dropped_count: dataset.dropped_count,
        score_model,
        mentions_model,
    };

    let mut manifest = Manifest::new(
        "attention",
        serde_json::json!({
            "corpus": args.corpus.display().to_string(),
            "mentions": args.mentions.display().to_string(),
            "window_mode": mode_kind,
            "window_months": months,
            "tier_spec": tier_spec,
        }),
    )?;
    manifest.add_input(&args.corpus)?;
    manifest.add_input(&args.mentions)?;
    let rows_path = write_output(&ctx.out_dir, "attention_rows.csv", |out| {
        write_attention_rows_csv(out, &rows)
    })?;
    let series_path = write_output(&ctx.out_dir, "monthly_series.csv", |out| {
        write_monthly_series_csv(out, &series)
    })?;
    let tiers_path = write_output(&ctx.out_dir, "attention_tier_summary.csv", |out| {
        write_attention_tier_summary_csv(out, &summaries)
    })?;
    let regression_path = write_json(&ctx.out_dir, "attention_regression.json", &regression)?;
    for p in [&rows_path, &series_path, &tiers_path, &regression_path] {
        manifest.add_output(p)?;
    }
    manifest.write(&ctx.out_dir)?;

    let pre_idx = regression
        .columns
        .iter()
        .position(|c| c == "pre_citations")
        .expect("design always carries pre_citations");
    println!(
        "{} papers ({} dropped as incomplete); mentions ~ pre_citations coefficient {:.4} (t = {:.2})",
        regression.n_obs,
        regression.dropped_count,
        regression.mentions_model.coefficients[pre_idx],
        regression.mentions_model.t_values[pre_idx],
    );
    Ok(())
}
