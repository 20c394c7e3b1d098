use anyhow::Result;
use retraction_core::linkage::{link_records, LinkConfig, LinkResult};

use super::{load_corpus_reporting, write_output};
use crate::config::resolve;
use crate::manifest::Manifest;
use crate::{Ctx, LinkArgs};

fn write_links_csv<W: std::io::Write>(out: W, result: &LinkResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["left_id", "right_id", "method", "similarity"])?;
    for p in &result.pairs {
        w.write_record([
            p.left_id.clone(),
            p.right_id.clone(),
            p.method.to_string(),
            p.similarity.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_id_csv<W: std::io::Write>(out: W, ids: &[String]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["paper_id"])?;
    for id in ids {
        w.write_record([id])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &LinkArgs, ctx: &Ctx) -> Result<()> {
    let threshold = resolve(
        args.threshold,
        ctx.cfg.get("link", "threshold")?,
        LinkConfig::default().sim_threshold,
    );
    let left = load_corpus_reporting(&args.left)?;
    let right = load_corpus_reporting(&args.right)?;
    let result = link_records(&left, &right, &LinkConfig { sim_threshold: threshold });

    let mut manifest = Manifest::new(
        "link",
        serde_json::json!({
            "left": args.left.display().to_string(),
            "right": args.right.display().to_string(),
            "threshold": threshold,
        }),
    )?;
    manifest.add_input(&args.left)?;
    manifest.add_input(&args.right)?;
    let links = write_output(&ctx.out_dir, "links.csv", |out| {
        write_links_csv(out, &result)
    })?;
    manifest.add_output(&links)?;
    let unmatched_left = write_output(&ctx.out_dir, "unmatched_left.csv", |out| {
        write_id_csv(out, &result.unmatched_left)
    })?;
    let unmatched_right = write_output(&ctx.out_dir, "unmatched_right.csv", |out| {
        write_id_csv(out, &result.unmatched_right)
    })?;
    manifest.add_output(&unmatched_left)?;
    manifest.add_output(&unmatched_right)?;
    manifest.write(&ctx.out_dir)?;

    println!(
        "linked {} pairs ({} left / {} right unmatched)",
        result.pairs.len(),
        result.unmatched_left.len(),
        result.unmatched_right.len()
    );
    Ok(())
}
