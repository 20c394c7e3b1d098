use anyhow::{bail, Result};
use retraction_core::ingest::{
    gen_synthetic, write_corpus_csv, write_mentions_csv, SynthConfig,
};

use super::{write_json, write_output};
use crate::config::resolve;
use crate::manifest::Manifest;
use crate::{Ctx, SynthArgs};

pub fn run(args: &SynthArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let penalties_vec = resolve(
        args.penalties.clone(),
        cfg.get("synth", "penalties")?,
        vec![1.0, 0.8, 0.5, 0.2],
    );
    let tier_penalties: [f64; 4] = match penalties_vec.as_slice().try_into() {
        Ok(p) => p,
        Err(_) => bail!(
            "--penalties needs exactly 4 values (one per tier), got {}",
            penalties_vec.len()
        ),
    };
    let config = SynthConfig {
        n_retracted: resolve(args.n_retracted, cfg.get("synth", "n_retracted")?, 2000),
        n_controls_per_cell: resolve(
            args.controls_per_cell,
            cfg.get("synth", "controls_per_cell")?,
            5,
        ),
        tier_penalties,
        attention_beta: resolve(
            args.attention_beta,
            cfg.get("synth", "attention_beta")?,
            0.2,
        ),
        rng_seed: ctx.seed,
    };
    let output = gen_synthetic(&config)?;

    let mut manifest = Manifest::new("synth", &config)?;
    let corpus = write_output(&ctx.out_dir, "corpus.csv", |out| {
        write_corpus_csv(out, &output.corpus)
    })?;
    let mentions = write_output(&ctx.out_dir, "mentions.csv", |out| {
        write_mentions_csv(out, &output.mentions)
    })?;
    let truth = write_json(&ctx.out_dir, "truth.json", &output.truth)?;
    for p in [&corpus, &mentions, &truth] {
        manifest.add_output(p)?;
    }
    manifest.write(&ctx.out_dir)?;

    println!(
        "generated {} papers and {} mention events across {} cells",
        output.corpus.len(),
        output.mentions.len(),
        output.truth.cells.len()
    );
    Ok(())
}
