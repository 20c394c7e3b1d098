use anyhow::{bail, Result};
use retraction_core::sim::{sweep_delay, SimParams, Topology};

use super::write_output;
use crate::config::resolve;
use crate::manifest::Manifest;
use crate::{Ctx, SimCommon, SimulateArgs, SweepArgs, TopologyKind};

fn resolve_params(common: &SimCommon, section: &str, ctx: &Ctx) -> Result<SimParams> {
    let cfg = &ctx.cfg;
    let kind = resolve(
        common.topology,
        cfg.get(section, "topology")?,
        TopologyKind::Complete,
    );
    let topology = match kind {
        TopologyKind::Complete => Topology::Complete,
        TopologyKind::Ring => Topology::Ring {
            k: resolve(common.ring_k, cfg.get(section, "ring_k")?, 4),
        },
        TopologyKind::ErdosRenyi => Topology::ErdosRenyi {
            p: resolve(common.er_p, cfg.get(section, "er_p")?, 0.1),
        },
    };
    Ok(SimParams {
        n_agents: resolve(common.n, cfg.get(section, "n")?, 100),
        topology,
        share_window: resolve(common.share_window, cfg.get(section, "share_window")?, 200),
        retraction_delay: 0, // set per delay-grid entry by the sweep
        max_steps: resolve(common.max_steps, cfg.get(section, "max_steps")?, 10_000),
        n_replicates: resolve(common.reps, cfg.get(section, "reps")?, 100),
        rng_seed: ctx.seed,
        transmission_prob: resolve(
            common.transmission_prob,
            cfg.get(section, "transmission_prob")?,
            1.0,
        ),
    })
}

fn run_grid(params: &SimParams, delays: &[u32], command: &str, ctx: &Ctx) -> Result<()> {
    if delays.is_empty() {
        bail!("delay grid is empty");
    }
    let result = sweep_delay(params, delays)?;

    let mut manifest = Manifest::new(
        command,
        serde_json::json!({ "params": params, "delays": delays }),
    )?;
    let replicates = write_output(&ctx.out_dir, "replicates.csv", |out| {
        retraction_core::sim::write_replicates_csv(out, &result.replicates)
    })?;
    let summary = write_output(&ctx.out_dir, "summary.csv", |out| {
        retraction_core::sim::write_summary_csv(out, &result.summaries)
    })?;
    manifest.add_output(&replicates)?;
    manifest.add_output(&summary)?;
    manifest.write(&ctx.out_dir)?;

    for s in &result.summaries {
        println!(
            "delay {:>5}: mean retracted {:.4}, mean false {:.4} ({} replicates)",
            s.delay, s.mean_retracted, s.mean_false, s.n_replicates
        );
    }
    Ok(())
}

pub fn run_simulate(args: &SimulateArgs, ctx: &Ctx) -> Result<()> {
    let params = resolve_params(&args.common, "simulate", ctx)?;
    let delay = resolve(args.delay, ctx.cfg.get("simulate", "delay")?, 0);
    run_grid(&params, &[delay], "simulate", ctx)
}

pub fn run_sweep(args: &SweepArgs, ctx: &Ctx) -> Result<()> {
    let params = resolve_params(&args.common, "sweep", ctx)?;
    let delays = resolve(
        args.delays.clone(),
        ctx.cfg.get("sweep", "delays")?,
        vec![0, 50, 100, 200],
    );
    run_grid(&params, &delays, "sweep", ctx)
}
