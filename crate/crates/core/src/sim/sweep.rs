//! Replicated delay sweeps with order-independent seeding.
//!
//! Every (delay, replicate) cell gets its own ChaCha stream derived from
//! the base seed and the cell coordinates, so results are bit-identical
//! whether replicates run serially or across any number of threads.

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::engine::{FinalCounts, Simulation};
use super::{SimError, SimParams};

/// Final counts of a single replicate at one delay setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReplicateOutcome {
    pub delay: u32,
    pub replicate: u32,
    pub counts: FinalCounts,
}

/// Mean/SD of final fractions across the replicates of one delay setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelaySummary {
    pub delay: u32,
    pub n_replicates: u32,
    pub mean_neutral: f64,
    pub sd_neutral: f64,
    pub mean_false: f64,
    pub sd_false: f64,
    pub mean_retracted: f64,
    pub sd_retracted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub replicates: Vec<ReplicateOutcome>,
    pub summaries: Vec<DelaySummary>,
}

fn replicate_seed(base_seed: u64, delay_idx: u32, rep_idx: u32) -> [u8; 32] {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&base_seed.to_le_bytes());
    seed[8..12].copy_from_slice(&delay_idx.to_le_bytes());
    seed[12..16].copy_from_slice(&rep_idx.to_le_bytes());
    seed
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Run `params.n_replicates` independent replicates at every delay in
/// `delay_grid`, overriding `params.retraction_delay`. Replicates run in
/// parallel; outputs are ordered by (grid position, replicate index).
pub fn sweep_delay(params: &SimParams, delay_grid: &[u32]) -> Result<SweepResult, SimError> {
    params.validate()?;
    for &delay in delay_grid {
        if delay > params.max_steps {
            return Err(SimError::InvalidParams(format!(
                "delay {delay} exceeds max_steps {}",
                params.max_steps
            )));
        }
    }
    let cells: Vec<(u32, u32)> = delay_grid
        .iter()
        .enumerate()
        .flat_map(|(di, _)| (0..params.n_replicates as u32).map(move |r| (di as u32, r)))
        .collect();
    let replicates: Vec<ReplicateOutcome> = cells
        .par_iter()
        .map(|&(delay_idx, rep_idx)| {
            let delay = delay_grid[delay_idx as usize];
            let cell_params = SimParams {
                retraction_delay: delay,
                ..params.clone()
            };
            let rng =
                ChaCha8Rng::from_seed(replicate_seed(params.rng_seed, delay_idx, rep_idx));
            let counts = Simulation::with_rng(&cell_params, rng)?.run_to_completion();
            Ok(ReplicateOutcome {
                delay,
                replicate: rep_idx,
                counts,
            })
        })
        .collect::<Result<_, SimError>>()?;

    let n = params.n_agents as f64;
    let summaries = delay_grid
        .iter()
        .enumerate()
        .map(|(di, &delay)| {
            let slice = &replicates[di * params.n_replicates..(di + 1) * params.n_replicates];
            let frac = |f: fn(&FinalCounts) -> usize| -> Vec<f64> {
                slice.iter().map(|r| f(&r.counts) as f64 / n).collect()
            };
            let (mean_neutral, sd_neutral) = mean_sd(&frac(|c| c.n_neutral));
            let (mean_false, sd_false) = mean_sd(&frac(|c| c.n_false));
            let (mean_retracted, sd_retracted) = mean_sd(&frac(|c| c.n_retracted));
            DelaySummary {
                delay,
                n_replicates: params.n_replicates as u32,
                mean_neutral,
                sd_neutral,
                mean_false,
                sd_false,
                mean_retracted,
                sd_retracted,
            }
        })
        .collect();

    Ok(SweepResult {
        replicates,
        summaries,
    })
}

/// One row per replicate: delay, replicate, final_neutral, final_false,
/// final_retracted (raw agent counts).
pub fn write_replicates_csv<W: Write>(
    out: W,
    replicates: &[ReplicateOutcome],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "delay",
        "replicate",
        "final_neutral",
        "final_false",
        "final_retracted",
    ])?;
    for r in replicates {
        w.write_record([
            r.delay.to_string(),
            r.replicate.to_string(),
            r.counts.n_neutral.to_string(),
            r.counts.n_false.to_string(),
            r.counts.n_retracted.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per delay with fraction means and sample SDs.
pub fn write_summary_csv<W: Write>(out: W, summaries: &[DelaySummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "delay",
        "n_replicates",
        "mean_retracted",
        "sd_retracted",
        "mean_false",
        "sd_false",
        "mean_neutral",
        "sd_neutral",
    ])?;
    for s in summaries {
        w.write_record([
            s.delay.to_string(),
            s.n_replicates.to_string(),
            format!("{:.6}", s.mean_retracted),
            format!("{:.6}", s.sd_retracted),
            format!("{:.6}", s.mean_false),
            format!("{:.6}", s.sd_false),
            format!("{:.6}", s.mean_neutral),
            format!("{:.6}", s.sd_neutral),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write both sweep CSVs into `dir` as replicates.csv and summary.csv.
pub fn write_sweep_outputs(dir: &Path, result: &SweepResult) -> std::io::Result<()> {
    let rep_file = std::fs::File::create(dir.join("replicates.csv"))?;
    write_replicates_csv(rep_file, &result.replicates).map_err(std::io::Error::other)?;
    let sum_file = std::fs::File::create(dir.join("summary.csv"))?;
    write_summary_csv(sum_file, &result.summaries).map_err(std::io::Error::other)?;
    Ok(())
}
