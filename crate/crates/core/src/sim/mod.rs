//! Discrete-time belief dynamics on a contact network.
//!
//! One agent is seeded with a false claim at step 0 and shares it with
//! random neighbors; after a configurable delay the claim's retraction is
//! seeded at the same agent and spreads the same way. Belief states only
//! move forward along `Neutral -> False -> Retracted`, and an agent that
//! never held the false claim ignores the retraction entirely.

mod engine;
mod network;
mod sweep;

pub use engine::{run, FinalCounts, Simulation};
pub use network::{build_network, Network, Topology};
pub use sweep::{
    sweep_delay, write_replicates_csv, write_summary_csv, write_sweep_outputs, DelaySummary,
    ReplicateOutcome, SweepResult,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("invalid topology parameter: {0}")]
    InvalidTopologyParam(String),
    #[error("random graph still disconnected after {retries} retries")]
    DisconnectedAfterRetries { retries: usize },
}

/// Belief state of one agent. Transitions are strictly forward:
/// Neutral -> False (on hearing the claim) -> Retracted (on hearing the
/// retraction); no other transition exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefState {
    Neutral,
    False,
    Retracted,
}

/// Message an agent actively shares while its share clock is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Message {
    FalseClaim,
    Retraction,
}

/// Full parameter set for one simulation run or sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub n_agents: usize,
    pub topology: Topology,
    /// Rounds an agent keeps sharing a newly acquired message.
    pub share_window: u32,
    /// Step at which the retraction is seeded.
    pub retraction_delay: u32,
    pub max_steps: u32,
    /// Replicates per delay value in a sweep.
    pub n_replicates: usize,
    pub rng_seed: u64,
    /// Probability a contact transmits the sharer's message (1 = always).
    pub transmission_prob: f64,
}

impl SimParams {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_agents < 2 {
            return Err(SimError::InvalidParams(format!(
                "n_agents must be at least 2, got {}",
                self.n_agents
            )));
        }
        if self.share_window == 0 {
            return Err(SimError::InvalidParams("share_window must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(SimError::InvalidParams("max_steps must be positive".into()));
        }
        if self.retraction_delay > self.max_steps {
            return Err(SimError::InvalidParams(format!(
                "retraction_delay {} exceeds max_steps {}",
                self.retraction_delay, self.max_steps
            )));
        }
        if self.n_replicates == 0 {
            return Err(SimError::InvalidParams("n_replicates must be positive".into()));
        }
        if !(self.transmission_prob > 0.0 && self.transmission_prob <= 1.0) {
            return Err(SimError::InvalidParams(format!(
                "transmission_prob must lie in (0, 1], got {}",
                self.transmission_prob
            )));
        }
        self.topology.validate(self.n_agents)
    }
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n_agents: 100,
            topology: Topology::Complete,
            share_window: 200,
            retraction_delay: 0,
            max_steps: 1000,
            n_replicates: 1,
            rng_seed: 0,
            transmission_prob: 1.0,
        }
    }
}
