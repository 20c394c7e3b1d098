//! Per-round contact dynamics and the retraction seeding schedule.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::network::{build_network, Network};
use super::{BeliefState, Message, SimError, SimParams};

/// Terminal tallies of one run; the three counts always sum to n_agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FinalCounts {
    pub n_neutral: usize,
    pub n_false: usize,
    pub n_retracted: usize,
    /// Rounds actually executed before stopping.
    pub steps_run: u32,
}

impl FinalCounts {
    pub fn fractions(&self, n_agents: usize) -> (f64, f64, f64) {
        let n = n_agents as f64;
        (
            self.n_neutral as f64 / n,
            self.n_false as f64 / n,
            self.n_retracted as f64 / n,
        )
    }
}

/// One in-flight simulation. Step it manually for trace inspection or call
/// [`Simulation::run_to_completion`].
pub struct Simulation {
    params: SimParams,
    network: Network,
    states: Vec<BeliefState>,
    sharing: Vec<Option<Message>>,
    share_clock: Vec<u32>,
    step_index: u32,
    patient_zero: u32,
    retraction_seeded: bool,
    rng: ChaCha8Rng,
    order: Vec<u32>,
    acted: Vec<bool>,
}

impl Simulation {
    /// Seed the false claim in a uniformly random agent and stand ready to
    /// run. Draws the network (when random) and patient zero from a stream
    /// seeded by `params.rng_seed`.
    pub fn new(params: &SimParams) -> Result<Self, SimError> {
        let rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        Self::with_rng(params, rng)
    }

    /// As [`Simulation::new`] but with an explicit RNG, for replicate
    /// streams derived outside.
    pub fn with_rng(params: &SimParams, mut rng: ChaCha8Rng) -> Result<Self, SimError> {
        params.validate()?;
        let network = build_network(&params.topology, params.n_agents, &mut rng)?;
        let n = params.n_agents;
        let patient_zero = rng.gen_range(0..n as u32);
        let mut states = vec![BeliefState::Neutral; n];
        let mut sharing = vec![None; n];
        let mut share_clock = vec![0u32; n];
        states[patient_zero as usize] = BeliefState::False;
        sharing[patient_zero as usize] = Some(Message::FalseClaim);
        share_clock[patient_zero as usize] = params.share_window;
        Ok(Simulation {
            params: params.clone(),
            network,
            states,
            sharing,
            share_clock,
            step_index: 0,
            patient_zero,
            retraction_seeded: false,
            rng,
            order: (0..n as u32).collect(),
            acted: vec![false; n],
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn states(&self) -> &[BeliefState] {
        &self.states
    }

    pub fn share_clocks(&self) -> &[u32] {
        &self.share_clock
    }

    pub fn step_index(&self) -> u32 {
        self.step_index
    }

    pub fn patient_zero(&self) -> u32 {
        self.patient_zero
    }

    pub fn retraction_seeded(&self) -> bool {
        self.retraction_seeded
    }

    pub fn counts(&self) -> FinalCounts {
        let mut c = FinalCounts {
            n_neutral: 0,
            n_false: 0,
            n_retracted: 0,
            steps_run: self.step_index,
        };
        for s in &self.states {
            match s {
                BeliefState::Neutral => c.n_neutral += 1,
                BeliefState::False => c.n_false += 1,
                BeliefState::Retracted => c.n_retracted += 1,
            }
        }
        c
    }

    /// Nothing can change any more: the retraction is in the system and
    /// either every share clock has drained or no false belief is left to
    /// act on (with no false sharers, neither message can still convert).
    pub fn is_quiescent(&self) -> bool {
        if !self.retraction_seeded {
            return false;
        }
        self.share_clock.iter().all(|&c| c == 0)
            || !self.states.contains(&BeliefState::False)
    }

    /// Seed the retraction at patient zero (who is False in every reachable
    /// schedule and converts immediately). Fallbacks: a Neutral patient
    /// zero passes the seed to a uniformly random False agent; with no
    /// False agent anywhere, patient zero merely carries the message, which
    /// can still convert False receivers without changing its own state.
    fn seed_retraction(&mut self) {
        let pz = self.patient_zero as usize;
        let target = match self.states[pz] {
            BeliefState::False | BeliefState::Retracted => pz,
            BeliefState::Neutral => {
                let false_agents: Vec<usize> = (0..self.states.len())
                    .filter(|&i| self.states[i] == BeliefState::False)
                    .collect();
                if false_agents.is_empty() {
                    pz
                } else {
                    false_agents[self.rng.gen_range(0..false_agents.len())]
                }
            }
        };
        if self.states[target] == BeliefState::False {
            self.states[target] = BeliefState::Retracted;
        }
        self.sharing[target] = Some(Message::Retraction);
        self.share_clock[target] = self.params.share_window;
        self.retraction_seeded = true;
    }

    fn active_message(&self, agent: u32) -> Option<Message> {
        if self.share_clock[agent as usize] > 0 {
            self.sharing[agent as usize]
        } else {
            None
        }
    }

    fn receive(&mut self, agent: u32, message: Message) {
        let a = agent as usize;
        let converts = match (message, self.states[a]) {
            (Message::FalseClaim, BeliefState::Neutral) => true,
            (Message::Retraction, BeliefState::False) => true,
            // A Neutral agent never adopts a retraction of a claim it does
            // not hold, and repeat exposure does not re-arm a share clock.
            _ => false,
        };
        if !converts {
            return;
        }
        if self.params.transmission_prob < 1.0
            && !self.rng.gen_bool(self.params.transmission_prob)
        {
            return;
        }
        match message {
            Message::FalseClaim => self.states[a] = BeliefState::False,
            Message::Retraction => self.states[a] = BeliefState::Retracted,
        }
        self.sharing[a] = Some(message);
        self.share_clock[a] = self.params.share_window;
    }

    /// One round: seed the retraction if due, then let every agent (in a
    /// fresh random order) contact one uniformly random neighbor. Both ends
    /// of a contact share simultaneously; share clocks of everyone who
    /// acted as a sharer decrement at the end of the round.
    pub fn step(&mut self) {
        if !self.retraction_seeded && self.step_index == self.params.retraction_delay {
            self.seed_retraction();
        }
        self.acted.iter_mut().for_each(|a| *a = false);
        let mut order = std::mem::take(&mut self.order);
        order.shuffle(&mut self.rng);
        for &agent in &order {
            let neighbors = self.network.neighbors(agent);
            let partner = neighbors[self.rng.gen_range(0..neighbors.len())];
            // Snapshot both sides first so the exchange is simultaneous: a
            // message received in this contact is not re-shared within it.
            let from_agent = self.active_message(agent);
            let from_partner = self.active_message(partner);
            if from_agent.is_some() {
                self.acted[agent as usize] = true;
            }
            if from_partner.is_some() {
                self.acted[partner as usize] = true;
            }
            if let Some(m) = from_agent {
                self.receive(partner, m);
            }
            if let Some(m) = from_partner {
                self.receive(agent, m);
            }
        }
        self.order = order;
        for (i, &acted) in self.acted.iter().enumerate() {
            if acted && self.share_clock[i] > 0 {
                self.share_clock[i] -= 1;
            }
        }
        self.step_index += 1;
    }

    /// Run until max_steps or quiescence. A retraction scheduled exactly at
    /// max_steps is still seeded before the final tallies are taken.
    pub fn run_to_completion(&mut self) -> FinalCounts {
        while self.step_index < self.params.max_steps && !self.is_quiescent() {
            self.step();
        }
        if !self.retraction_seeded && self.step_index == self.params.retraction_delay {
            self.seed_retraction();
        }
        self.counts()
    }
}

/// Convenience wrapper: build from params and run to completion.
pub fn run(params: &SimParams) -> Result<FinalCounts, SimError> {
    Ok(Simulation::new(params)?.run_to_completion())
}
