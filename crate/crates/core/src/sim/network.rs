//! Contact network construction: complete, ring-lattice, and
//! Erdős–Rényi topologies, all guaranteed connected.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimError;

/// Attempts to sample a connected G(n, p) graph before giving up.
const ER_CONNECTIVITY_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Complete,
    /// Ring lattice: each node linked to its k nearest neighbors per side.
    Ring { k: usize },
    /// G(n, p) with independent edges, resampled until connected.
    ErdosRenyi { p: f64 },
}

impl Topology {
    pub fn validate(&self, n_agents: usize) -> Result<(), SimError> {
        match *self {
            Topology::Complete => Ok(()),
            Topology::Ring { k } => {
                if k == 0 || k >= n_agents {
                    Err(SimError::InvalidTopologyParam(format!(
                        "ring k must satisfy 1 <= k < n_agents, got k={k}, n={n_agents}"
                    )))
                } else {
                    Ok(())
                }
            }
            Topology::ErdosRenyi { p } => {
                if p > 0.0 && p <= 1.0 {
                    Ok(())
                } else {
                    Err(SimError::InvalidTopologyParam(format!(
                        "erdos-renyi p must lie in (0, 1], got {p}"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Complete => write!(f, "complete"),
            Topology::Ring { k } => write!(f, "ring:{k}"),
            Topology::ErdosRenyi { p } => write!(f, "er:{p}"),
        }
    }
}

impl FromStr for Topology {
    type Err = String;

    /// Accepts `complete`, `ring:<k>`, and `er:<p>` (alias `erdos-renyi:<p>`).
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("complete") {
            return Ok(Topology::Complete);
        }
        if let Some(rest) = s.strip_prefix("ring:") {
            let k = rest
                .parse::<usize>()
                .map_err(|_| format!("bad ring size {rest:?}"))?;
            return Ok(Topology::Ring { k });
        }
        for prefix in ["er:", "erdos-renyi:"] {
            if let Some(rest) = s.strip_prefix(prefix) {
                let p = rest
                    .parse::<f64>()
                    .map_err(|_| format!("bad edge probability {rest:?}"))?;
                return Ok(Topology::ErdosRenyi { p });
            }
        }
        Err(format!(
            "unknown topology {s:?}; expected complete, ring:<k>, or er:<p>"
        ))
    }
}

/// Undirected simple graph over agents 0..n, stored as adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    adjacency: Vec<Vec<u32>>,
}

impl Network {
    fn from_edges(n: usize, edges: &BTreeSet<(u32, u32)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        Network { adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut reached = 1;
        while let Some(node) = stack.pop() {
            for &next in self.neighbors(node) {
                if !seen[next as usize] {
                    seen[next as usize] = true;
                    reached += 1;
                    stack.push(next);
                }
            }
        }
        reached == n
    }
}

/// Build a connected network over `n_agents` nodes.
///
/// Complete and ring topologies are deterministic; Erdős–Rényi draws edges
/// from `rng` and resamples up to a retry budget before reporting failure.
pub fn build_network<R: Rng>(
    topology: &Topology,
    n_agents: usize,
    rng: &mut R,
) -> Result<Network, SimError> {
    if n_agents < 2 {
        return Err(SimError::InvalidParams(format!(
            "n_agents must be at least 2, got {n_agents}"
        )));
    }
    topology.validate(n_agents)?;
    match *topology {
        Topology::Complete => {
            let mut edges = BTreeSet::new();
            for a in 0..n_agents as u32 {
                for b in a + 1..n_agents as u32 {
                    edges.insert((a, b));
                }
            }
            Ok(Network::from_edges(n_agents, &edges))
        }
        Topology::Ring { k } => {
            let n = n_agents as u32;
            let mut edges = BTreeSet::new();
            for a in 0..n {
                for offset in 1..=k as u32 {
                    let b = (a + offset) % n;
                    if a != b {
                        edges.insert((a.min(b), a.max(b)));
                    }
                }
            }
            Ok(Network::from_edges(n_agents, &edges))
        }
        Topology::ErdosRenyi { p } => {
            for _ in 0..ER_CONNECTIVITY_RETRIES {
                let mut edges = BTreeSet::new();
                for a in 0..n_agents as u32 {
                    for b in a + 1..n_agents as u32 {
                        if rng.gen_bool(p) {
                            edges.insert((a, b));
                        }
                    }
                }
                let network = Network::from_edges(n_agents, &edges);
                if network.is_connected() {
                    return Ok(network);
                }
            }
            Err(SimError::DisconnectedAfterRetries {
                retries: ER_CONNECTIVITY_RETRIES,
            })
        }
    }
}
