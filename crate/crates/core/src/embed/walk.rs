//! Second-order biased random walks over a [`FlowNetwork`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flownet::FlowNetwork;

/// How the walk budget is spread over start nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkBudget {
    /// Total number of walks, assigned round-robin over start nodes.
    Total(usize),
    /// This many walks from every start node.
    PerNode(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    pub budget: WalkBudget,
    pub walk_length: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            p: 1.0,
            q: 2.0,
            budget: WalkBudget::Total(1000),
            walk_length: 80,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.p) || !positive(self.q) {
            return Err(Error::Parameter(format!(
                "p and q must be positive, got p={} q={}",
                self.p, self.q
            )));
        }
        let walks = match self.budget {
            WalkBudget::Total(n) | WalkBudget::PerNode(n) => n,
        };
        if walks < 1 {
            return Err(Error::Parameter("walk budget must be >= 1".into()));
        }
        if self.walk_length < 2 {
            return Err(Error::Parameter("walk_length must be >= 2".into()));
        }
        Ok(())
    }
}

/// Bias applied to the step cur -> `next` given the walk arrived from `prev`.
fn bias(net: &FlowNetwork, prev: usize, next: usize, p: f64, q: f64) -> f64 {
    if next == prev {
        1.0 / p
    } else if net.has_edge(prev, next) {
        1.0
    } else {
        1.0 / q
    }
}

/// Unnormalized next-step weights from `cur`, in out-neighbor order.
fn biased_weights(net: &FlowNetwork, prev: usize, cur: usize, p: f64, q: f64) -> Vec<(usize, f64)> {
    net.out_neighbors(cur)
        .iter()
        .map(|&(next, w)| (next, w as f64 * bias(net, prev, next, p, q)))
        .collect()
}

/// Distribution of the step after `prev -> cur`. `None` when `cur` has no
/// out-neighbors (the walk ends there).
pub fn transition_probs(
    net: &FlowNetwork,
    prev: usize,
    cur: usize,
    p: f64,
    q: f64,
) -> Option<Vec<(usize, f64)>> {
    let weights = biased_weights(net, prev, cur, p, q);
    if weights.is_empty() {
        return None;
    }
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    Some(weights.into_iter().map(|(n, w)| (n, w / total)).collect())
}

/// Inverse-CDF draw from unnormalized weights.
fn draw<R: Rng + ?Sized>(weights: &[(usize, f64)], rng: &mut R) -> usize {
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    let mut target = rng.random::<f64>() * total;
    for &(node, w) in weights {
        if target < w {
            return node;
        }
        target -= w;
    }
    // rounding left the target just past the last bucket
    weights[weights.len() - 1].0
}

/// Samples individual steps of a second-order walk.
#[derive(Debug, Clone, Copy)]
pub struct Walker<'a> {
    net: &'a FlowNetwork,
    p: f64,
    q: f64,
}

impl<'a> Walker<'a> {
    pub fn new(net: &'a FlowNetwork, p: f64, q: f64) -> Self {
        Walker { net, p, q }
    }

    /// First step, proportional to out-edge weights.
    pub fn first_step<R: Rng + ?Sized>(&self, cur: usize, rng: &mut R) -> Option<usize> {
        let weights: Vec<(usize, f64)> = self
            .net
            .out_neighbors(cur)
            .iter()
            .map(|&(n, w)| (n, w as f64))
            .collect();
        (!weights.is_empty()).then(|| draw(&weights, rng))
    }

    pub fn next_step<R: Rng + ?Sized>(
        &self,
        prev: usize,
        cur: usize,
        rng: &mut R,
    ) -> Option<usize> {
        let weights = biased_weights(self.net, prev, cur, self.p, self.q);
        (!weights.is_empty()).then(|| draw(&weights, rng))
    }

    /// A walk of at most `length` nodes starting at `start`, truncated at dead ends.
    pub fn walk<R: Rng + ?Sized>(&self, start: usize, length: usize, rng: &mut R) -> Vec<usize> {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        if length < 2 {
            return walk;
        }
        match self.first_step(start, rng) {
            Some(next) => walk.push(next),
            None => return walk,
        }
        while walk.len() < length {
            let cur = walk[walk.len() - 1];
            let prev = walk[walk.len() - 2];
            match self.next_step(prev, cur, rng) {
                Some(next) => walk.push(next),
                None => break,
            }
        }
        walk
    }
}

/// Nodes with at least one incident edge, in canonical order.
pub fn walkable_nodes(net: &FlowNetwork) -> Vec<usize> {
    (0..net.node_count())
        .filter(|&i| !net.is_isolated(i))
        .collect()
}

/// Per-walk RNG: one ChaCha stream per walk index, so walks can be sampled
/// in parallel without changing the result.
fn walk_rng(seed: u64, walk_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walk_index as u64);
    rng
}

/// Samples the walk corpus. Start nodes are the walkable nodes, assigned
/// round-robin in canonical order.
pub fn sample_walks(net: &FlowNetwork, cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    cfg.validate()?;
    let starts = walkable_nodes(net);
    if starts.is_empty() {
        return Err(Error::NoWalkableNodes(net.period()));
    }
    let total = match cfg.budget {
        WalkBudget::Total(n) => n,
        WalkBudget::PerNode(r) => r * starts.len(),
    };
    let walker = Walker::new(net, cfg.p, cfg.q);
    Ok((0..total)
        .into_par_iter()
        .map(|i| {
            let mut rng = walk_rng(cfg.seed, i);
            walker.walk(starts[i % starts.len()], cfg.walk_length, &mut rng)
        })
        .collect())
}
