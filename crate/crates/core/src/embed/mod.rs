//! Node embeddings of a flow network: second-order walks followed by
//! skip-gram training. Nodes never reached by a walk get the zero vector.

mod io;
mod sgns;
mod walk;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flownet::FlowNetwork;

pub use io::{load_embedding, save_embedding};
pub use sgns::{
    pair_gradient, pair_loss, sigmoid, train_sgns, PairGradient, SkipGram, TrainConfig,
};
pub use walk::{sample_walks, transition_probs, walkable_nodes, WalkBudget, WalkConfig, Walker};

/// One finite vector per node, nodes in the order given at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    nodes: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl Embedding {
    pub fn new(nodes: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Embedding> {
        if nodes.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                found: vectors.len(),
            });
        }
        let dim = vectors.first().map_or(0, Vec::len);
        for (zip, v) in nodes.iter().zip(&vectors) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parameter(format!(
                    "non-finite component in vector of {zip}"
                )));
            }
        }
        Ok(Embedding { nodes, vectors })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn get(&self, zip: &str) -> Option<&[f64]> {
        self.nodes
            .iter()
            .position(|z| z == zip)
            .map(|i| self.vectors[i].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.nodes
            .iter()
            .map(String::as_str)
            .zip(self.vectors.iter().map(Vec::as_slice))
    }
}

/// Zeroes the vectors of nodes that never occur in the walk corpus and
/// returns their names.
pub fn apply_isolate_policy(
    nodes: &[String],
    counts: &[u64],
    vectors: &mut [Vec<f64>],
) -> Vec<String> {
    let mut isolated = Vec::new();
    for ((zip, &count), v) in nodes.iter().zip(counts).zip(vectors.iter_mut()) {
        if count == 0 {
            v.iter_mut().for_each(|x| *x = 0.0);
            isolated.push(zip.clone());
        }
    }
    isolated
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmbedReport {
    pub walks: usize,
    pub corpus_tokens: u64,
    /// Nodes given the zero vector because no walk visited them.
    pub isolated: Vec<String>,
    pub epoch_loss: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EmbedOptions {
    /// Walk over the undirected view of the network.
    pub symmetrize: bool,
}

/// Walks, trains and applies the isolate policy. The returned embedding has
/// one row per network node, in network order.
pub fn embed_network(
    net: &FlowNetwork,
    walk_cfg: &WalkConfig,
    train_cfg: &TrainConfig,
    opts: EmbedOptions,
) -> Result<(Embedding, EmbedReport)> {
    let sym;
    let net = if opts.symmetrize {
        sym = net.symmetrized();
        &sym
    } else {
        net
    };
    let walks = sample_walks(net, walk_cfg)?;
    let model = train_sgns(&walks, net.node_count(), train_cfg)?;
    let mut vectors: Vec<Vec<f64>> = (0..net.node_count())
        .map(|i| model.input_vector(i).to_vec())
        .collect();
    let isolated = apply_isolate_policy(net.nodes(), &model.counts, &mut vectors);
    let report = EmbedReport {
        walks: walks.len(),
        corpus_tokens: model.counts.iter().sum(),
        isolated,
        epoch_loss: model.epoch_loss,
    };
    Ok((Embedding::new(net.nodes().to_vec(), vectors)?, report))
}

/// Euclidean distance between two equal-length vectors.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Mean pairwise distance within groups vs. across groups, keyed by a label
/// per node. Returns `(intra, inter)`.
pub fn group_separation(emb: &Embedding, labels: &BTreeMap<String, usize>) -> Option<(f64, f64)> {
    let rows: Vec<(usize, &[f64])> = emb
        .iter()
        .filter_map(|(zip, v)| labels.get(zip).map(|&l| (l, v)))
        .collect();
    let (mut intra, mut n_intra, mut inter, mut n_inter) = (0.0, 0u64, 0.0, 0u64);
    for (i, (li, vi)) in rows.iter().enumerate() {
        for (lj, vj) in &rows[i + 1..] {
            let d = euclidean(vi, vj);
            if li == lj {
                intra += d;
                n_intra += 1;
            } else {
                inter += d;
                n_inter += 1;
            }
        }
    }
    (n_intra > 0 && n_inter > 0).then(|| (intra / n_intra as f64, inter / n_inter as f64))
}
