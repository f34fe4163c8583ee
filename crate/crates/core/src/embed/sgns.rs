//! Skip-gram with negative sampling over a walk corpus.
//!
//! Each node has an input ("v") vector and a context ("u") vector. For every
//! (center, context) pair within `window` positions of each other, the loss
//!
//! ```text
//! L = -log σ(u_ctx · v_ctr) - Σ_n log σ(-u_n · v_ctr)
//! ```
//!
//! is reduced by one SGD step, with negatives drawn from the corpus node
//! frequencies raised to 3/4. Only the input vectors are returned.

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    /// Context radius in walk positions.
    pub window: usize,
    /// Negative samples per positive pair.
    pub negatives: usize,
    pub epochs: usize,
    pub lr_initial: f64,
    /// Learning rate reached at the last pair; decay is linear.
    pub lr_min: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 10,
            window: 10,
            negatives: 5,
            epochs: 5,
            lr_initial: 0.025,
            lr_min: 0.0001,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.dim >= 1, "dim must be >= 1"),
            (self.window >= 1, "window must be >= 1"),
            (self.negatives >= 1, "negatives must be >= 1"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (
                self.lr_initial.is_finite() && self.lr_initial > 0.0,
                "lr_initial must be > 0",
            ),
            (
                self.lr_min.is_finite() && self.lr_min >= 0.0 && self.lr_min <= self.lr_initial,
                "lr_min must lie in [0, lr_initial]",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Parameter(msg.to_string())),
            None => Ok(()),
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log σ(x), stable for large |x|.
fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// dL/d(u·v) for a target with label 1 (context) or 0 (negative).
fn dloss_ddot(label: f64, score: f64) -> f64 {
    sigmoid(score) - label
}

/// `(dL/d(u·v), L)` for one target, sharing a single exponential.
fn target_terms(label: f64, score: f64) -> (f64, f64) {
    let e = (-score.abs()).exp();
    let sig = if score >= 0.0 {
        1.0 / (1.0 + e)
    } else {
        e / (1.0 + e)
    };
    // -log σ(s) = softplus(-s) and -log σ(-s) = softplus(s)
    let x = if label > 0.0 { -score } else { score };
    (sig - label, x.max(0.0) + e.ln_1p())
}

/// Loss of one (center, context, negatives) triple.
pub fn pair_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let pos = -log_sigmoid(dot(context, center));
    let neg: f64 = negatives
        .iter()
        .map(|u| -log_sigmoid(-dot(u, center)))
        .sum();
    pos + neg
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    /// One entry per negative, in input order.
    pub negatives: Vec<Vec<f64>>,
}

/// Analytic gradient of [`pair_loss`] with respect to every vector involved.
pub fn pair_gradient(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> PairGradient {
    let d = center.len();
    let mut g_center = vec![0.0; d];
    let targets = std::iter::once((context, 1.0)).chain(negatives.iter().map(|u| (*u, 0.0)));
    let mut g_targets = Vec::with_capacity(negatives.len() + 1);
    for (u, label) in targets {
        let g = dloss_ddot(label, dot(u, center));
        for k in 0..d {
            g_center[k] += g * u[k];
        }
        g_targets.push(center.iter().map(|v| g * v).collect::<Vec<f64>>());
    }
    let context = g_targets.remove(0);
    PairGradient {
        center: g_center,
        context,
        negatives: g_targets,
    }
}

/// Trained skip-gram parameters, rows indexed by node.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipGram {
    pub dim: usize,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    /// Occurrences of each node in the corpus.
    pub counts: Vec<u64>,
    /// Mean pair loss per epoch, measured before each update.
    pub epoch_loss: Vec<f64>,
}

impl SkipGram {
    pub fn input_vector(&self, node: usize) -> &[f64] {
        &self.input[node * self.dim..(node + 1) * self.dim]
    }

    pub fn output_vector(&self, node: usize) -> &[f64] {
        &self.output[node * self.dim..(node + 1) * self.dim]
    }
}

fn window_pairs(walks: &[Vec<usize>], window: usize) -> u64 {
    walks
        .iter()
        .map(|w| {
            let n = w.len();
            (0..n)
                .map(|i| (i.saturating_sub(window)..(i + window + 1).min(n)).len() as u64 - 1)
                .sum::<u64>()
        })
        .sum()
}

/// Trains on `walks`, whose entries are node indices in `0..num_nodes`.
/// Single-threaded and deterministic given `cfg.seed`.
pub fn train_sgns(walks: &[Vec<usize>], num_nodes: usize, cfg: &TrainConfig) -> Result<SkipGram> {
    cfg.validate()?;
    if walks.iter().all(Vec::is_empty) {
        return Err(Error::Empty("walk corpus".into()));
    }
    let mut counts = vec![0u64; num_nodes];
    for &node in walks.iter().flatten() {
        *counts.get_mut(node).ok_or(Error::Vocabulary(node))? += 1;
    }

    let d = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = 0.5 / d as f64;
    let mut input: Vec<f64> = (0..num_nodes * d)
        .map(|_| rng.random_range(-half..half))
        .collect();
    let mut output = vec![0.0; num_nodes * d];

    let noise_weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let noise = WeightedAliasIndex::new(noise_weights)
        .map_err(|e| Error::Parameter(format!("negative-sampling table: {e}")))?;

    let total_pairs = window_pairs(walks, cfg.window) * cfg.epochs as u64;
    let mut processed = 0u64;
    let mut grad_center = vec![0.0; d];
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        let mut loss = 0.0;
        let mut pairs = 0u64;
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window + 1).min(walk.len());
                for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    let progress = processed as f64 / total_pairs.max(1) as f64;
                    let lr = cfg.lr_initial - (cfg.lr_initial - cfg.lr_min) * progress;
                    processed += 1;
                    pairs += 1;

                    let v = &input[center * d..(center + 1) * d];
                    grad_center.iter_mut().for_each(|g| *g = 0.0);
                    for n in 0..=cfg.negatives {
                        let (target, label) = if n == 0 {
                            (context, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let u = &mut output[target * d..(target + 1) * d];
                        let (g, l) = target_terms(label, dot(v, u));
                        loss += l;
                        for ((gc, uk), vk) in grad_center.iter_mut().zip(u.iter_mut()).zip(v) {
                            *gc += g * *uk;
                            *uk -= lr * g * vk;
                        }
                    }
                    let v = &mut input[center * d..(center + 1) * d];
                    for (vk, gc) in v.iter_mut().zip(&grad_center) {
                        *vk -= lr * gc;
                    }
                }
            }
        }
        epoch_loss.push(if pairs > 0 { loss / pairs as f64 } else { 0.0 });
    }

    Ok(SkipGram {
        dim: d,
        input,
        output,
        counts,
        epoch_loss,
    })
}
