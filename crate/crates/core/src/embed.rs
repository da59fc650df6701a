//! Skip-gram negative sampling over walk corpora, with optional
//! community-weighted co-occurrence pairs.
//!
//! When a seed partition is supplied, a positive pair whose endpoints share a
//! community trains with weight `alpha` and a cross-community pair with
//! `1 - alpha`; the weight scales the loss and its gradient (pairs are never
//! duplicated, and zero-weight pairs are dropped). Negative samples always
//! train with weight 1.

use std::io;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, NodeId, Partition};
use crate::scalar::Real;
use crate::walk::WalkCorpus;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("partition covers {0} nodes but the corpus spans {1}")]
    PartitionMismatch(usize, usize),
    #[error("corpus token {0} is out of range for {1} nodes")]
    BadToken(NodeId, usize),
    #[error("alpha must lie in [0, 1], got {0}")]
    BadAlpha(f64),
    #[error("embedding dimension must be positive")]
    ZeroDim,
    #[error("vector lengths differ: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("non-finite input to the loss")]
    NonFiniteInput,
    #[error("training diverged: non-finite loss in epoch {0}")]
    Diverged(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct SgnsParams<F: Real> {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Start learning rate; decays linearly to `1e-4` of itself.
    pub learning_rate: F,
    /// Same-community pair weight; cross-community pairs get `1 - alpha`.
    pub alpha: F,
    pub seed: u64,
}

impl<F: Real> Default for SgnsParams<F> {
    fn default() -> Self {
        SgnsParams {
            dim: 128,
            window: 10,
            negatives: 5,
            epochs: 5,
            learning_rate: F::lit(0.025),
            alpha: F::lit(0.8),
            seed: 0,
        }
    }
}

/// One weighted positive co-occurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingPair<F: Real> {
    pub center: NodeId,
    pub context: NodeId,
    pub weight: F,
}

/// Input and output parameter matrices; `in_vectors` rows are the node
/// embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<F: Real> {
    dim: usize,
    in_vectors: Vec<F>,
    out_vectors: Vec<F>,
}

impl<F: Real> Embedding<F> {
    pub fn num_nodes(&self) -> usize {
        self.in_vectors.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, node: NodeId) -> &[F] {
        &self.in_vectors[node * self.dim..(node + 1) * self.dim]
    }

    pub fn out_vector(&self, node: NodeId) -> &[F] {
        &self.out_vectors[node * self.dim..(node + 1) * self.dim]
    }

    /// `num_nodes dim` header, then one `orig_id v1 .. vd` line per node.
    pub fn write_text<W: io::Write>(&self, graph: &Graph<F>, out: &mut W) -> io::Result<()> {
        writeln!(out, "{} {}", self.num_nodes(), self.dim)?;
        for node in 0..self.num_nodes() {
            let mut line = graph.orig_id(node).to_string();
            for v in self.vector(node) {
                line.push(' ');
                line.push_str(&format!("{v}"));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn pair_weight<F: Real>(partition: Option<&Partition>, alpha: F, a: NodeId, b: NodeId) -> F {
    match partition {
        None => F::one(),
        Some(p) => {
            if p.label_of(a) == p.label_of(b) {
                alpha
            } else {
                F::one() - alpha
            }
        }
    }
}

fn validate_corpus_and_partition<F: Real>(
    corpus: &WalkCorpus,
    partition: Option<&Partition>,
    alpha: F,
) -> Result<(), EmbedError> {
    let n = corpus.num_nodes();
    if !(alpha >= F::zero() && alpha <= F::one()) {
        return Err(EmbedError::BadAlpha(alpha.to_f64().unwrap_or(f64::NAN)));
    }
    if let Some(p) = partition {
        if p.num_nodes() != n {
            return Err(EmbedError::PartitionMismatch(p.num_nodes(), n));
        }
    }
    for walk in corpus.walks() {
        for &t in walk {
            if t >= n {
                return Err(EmbedError::BadToken(t, n));
            }
        }
    }
    Ok(())
}

/// Streams the window co-occurrences of the corpus in corpus order. Pairs
/// with equal endpoints (a walk revisiting a node inside the window) and
/// pairs whose weight is zero are dropped.
pub fn build_pairs<'a, F: Real>(
    corpus: &'a WalkCorpus,
    window: usize,
    partition: Option<&'a Partition>,
    alpha: F,
) -> Result<impl Iterator<Item = TrainingPair<F>> + 'a, EmbedError> {
    validate_corpus_and_partition(corpus, partition, alpha)?;
    let iter = corpus.walks().iter().flat_map(move |walk| {
        (0..walk.len()).flat_map(move |i| {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(walk.len() - 1);
            (lo..=hi).filter_map(move |j| {
                if j == i || walk[i] == walk[j] {
                    return None;
                }
                let weight = pair_weight(partition, alpha, walk[i], walk[j]);
                if weight == F::zero() {
                    return None;
                }
                Some(TrainingPair {
                    center: walk[i],
                    context: walk[j],
                    weight,
                })
            })
        })
    });
    Ok(iter)
}

fn softplus<F: Real>(z: F) -> F {
    if z > F::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid<F: Real>(z: F) -> F {
    F::one() / (F::one() + (-z).exp())
}

/// Loss and gradients of one weighted logistic term:
/// `-weight * [y ln s(u.v) + (1-y) ln s(-u.v)]` for label `y`.
/// Returns `(loss, grad_center, grad_context)`.
pub fn sgns_loss_grad<F: Real>(
    center: &[F],
    context: &[F],
    positive: bool,
    weight: F,
) -> Result<(F, Vec<F>, Vec<F>), EmbedError> {
    if center.len() != context.len() {
        return Err(EmbedError::DimMismatch(center.len(), context.len()));
    }
    if center
        .iter()
        .chain(context)
        .any(|v| !v.is_finite())
        || !weight.is_finite()
    {
        return Err(EmbedError::NonFiniteInput);
    }
    let dot = center
        .iter()
        .zip(context)
        .map(|(&a, &b)| a * b)
        .sum::<F>();
    let y = if positive { F::one() } else { F::zero() };
    // -ln s(dot) = softplus(-dot); -ln s(-dot) = softplus(dot)
    let loss = weight * if positive { softplus(-dot) } else { softplus(dot) };
    let coeff = weight * (sigmoid(dot) - y);
    let grad_center: Vec<F> = context.iter().map(|&v| coeff * v).collect();
    let grad_context: Vec<F> = center.iter().map(|&v| coeff * v).collect();
    Ok((loss, grad_center, grad_context))
}

#[derive(Debug, Clone)]
pub struct TrainOutput<F: Real> {
    pub embedding: Embedding<F>,
    /// Summed loss per epoch (positives plus negatives).
    pub epoch_loss: Vec<F>,
}

/// Single-threaded SGD over the shuffled pair multiset; bitwise reproducible
/// for a given corpus, partition, and parameter set.
pub fn train<F: Real>(
    corpus: &WalkCorpus,
    partition: Option<&Partition>,
    params: &SgnsParams<F>,
) -> Result<TrainOutput<F>, EmbedError> {
    if params.dim == 0 {
        return Err(EmbedError::ZeroDim);
    }
    let n = corpus.num_nodes();
    let dim = params.dim;
    let pairs: Vec<TrainingPair<F>> =
        build_pairs(corpus, params.window, partition, params.alpha)?.collect();

    // unigram counts raised to 3/4, cumulative for inverse-CDF sampling
    let mut counts = vec![0usize; n];
    for walk in corpus.walks() {
        for &t in walk {
            counts[t] += 1;
        }
    }
    let mut cum = Vec::with_capacity(n);
    let mut acc = 0.0f64;
    for &c in &counts {
        acc += (c as f64).powf(0.75);
        cum.push(acc);
    }
    let total_mass = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let scale = F::lit(0.5) / F::count(dim);
    let mut in_vectors: Vec<F> = (0..n * dim)
        .map(|_| F::lit(rng.random::<f64>() * 2.0 - 1.0) * scale)
        .collect();
    let mut out_vectors = vec![F::zero(); n * dim];

    let total_updates = (pairs.len() * params.epochs).max(1);
    let lr_floor = params.learning_rate * F::lit(1e-4);
    let mut processed = 0usize;

    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut neu1e = vec![F::zero(); dim];
    let mut epoch_loss = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = F::zero();
        for &idx in &order {
            let pair = pairs[idx];
            let lr = (params.learning_rate
                * (F::one() - F::count(processed) / F::count(total_updates)))
            .max(lr_floor);
            processed += 1;

            let cbase = pair.center * dim;
            neu1e.iter_mut().for_each(|v| *v = F::zero());

            // positive target, then `negatives` unigram draws at weight 1;
            // a draw that hits the positive context is skipped
            for k in 0..=params.negatives {
                let (target, label, w) = if k == 0 {
                    (pair.context, F::one(), pair.weight)
                } else {
                    let r = rng.random::<f64>() * total_mass;
                    let t = cum.partition_point(|&c| c <= r).min(n - 1);
                    if t == pair.context {
                        continue;
                    }
                    (t, F::zero(), F::one())
                };
                let tbase = target * dim;
                let mut dot = F::zero();
                for d in 0..dim {
                    dot += in_vectors[cbase + d] * out_vectors[tbase + d];
                }
                loss_sum += w * if label == F::one() {
                    softplus(-dot)
                } else {
                    softplus(dot)
                };
                let g = w * (label - sigmoid(dot)) * lr;
                for d in 0..dim {
                    neu1e[d] += g * out_vectors[tbase + d];
                    out_vectors[tbase + d] += g * in_vectors[cbase + d];
                }
            }
            for d in 0..dim {
                in_vectors[cbase + d] += neu1e[d];
            }
        }
        if !loss_sum.is_finite() {
            return Err(EmbedError::Diverged(epoch));
        }
        epoch_loss.push(loss_sum);
    }
    Ok(TrainOutput {
        embedding: Embedding {
            dim,
            in_vectors,
            out_vectors,
        },
        epoch_loss,
    })
}
