//! Second-order biased random walks and corpus generation.
//!
//! Three walk modes share one sampler: `Uniform` ignores weights entirely,
//! `Pq` applies the return/in-out biases `1/p`, `1`, `1/q` over the graph's
//! edge weights, and `MerwPq` applies the same biases over the entropy-
//! maximising weights `psi(u) * psi(v)`. With `p = q = 1`, `MerwPq` is
//! exactly the maximal-entropy walk.

mod spectral;

use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use spectral::{
    leading_eigenpair, merw_reweight, EigenPair, SpectralError, EIGEN_MAX_ITER, EIGEN_TOL,
};

use crate::graph::{Graph, NodeId};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("node {0} is isolated; walks from it are undefined")]
    IsolatedNode(NodeId),
    #[error("node {next} is not adjacent to {curr}")]
    NotAdjacent { curr: NodeId, next: NodeId },
    #[error("previous node {prev} is not adjacent to current node {curr}")]
    BadPrev { prev: NodeId, curr: NodeId },
    #[error("walk biases must be positive and finite (p = {p}, q = {q})")]
    BadBias { p: f64, q: f64 },
    #[error("MERW-weighted transitions need the dominant eigenpair")]
    MissingEigenpair,
    #[error("walk_len must be at least 1")]
    EmptyWalk,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkMode {
    Uniform,
    Pq,
    MerwPq,
}

#[derive(Debug, Clone, Copy)]
pub struct WalkParams<F: Real> {
    pub mode: WalkMode,
    pub p: F,
    pub q: F,
    pub walk_len: usize,
    pub walks_per_node: usize,
    pub seed: u64,
}

impl<F: Real> Default for WalkParams<F> {
    fn default() -> Self {
        WalkParams {
            mode: WalkMode::Pq,
            p: F::one(),
            q: F::one(),
            walk_len: 80,
            walks_per_node: 10,
            seed: 0,
        }
    }
}

impl<F: Real> WalkParams<F> {
    fn validate(&self) -> Result<(), WalkError> {
        let (p, q) = (self.p, self.q);
        if !p.is_finite() || !q.is_finite() || p <= F::zero() || q <= F::zero() {
            return Err(WalkError::BadBias {
                p: p.to_f64().unwrap_or(f64::NAN),
                q: q.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.walk_len == 0 {
            return Err(WalkError::EmptyWalk);
        }
        Ok(())
    }
}

/// Node sequences, `walks_per_node` starting from every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    walks: Vec<Vec<NodeId>>,
    num_nodes: usize,
}

impl WalkCorpus {
    pub fn walks(&self) -> &[Vec<NodeId>] {
        &self.walks
    }

    pub fn num_walks(&self) -> usize {
        self.walks.len()
    }

    /// Node count of the generating graph.
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn total_tokens(&self) -> usize {
        self.walks.iter().map(|w| w.len()).sum()
    }

    /// One walk per line, space-separated external ids.
    pub fn write_text<F: Real, W: io::Write>(
        &self,
        graph: &Graph<F>,
        out: &mut W,
    ) -> io::Result<()> {
        for walk in &self.walks {
            let line: Vec<String> = walk.iter().map(|&v| graph.orig_id(v).to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Test-support constructor for hand-built corpora.
    pub fn from_walks(num_nodes: usize, walks: Vec<Vec<NodeId>>) -> Self {
        WalkCorpus { walks, num_nodes }
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Each walk draws from its own stream so corpus content is independent of
/// scheduling and thread count.
fn walk_seed(seed: u64, start: NodeId, walk_index: usize) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(start as u64)) ^ walk_index as u64)
}

fn effective_weight<F: Real>(
    graph: &Graph<F>,
    mode: WalkMode,
    psi: Option<&[F]>,
    curr: NodeId,
    idx: usize,
    next: NodeId,
) -> F {
    match mode {
        WalkMode::Uniform => F::one(),
        WalkMode::Pq => graph.neighbor_weights(curr).map_or(F::one(), |w| w[idx]),
        WalkMode::MerwPq => {
            let psi = psi.expect("checked before sampling");
            psi[curr] * psi[next]
        }
    }
}

fn bias<F: Real>(graph: &Graph<F>, params: &WalkParams<F>, prev: Option<NodeId>, next: NodeId) -> F {
    if params.mode == WalkMode::Uniform {
        return F::one();
    }
    match prev {
        None => F::one(),
        Some(p) if next == p => F::one() / params.p,
        Some(p) if graph.has_edge(p, next) => F::one(),
        Some(_) => F::one() / params.q,
    }
}

/// Probability of stepping `curr -> next` given the walker came from `prev`
/// (`None` means the first step of a walk). `eig` is required in `MerwPq`
/// mode and ignored otherwise.
pub fn transition_prob<F: Real>(
    graph: &Graph<F>,
    prev: Option<NodeId>,
    curr: NodeId,
    next: NodeId,
    params: &WalkParams<F>,
    eig: Option<&EigenPair<F>>,
) -> Result<F, WalkError> {
    params.validate()?;
    if graph.degree(curr) == 0 {
        return Err(WalkError::IsolatedNode(curr));
    }
    if !graph.has_edge(curr, next) {
        return Err(WalkError::NotAdjacent { curr, next });
    }
    if let Some(p) = prev {
        if !graph.has_edge(p, curr) {
            return Err(WalkError::BadPrev { prev: p, curr });
        }
    }
    let psi = match params.mode {
        WalkMode::MerwPq => {
            let e = eig.ok_or(WalkError::MissingEigenpair)?;
            if e.psi.len() != graph.num_nodes() {
                return Err(SpectralError::SizeMismatch(e.psi.len(), graph.num_nodes()).into());
            }
            Some(e.psi.as_slice())
        }
        _ => None,
    };
    let prev = if params.mode == WalkMode::Uniform { None } else { prev };
    let mut total = F::zero();
    let mut numer = F::zero();
    for (idx, &x) in graph.neighbors(curr).iter().enumerate() {
        let s = effective_weight(graph, params.mode, psi, curr, idx, x)
            * bias(graph, params, prev, x);
        total += s;
        if x == next {
            numer = s;
        }
    }
    Ok(numer / total)
}

fn sample_walk<F: Real>(
    graph: &Graph<F>,
    params: &WalkParams<F>,
    psi: Option<&[F]>,
    start: NodeId,
    rng: &mut ChaCha8Rng,
    scores: &mut Vec<F>,
) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(params.walk_len);
    walk.push(start);
    let mut prev: Option<NodeId> = None;
    let mut curr = start;
    for _ in 1..params.walk_len {
        let nbrs = graph.neighbors(curr);
        scores.clear();
        let mut total = F::zero();
        for (idx, &x) in nbrs.iter().enumerate() {
            let s = effective_weight(graph, params.mode, psi, curr, idx, x)
                * bias(graph, params, prev, x);
            total += s;
            scores.push(s);
        }
        let r = F::lit(rng.random::<f64>()) * total;
        let mut acc = F::zero();
        let mut next = nbrs[nbrs.len() - 1];
        for (idx, &s) in scores.iter().enumerate() {
            acc += s;
            if r < acc {
                next = nbrs[idx];
                break;
            }
        }
        walk.push(next);
        prev = Some(curr);
        curr = next;
    }
    walk
}

/// Samples `walks_per_node` walks of `walk_len` nodes from every node.
/// `MerwPq` mode extracts the dominant eigenpair internally, so it inherits
/// the connectivity requirement; the other modes only need every node to
/// have at least one neighbour.
pub fn generate_corpus<F: Real>(
    graph: &Graph<F>,
    params: &WalkParams<F>,
) -> Result<WalkCorpus, WalkError> {
    params.validate()?;
    let n = graph.num_nodes();
    for u in 0..n {
        if graph.degree(u) == 0 {
            return Err(WalkError::IsolatedNode(u));
        }
    }
    let eig_storage;
    let psi: Option<&[F]> = match params.mode {
        WalkMode::MerwPq => {
            eig_storage = leading_eigenpair(graph, F::lit(EIGEN_TOL), EIGEN_MAX_ITER)?;
            Some(eig_storage.psi.as_slice())
        }
        _ => None,
    };
    let walks: Vec<Vec<NodeId>> = (0..n * params.walks_per_node)
        .into_par_iter()
        .map_init(
            || Vec::new(),
            |scores, i| {
                let start = i / params.walks_per_node;
                let widx = i % params.walks_per_node;
                let mut rng = ChaCha8Rng::seed_from_u64(walk_seed(params.seed, start, widx));
                sample_walk(graph, params, psi, start, &mut rng, scores)
            },
        )
        .collect();
    Ok(WalkCorpus {
        walks,
        num_nodes: n,
    })
}
