//! Combinatorial community detection: modularity plus three partitioners
//! (greedy agglomeration, multilevel local moves, label propagation).
//!
//! All three score or operate on the unweighted structure of the graph; edge
//! weights attached for walk biasing are deliberately ignored here.

mod cnm;
mod louvain;
mod lpa;

use thiserror::Error;

pub use cnm::cnm;
pub use louvain::louvain;
pub use lpa::{lpa, LpaOutcome, LPA_MAX_SWEEPS};

use crate::graph::{Graph, Partition};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum CommunityError {
    #[error("partition covers {0} nodes but the graph has {1}")]
    SizeMismatch(usize, usize),
}

/// Newman modularity of a disjoint partition, in the per-community aggregate
/// form `sum_c [ e_c/|E| - (d_c / 2|E|)^2 ]` with `e_c` the intra-community
/// edge count and `d_c` the degree sum.
pub fn modularity<F: Real>(graph: &Graph<F>, partition: &Partition) -> Result<F, CommunityError> {
    let n = graph.num_nodes();
    if partition.num_nodes() != n {
        return Err(CommunityError::SizeMismatch(partition.num_nodes(), n));
    }
    let m = graph.num_edges();
    if m == 0 {
        return Ok(F::zero());
    }
    let k = partition.num_communities();
    let mut intra = vec![0usize; k];
    let mut deg_sum = vec![0usize; k];
    for u in 0..n {
        let cu = partition.label_of(u);
        deg_sum[cu] += graph.degree(u);
        for &v in graph.neighbors(u) {
            if u < v && partition.label_of(v) == cu {
                intra[cu] += 1;
            }
        }
    }
    let edges = F::count(m);
    let two_edges = F::count(2 * m);
    let mut q = F::zero();
    for c in 0..k {
        let cover = F::count(intra[c]) / edges;
        let expected = F::count(deg_sum[c]) / two_edges;
        q += cover - expected * expected;
    }
    Ok(q)
}
