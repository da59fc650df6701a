//! Greedy modularity agglomeration from singletons.

use std::collections::BTreeMap;

use crate::graph::{Graph, Partition};
use crate::scalar::Real;

/// Merges the community pair with the largest positive modularity gain until
/// no merge improves modularity. Deterministic: exact gain ties go to the
/// lexicographically smallest community-id pair, and only connected pairs are
/// candidates (merging disconnected communities never gains).
pub fn cnm<F: Real>(graph: &Graph<F>) -> Partition {
    let n = graph.num_nodes();
    let m = graph.num_edges();
    if m == 0 {
        return Partition::singletons(n);
    }
    let edges_f = F::count(m);
    let two_e = F::count(2 * m);

    // communities start as singletons named by node id; merges keep the
    // smaller id so pair keys stay stable
    let mut comm_of: Vec<usize> = (0..n).collect();
    let mut deg_sum: Vec<F> = (0..n).map(|u| F::count(graph.degree(u))).collect();
    let mut between: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for u in 0..n {
        for &v in graph.neighbors(u) {
            if u < v {
                *between.entry((u, v)).or_insert(0) += 1;
            }
        }
    }

    loop {
        let mut best: Option<((usize, usize), F)> = None;
        for (&(i, j), &e_ij) in &between {
            let dq = F::count(e_ij) / edges_f
                - F::lit(2.0) * (deg_sum[i] / two_e) * (deg_sum[j] / two_e);
            // strict improvement required; BTreeMap order makes the first
            // maximal pair the lexicographically smallest
            if dq > F::zero() && best.is_none_or(|(_, b)| dq > b) {
                best = Some(((i, j), dq));
            }
        }
        let Some(((i, j), _)) = best else { break };

        // fold j into i
        deg_sum[i] = deg_sum[i] + deg_sum[j];
        let mut moved: Vec<((usize, usize), usize)> = Vec::new();
        between.retain(|&(a, b), &mut e| {
            if a == j || b == j {
                let other = if a == j { b } else { a };
                if other != i {
                    moved.push(((other.min(i), other.max(i)), e));
                }
                false
            } else {
                true
            }
        });
        for (key, e) in moved {
            *between.entry(key).or_insert(0) += e;
        }
        for c in comm_of.iter_mut() {
            if *c == j {
                *c = i;
            }
        }
    }
    Partition::from_labels(&comm_of)
}
