//! Multilevel modularity optimisation: seeded local moves, then coarsening.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Partition};
use crate::scalar::Real;

/// A phase stops once a full sweep improves modularity by less than this.
const PHASE_TOL: f64 = 1e-9;

/// Weighted multigraph produced by coarsening; self-loops carry the weight
/// folded inside a supernode.
struct Level<F> {
    adj: Vec<Vec<(usize, F)>>,
    strength: Vec<F>,
    two_m: F,
}

impl<F: Real> Level<F> {
    fn from_graph(graph: &Graph<F>) -> Self {
        let n = graph.num_nodes();
        let adj: Vec<Vec<(usize, F)>> = (0..n)
            .map(|u| graph.neighbors(u).iter().map(|&v| (v, F::one())).collect())
            .collect();
        let strength: Vec<F> = (0..n).map(|u| F::count(graph.degree(u))).collect();
        let two_m = F::count(2 * graph.num_edges());
        Level {
            adj,
            strength,
            two_m,
        }
    }

    fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    /// One phase of local moves. Returns the assignment (dense ids) and the
    /// total modularity gain of the phase.
    fn local_moves(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, F) {
        let n = self.num_nodes();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut comm_tot: Vec<F> = self.strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        let mut phase_gain = F::zero();
        let inv_two_m = F::one() / self.two_m;

        loop {
            order.shuffle(rng);
            let mut sweep_gain = F::zero();
            for &node in &order {
                let old = comm[node];
                comm_tot[old] -= self.strength[node];

                // weight from node to each adjacent community
                let mut links: Vec<(usize, F)> = Vec::new();
                for &(nbr, w) in &self.adj[node] {
                    let c = comm[nbr];
                    match links.iter_mut().find(|(lc, _)| *lc == c) {
                        Some((_, lw)) => *lw += w,
                        None => links.push((c, w)),
                    }
                }
                links.sort_unstable_by_key(|&(c, _)| c);

                let gain_of = |c: usize, k_ic: F| {
                    F::lit(2.0) * k_ic * inv_two_m
                        - F::lit(2.0) * comm_tot[c] * self.strength[node] * inv_two_m * inv_two_m
                };
                let stay = gain_of(
                    old,
                    links
                        .iter()
                        .find(|&&(c, _)| c == old)
                        .map_or(F::zero(), |&(_, w)| w),
                );
                let mut best_comm = old;
                let mut best_gain = stay;
                for &(c, k_ic) in &links {
                    if c == old {
                        continue;
                    }
                    let g = gain_of(c, k_ic);
                    if g > best_gain {
                        best_gain = g;
                        best_comm = c;
                    }
                }
                comm[node] = best_comm;
                comm_tot[best_comm] += self.strength[node];
                sweep_gain += best_gain - stay;
            }
            phase_gain += sweep_gain;
            if sweep_gain <= F::lit(PHASE_TOL) {
                break;
            }
        }
        // compact ids in ascending first-use order
        let mut remap = vec![usize::MAX; n];
        let mut next = 0;
        for slot in comm.iter_mut() {
            let c = *slot;
            if remap[c] == usize::MAX {
                remap[c] = next;
                next += 1;
            }
            *slot = remap[c];
        }
        (comm, phase_gain)
    }

    fn quotient(&self, comm: &[usize], num_comms: usize) -> Level<F> {
        let mut maps: Vec<std::collections::BTreeMap<usize, F>> =
            vec![std::collections::BTreeMap::new(); num_comms];
        let mut strength = vec![F::zero(); num_comms];
        for u in 0..self.num_nodes() {
            let cu = comm[u];
            strength[cu] += self.strength[u];
            for &(v, w) in &self.adj[u] {
                let cv = comm[v];
                if cu != cv {
                    *maps[cu].entry(cv).or_insert(F::zero()) += w;
                }
                // intra edges disappear into supernode strength, which
                // already counts them via the endpoint strengths
            }
        }
        let adj: Vec<Vec<(usize, F)>> = maps
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        Level {
            adj,
            strength,
            two_m: self.two_m,
        }
    }
}

/// Seeded multilevel modularity optimisation. Node visit order is shuffled
/// every sweep; all other tie-breaks are by ascending community id.
pub fn louvain<F: Real>(graph: &Graph<F>, seed: u64) -> Partition {
    let n = graph.num_nodes();
    if graph.num_edges() == 0 {
        return Partition::singletons(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = Level::from_graph(graph);
    loop {
        let (comm, gain) = level.local_moves(&mut rng);
        let num_comms = comm.iter().copied().max().map_or(0, |m| m + 1);
        if num_comms == level.num_nodes() || gain <= F::lit(PHASE_TOL) {
            break;
        }
        for l in membership.iter_mut() {
            *l = comm[*l];
        }
        level = level.quotient(&comm, num_comms);
    }
    Partition::from_labels(&membership)
}

#[cfg(test)]
mod tests {
    use super::super::{modularity, test_support::bridged_triangles};
    use super::*;
    use crate::datasets::load_bundled;

    fn complete(n: usize) -> Graph<f64> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn two_cliques_with_a_bridge_split_in_two() {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in (i + 1)..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((4, 5));
        let g = Graph::<f64>::from_edges(10, &edges).unwrap();
        for seed in 0..5 {
            let p = louvain(&g, seed);
            assert_eq!(p.num_communities(), 2, "seed {seed}");
            assert_eq!(p.label_of(0), p.label_of(4));
            assert_eq!(p.label_of(5), p.label_of(9));
        }
    }

    #[test]
    fn complete_graph_collapses_to_one() {
        let g = complete(8);
        for seed in 0..5 {
            assert_eq!(louvain(&g, seed).num_communities(), 1);
        }
    }

    #[test]
    fn bridged_triangles_split() {
        let g = bridged_triangles();
        let p = louvain(&g, 3);
        assert_eq!(p.num_communities(), 2);
    }

    #[test]
    fn karate_modal_community_count_is_four() {
        let ds = load_bundled::<f64>("karate").unwrap();
        let mut counts = std::collections::HashMap::new();
        for seed in 0..20 {
            let p = louvain(&ds.graph, seed);
            let q = modularity(&ds.graph, &p).unwrap();
            assert!(q > 0.3, "seed {seed}: Q = {q}");
            *counts.entry(p.num_communities()).or_insert(0) += 1;
        }
        let modal = counts.iter().max_by_key(|&(_, c)| c).unwrap();
        assert_eq!(*modal.0, 4, "distribution: {counts:?}");
    }

    #[test]
    fn deterministic_per_seed() {
        let ds = load_bundled::<f64>("karate").unwrap();
        assert_eq!(louvain(&ds.graph, 7), louvain(&ds.graph, 7));
    }
}
