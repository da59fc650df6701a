//! Synthetic benchmark graphs with planted communities and tunable mixing.
//!
//! Degrees follow a truncated power law, community sizes another, and each
//! node splits its degree into an internal part kept inside its community
//! and an external part wired across communities. The mixing parameter `mu`
//! is the external fraction: `mu = 0` gives fully separated communities
//! (and therefore a disconnected graph), larger values blur the boundaries.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

use crate::graph::{Graph, GroundTruthCover, NodeId, Partition};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum LfrError {
    #[error("bad parameter: {0}")]
    BadParams(String),
    #[error("generation failed: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, Copy)]
pub struct LfrParams {
    pub n: usize,
    /// Degree distribution exponent.
    pub tau1: f64,
    /// Community size distribution exponent.
    pub tau2: f64,
    /// External fraction of each node's degree, in [0, 1].
    pub mu: f64,
    pub k_avg: f64,
    pub k_max: usize,
    pub c_min: usize,
    pub c_max: usize,
    pub seed: u64,
}

impl Default for LfrParams {
    fn default() -> Self {
        LfrParams {
            n: 1000,
            tau1: 2.0,
            tau2: 1.0,
            mu: 0.3,
            k_avg: 8.0,
            k_max: 50,
            c_min: 5,
            c_max: 100,
            seed: 0,
        }
    }
}

impl LfrParams {
    fn validate(&self) -> Result<(), LfrError> {
        if self.n == 0 {
            return Err(LfrError::BadParams("n must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(LfrError::BadParams(format!(
                "mu must lie in [0, 1], got {}",
                self.mu
            )));
        }
        if self.c_min == 0 || self.c_min > self.c_max {
            return Err(LfrError::BadParams(format!(
                "need 0 < c_min <= c_max, got {}..{}",
                self.c_min, self.c_max
            )));
        }
        if self.n < self.c_min {
            return Err(LfrError::BadParams(format!(
                "n = {} cannot fit a community of at least {}",
                self.n, self.c_min
            )));
        }
        if self.k_max < 1 || self.k_avg < 1.0 || self.k_avg >= self.k_max as f64 {
            return Err(LfrError::BadParams(format!(
                "need 1 <= k_avg < k_max, got k_avg {} k_max {}",
                self.k_avg, self.k_max
            )));
        }
        if self.k_max >= self.n {
            return Err(LfrError::BadParams(format!(
                "k_max = {} needs more than {} nodes",
                self.k_max, self.n
            )));
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over `{lo, .., hi}` with mass proportional to
/// `x^-tau`.
struct PowerLaw {
    lo: usize,
    cum: Vec<f64>,
}

impl PowerLaw {
    fn new(lo: usize, hi: usize, tau: f64) -> Self {
        let mut cum = Vec::with_capacity(hi - lo + 1);
        let mut acc = 0.0;
        for x in lo..=hi {
            acc += (x as f64).powf(-tau);
            cum.push(acc);
        }
        PowerLaw { lo, cum }
    }

    fn mean(&self) -> f64 {
        let total = *self.cum.last().unwrap();
        let mut prev = 0.0;
        let mut m = 0.0;
        for (i, &c) in self.cum.iter().enumerate() {
            m += (self.lo + i) as f64 * (c - prev);
            prev = c;
        }
        m / total
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let r = rng.random::<f64>() * self.cum.last().unwrap();
        self.lo + self.cum.partition_point(|&c| c <= r)
    }
}

/// Picks the lower cutoff whose distribution mean lands closest to the
/// requested average degree.
fn choose_k_min(k_avg: f64, k_max: usize, tau1: f64) -> usize {
    let mut best = (f64::INFINITY, 1);
    for k_min in 1..=k_max {
        let mean = PowerLaw::new(k_min, k_max, tau1).mean();
        let err = (mean - k_avg).abs();
        if err < best.0 {
            best = (err, k_min);
        }
    }
    best.1
}

fn sample_degrees(params: &LfrParams, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let k_min = choose_k_min(params.k_avg, params.k_max, params.tau1);
    let law = PowerLaw::new(k_min, params.k_max, params.tau1);
    let mut degrees: Vec<usize> = (0..params.n).map(|_| law.sample(rng)).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        // stub parity fix
        loop {
            let v = rng.random_range(0..params.n);
            if degrees[v] < params.k_max {
                degrees[v] += 1;
                break;
            }
        }
    }
    degrees
}

fn sample_community_sizes(params: &LfrParams, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let law = PowerLaw::new(params.c_min, params.c_max.min(params.n), params.tau2);
    let mut sizes = Vec::new();
    let mut total = 0usize;
    while total < params.n {
        let s = law.sample(rng);
        sizes.push(s);
        total += s;
    }
    let mut excess = total - params.n;
    // shave the excess off the final draw, then borrow from the larger
    // communities if that draw bottoms out at the minimum size
    while excess > 0 {
        let take = excess.min(*sizes.last().unwrap() - params.c_min);
        let last = sizes.len() - 1;
        sizes[last] -= take;
        excess -= take;
        if excess > 0 {
            let (idx, _) = sizes
                .iter()
                .enumerate()
                .max_by_key(|&(_, &s)| s)
                .unwrap();
            let take = excess.min(sizes[idx] - params.c_min);
            if take == 0 {
                // every community already at c_min: retire one and restart
                // the shave with its mass folded into the excess
                let dropped = sizes.pop().unwrap();
                excess += dropped;
                continue;
            }
            sizes[idx] -= take;
            excess -= take;
        }
    }
    sizes.shuffle(rng);
    sizes
}

/// Assigns nodes to communities at random without exceeding community
/// capacity, preferring communities large enough to absorb each node's
/// internal degree. Returns (membership, clamped internal degrees).
fn assign_members(
    degrees: &[usize],
    internal: &[usize],
    sizes: &[usize],
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let n = degrees.len();
    let mut free: Vec<usize> = sizes.to_vec();
    let mut membership = vec![usize::MAX; n];
    let mut int_clamped = internal.to_vec();

    // hardest nodes first so big internal degrees still find room
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(internal[v]));
    for v in order {
        let fitting: Vec<usize> = (0..sizes.len())
            .filter(|&c| free[c] > 0 && sizes[c] > internal[v])
            .collect();
        let c = if fitting.is_empty() {
            let open: Vec<usize> = (0..sizes.len()).filter(|&c| free[c] > 0).collect();
            let c = *open
                .iter()
                .max_by_key(|&&c| sizes[c])
                .expect("total capacity equals n");
            int_clamped[v] = int_clamped[v].min(sizes[c] - 1);
            c
        } else {
            fitting[rng.random_range(0..fitting.len())]
        };
        membership[v] = c;
        free[c] -= 1;
    }
    (membership, int_clamped)
}

/// Makes each community's internal stub count even by nudging one member's
/// internal degree, preferring an increment when it stays within both the
/// node degree and the community size.
fn fix_internal_parity(
    membership: &[usize],
    degrees: &[usize],
    sizes: &[usize],
    internal: &mut [usize],
    rng: &mut ChaCha8Rng,
) {
    for (c, &size) in sizes.iter().enumerate() {
        let members: Vec<usize> = (0..membership.len())
            .filter(|&v| membership[v] == c)
            .collect();
        let sum: usize = members.iter().map(|&v| internal[v]).sum();
        if sum.is_multiple_of(2) {
            continue;
        }
        let can_up: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&v| internal[v] < degrees[v] && internal[v] + 1 < size)
            .collect();
        if !can_up.is_empty() {
            internal[can_up[rng.random_range(0..can_up.len())]] += 1;
            continue;
        }
        let can_down: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&v| internal[v] > 0)
            .collect();
        if let Some(&v) = can_down.get(rng.random_range(0..can_down.len().max(1))) {
            internal[v] -= 1;
        }
    }
}

/// Pairs up stubs into simple edges: shuffle-match, then repair conflicts
/// (self loops, duplicates, rejected pairs) by swapping against accepted
/// pairs. Unrepairable stubs are dropped. `reject` vetoes a pair.
fn match_stubs(
    stubs: &mut [NodeId],
    seen: &mut HashSet<(NodeId, NodeId)>,
    reject: impl Fn(NodeId, NodeId) -> bool,
    rng: &mut ChaCha8Rng,
) -> Vec<(NodeId, NodeId)> {
    let norm = |a: NodeId, b: NodeId| if a < b { (a, b) } else { (b, a) };
    let bad = |a: NodeId, b: NodeId, seen: &HashSet<(NodeId, NodeId)>| {
        a == b || reject(a, b) || seen.contains(&norm(a, b))
    };
    stubs.shuffle(rng);
    let mut good: Vec<(NodeId, NodeId)> = Vec::with_capacity(stubs.len() / 2);
    let mut pending: Vec<(NodeId, NodeId)> = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if bad(a, b, seen) {
            pending.push((a, b));
        } else {
            seen.insert(norm(a, b));
            good.push((a, b));
        }
    }
    // bounded swap repair: trade endpoints with a random accepted pair
    let budget = 100 * (pending.len() + 1);
    let mut tries = 0;
    while let Some(&(a, b)) = pending.last() {
        if tries >= budget || good.is_empty() {
            break;
        }
        tries += 1;
        let gi = rng.random_range(0..good.len());
        let (c, d) = good[gi];
        // propose (a, d) and (c, b)
        if !bad(a, d, seen) {
            let without_cd: bool = {
                seen.remove(&norm(c, d));
                let ok = !bad(a, d, seen) && !bad(c, b, seen) && norm(a, d) != norm(c, b);
                if !ok {
                    seen.insert(norm(c, d));
                }
                ok
            };
            if without_cd {
                seen.insert(norm(a, d));
                seen.insert(norm(c, b));
                good[gi] = (a, d);
                good.push((c, b));
                pending.pop();
                continue;
            }
        }
        if tries % good.len().max(1) == 0 {
            // rotate the queue so one stuck pair cannot starve the rest
            let p = pending.pop().unwrap();
            pending.insert(0, p);
        }
    }
    // leftovers are dropped; callers treat the realised degrees as the truth
    good
}

/// Generates a graph with planted communities. The ground truth is a
/// partition; it is returned as a cover for uniformity with file-loaded
/// benchmarks. `mu = 0` yields no edges between communities, so the result
/// is intentionally disconnected.
pub fn generate_lfr<F: Real>(
    params: &LfrParams,
) -> Result<(Graph<F>, GroundTruthCover), LfrError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let degrees = sample_degrees(params, &mut rng);
    let sizes = sample_community_sizes(params, &mut rng);

    let target_internal: Vec<usize> = degrees
        .iter()
        .map(|&k| ((1.0 - params.mu) * k as f64).round() as usize)
        .collect();
    let (membership, mut internal) =
        assign_members(&degrees, &target_internal, &sizes, &mut rng);
    fix_internal_parity(&membership, &degrees, &sizes, &mut internal, &mut rng);

    let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();

    // intra-community wiring, one configuration-model pass per community
    for c in 0..sizes.len() {
        let mut stubs: Vec<NodeId> = Vec::new();
        for v in 0..params.n {
            if membership[v] == c {
                stubs.extend(std::iter::repeat_n(v, internal[v]));
            }
        }
        edges.extend(match_stubs(&mut stubs, &mut seen, |_, _| false, &mut rng));
    }

    // external wiring across the whole graph, rejecting intra pairs; at
    // mu = 0 the seal is the contract, so stray stubs left over from
    // capacity clamps or parity nudges are dropped instead of matched
    if params.mu > 0.0 {
        let mut ext_stubs: Vec<NodeId> = Vec::new();
        for v in 0..params.n {
            ext_stubs.extend(std::iter::repeat_n(v, degrees[v].saturating_sub(internal[v])));
        }
        if ext_stubs.len() % 2 == 1 {
            ext_stubs.pop();
        }
        let memb = membership.clone();
        edges.extend(match_stubs(
            &mut ext_stubs,
            &mut seen,
            move |a, b| memb[a] == memb[b],
            &mut rng,
        ));
    }

    if edges.is_empty() {
        return Err(LfrError::Infeasible(
            "no edges survived stub matching".into(),
        ));
    }

    let graph = Graph::from_edges(params.n, &edges)
        .map_err(|e| LfrError::Infeasible(format!("assembly failed: {e}")))?;
    let members: Vec<Vec<NodeId>> = (0..sizes.len())
        .map(|c| (0..params.n).filter(|&v| membership[v] == c).collect())
        .filter(|m: &Vec<NodeId>| !m.is_empty())
        .collect();
    let partition = Partition::from_member_lists(params.n, members)
        .map_err(|e| LfrError::Infeasible(format!("planted partition invalid: {e}")))?;
    Ok((graph, GroundTruthCover::from_partition(&partition)))
}

/// Random simple k-regular graph by repeated stub matching.
pub fn random_regular<F: Real>(n: usize, k: usize, seed: u64) -> Result<Graph<F>, LfrError> {
    if k >= n || n * k % 2 == 1 {
        return Err(LfrError::BadParams(format!(
            "no simple {k}-regular graph on {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
        let mut seen = HashSet::new();
        let edges = match_stubs(&mut stubs, &mut seen, |_, _| false, &mut rng);
        // swap repair may still drop a stuck pair; only a full matching
        // is regular
        if edges.len() == n * k / 2 {
            return Graph::from_edges(n, &edges)
                .map_err(|e| LfrError::Infeasible(format!("assembly failed: {e}")));
        }
    }
    Err(LfrError::Infeasible(format!(
        "could not match a simple {k}-regular graph on {n} nodes in 1000 attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn realized_mixing(graph: &Graph<f64>, truth: &GroundTruthCover) -> f64 {
        let mut cross = 0usize;
        let mut total = 0usize;
        for v in 0..graph.num_nodes() {
            for &w in graph.neighbors(v) {
                total += 1;
                if truth.memberships(v) != truth.memberships(w) {
                    cross += 1;
                }
            }
        }
        cross as f64 / total as f64
    }

    #[test]
    fn default_instance_hits_degree_and_community_bands() {
        for seed in 0..3 {
            let params = LfrParams {
                seed,
                ..LfrParams::default()
            };
            let (graph, truth) = generate_lfr::<f64>(&params).unwrap();
            assert_eq!(graph.num_nodes(), 1000);
            let k_avg = 2.0 * graph.num_edges() as f64 / 1000.0;
            assert!(
                (6.5..=9.5).contains(&k_avg),
                "seed {seed}: k_avg {k_avg}"
            );
            let k_max = (0..1000).map(|v| graph.degree(v)).max().unwrap();
            assert!(k_max <= 50, "seed {seed}: k_max {k_max}");
            let c = truth.num_communities();
            assert!((10..=80).contains(&c), "seed {seed}: {c} communities");
            assert!(truth.is_disjoint());
        }
    }

    #[test]
    fn community_sizes_respect_bounds_and_cover_all_nodes() {
        let params = LfrParams {
            seed: 4,
            ..LfrParams::default()
        };
        let (_, truth) = generate_lfr::<f64>(&params).unwrap();
        let mut covered = 0;
        for c in 0..truth.num_communities() {
            let s = truth.communities()[c].len();
            assert!((5..=100).contains(&s), "community {c} has size {s}");
            covered += s;
        }
        assert_eq!(covered, 1000);
    }

    #[test]
    fn zero_mixing_keeps_communities_sealed() {
        let params = LfrParams {
            mu: 0.0,
            n: 300,
            seed: 1,
            ..LfrParams::default()
        };
        let (graph, truth) = generate_lfr::<f64>(&params).unwrap();
        assert_eq!(realized_mixing(&graph, &truth), 0.0);
        // sealed communities mean the graph cannot be connected
        let (_, pieces) = graph.components();
        assert!(pieces >= truth.num_communities());
    }

    #[test]
    fn realized_mixing_tracks_the_request() {
        for &mu in &[0.2, 0.4, 0.6] {
            let params = LfrParams {
                mu,
                seed: 8,
                ..LfrParams::default()
            };
            let (graph, truth) = generate_lfr::<f64>(&params).unwrap();
            let got = realized_mixing(&graph, &truth);
            assert!(
                (got - mu).abs() <= 0.05,
                "requested mu {mu}, realized {got}"
            );
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let params = LfrParams {
            seed: 21,
            n: 400,
            ..LfrParams::default()
        };
        let (g1, t1) = generate_lfr::<f64>(&params).unwrap();
        let (g2, t2) = generate_lfr::<f64>(&params).unwrap();
        let dump = |g: &Graph<f64>| {
            let mut buf = Vec::new();
            g.write_edge_list(&mut buf).unwrap();
            buf
        };
        assert_eq!(dump(&g1), dump(&g2));
        assert_eq!(t1.num_communities(), t2.num_communities());
        for c in 0..t1.num_communities() {
            assert_eq!(t1.communities()[c], t2.communities()[c]);
        }
        let other = LfrParams { seed: 22, ..params };
        let (g3, _) = generate_lfr::<f64>(&other).unwrap();
        assert_ne!(dump(&g1), dump(&g3));
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad_mu = LfrParams {
            mu: 1.5,
            ..LfrParams::default()
        };
        assert!(matches!(
            generate_lfr::<f64>(&bad_mu),
            Err(LfrError::BadParams(_))
        ));
        let bad_k = LfrParams {
            k_avg: 60.0,
            ..LfrParams::default()
        };
        assert!(matches!(
            generate_lfr::<f64>(&bad_k),
            Err(LfrError::BadParams(_))
        ));
        let bad_c = LfrParams {
            c_min: 200,
            c_max: 100,
            ..LfrParams::default()
        };
        assert!(matches!(
            generate_lfr::<f64>(&bad_c),
            Err(LfrError::BadParams(_))
        ));
    }

    #[test]
    fn regular_graphs_are_simple_and_regular() {
        for &(n, k) in &[(10, 3), (20, 4), (50, 6), (7, 2)] {
            let g = random_regular::<f64>(n, k, 5).unwrap();
            assert_eq!(g.num_nodes(), n);
            assert_eq!(g.num_edges(), n * k / 2);
            for v in 0..n {
                assert_eq!(g.degree(v), k, "node {v} in ({n}, {k})");
                assert!(!g.has_edge(v, v));
            }
        }
        assert!(random_regular::<f64>(5, 3, 0).is_err());
    }
}
