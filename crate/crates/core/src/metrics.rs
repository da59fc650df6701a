//! Agreement between a predicted partition and ground truth: normalised
//! mutual information, the Omega index, and mean best-match F1.
//!
//! Ground truth is a cover and may overlap; Omega and F1 handle that
//! natively, while NMI takes two disjoint partitions (flatten a cover first
//! via [`GroundTruthCover::to_partition`]).

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::graph::{GroundTruthCover, Partition};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("node counts differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("metric undefined for {0} nodes")]
    TooFewNodes(usize),
    #[error("one side has no communities")]
    EmptySide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmiNorm {
    /// Divide mutual information by `max(H_truth, H_pred)`.
    Max,
    /// Divide by `sqrt(H_truth * H_pred)`.
    Geometric,
}

// BTreeMap so the mutual-information sum below runs in a fixed order;
// summing in hash order would let the rounding differ between processes
fn contingency(truth: &Partition, pred: &Partition) -> BTreeMap<(usize, usize), usize> {
    let mut table = BTreeMap::new();
    for node in 0..truth.num_nodes() {
        *table
            .entry((truth.label_of(node), pred.label_of(node)))
            .or_insert(0) += 1;
    }
    table
}

/// True when the contingency table is a size-preserving bijection, i.e. the
/// partitions are identical up to community relabelling.
fn identical_up_to_relabel(
    table: &BTreeMap<(usize, usize), usize>,
    truth: &Partition,
    pred: &Partition,
) -> bool {
    truth.num_communities() == pred.num_communities()
        && table.len() == truth.num_communities()
        && table
            .iter()
            .all(|(&(c, p), &n)| truth.members(c).len() == n && pred.members(p).len() == n)
}

/// Normalised mutual information between two disjoint partitions. Identical
/// partitions score exactly 1; when both entropies vanish the partitions are
/// the same single cluster and the score is 1 by convention, while a single
/// zero entropy yields 0.
pub fn nmi<F: Real>(
    truth: &Partition,
    pred: &Partition,
    norm: NmiNorm,
) -> Result<F, MetricsError> {
    let n = truth.num_nodes();
    if n != pred.num_nodes() {
        return Err(MetricsError::SizeMismatch(n, pred.num_nodes()));
    }
    if n == 0 {
        return Err(MetricsError::TooFewNodes(0));
    }
    let table = contingency(truth, pred);
    if identical_up_to_relabel(&table, truth, pred) {
        return Ok(F::one());
    }
    let total = F::count(n);
    let entropy = |p: &Partition| -> F {
        p.communities()
            .iter()
            .map(|c| {
                let frac = F::count(c.len()) / total;
                -frac * frac.ln()
            })
            .sum()
    };
    let h_truth = entropy(truth);
    let h_pred = entropy(pred);
    let mut mi = F::zero();
    for (&(c, p), &joint) in &table {
        let p_joint = F::count(joint) / total;
        let p_truth = F::count(truth.members(c).len()) / total;
        let p_pred = F::count(pred.members(p).len()) / total;
        mi += p_joint * (p_joint / (p_truth * p_pred)).ln();
    }
    let denom = match norm {
        NmiNorm::Max => h_truth.max(h_pred),
        NmiNorm::Geometric => (h_truth * h_pred).sqrt(),
    };
    if h_truth == F::zero() && h_pred == F::zero() {
        return Ok(F::one());
    }
    if denom == F::zero() {
        return Ok(F::zero());
    }
    Ok((mi / denom).max(F::zero()).min(F::one()))
}

/// Pair co-membership counts per unordered node pair; covers may assign a
/// pair to several communities, so counts can exceed 1.
fn pair_counts(communities: &[Vec<usize>]) -> HashMap<(usize, usize), usize> {
    let mut counts = HashMap::new();
    for members in communities {
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                *counts.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Omega index: observed fraction of node pairs whose co-membership counts
/// agree, corrected by the agreement expected from the count histograms.
pub fn omega<F: Real>(truth: &GroundTruthCover, pred: &Partition) -> Result<F, MetricsError> {
    let n = truth.num_nodes();
    if n != pred.num_nodes() {
        return Err(MetricsError::SizeMismatch(n, pred.num_nodes()));
    }
    if n < 2 {
        return Err(MetricsError::TooFewNodes(n));
    }
    let pairs = n * (n - 1) / 2;

    let t_counts = pair_counts(truth.communities());
    let s_counts = pair_counts(pred.communities());

    let mut agree = 0usize;
    let mut seen = 0usize;
    for (key, &t) in &t_counts {
        seen += 1;
        let s = s_counts.get(key).copied().unwrap_or(0);
        if t == s {
            agree += 1;
        }
    }
    for key in s_counts.keys() {
        if !t_counts.contains_key(key) {
            seen += 1;
            // s > 0 here while t = 0: disagreement
        }
    }
    agree += pairs - seen; // pairs in no community on either side

    // fixed iteration order keeps the expected-agreement sum reproducible
    let mut t_hist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut s_hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &t in t_counts.values() {
        *t_hist.entry(t).or_insert(0) += 1;
    }
    for &s in s_counts.values() {
        *s_hist.entry(s).or_insert(0) += 1;
    }
    *t_hist.entry(0).or_insert(0) += pairs - t_counts.len();
    *s_hist.entry(0).or_insert(0) += pairs - s_counts.len();

    let pairs_f = F::count(pairs);
    let observed = F::count(agree) / pairs_f;
    let mut expected = F::zero();
    for (level, &t) in &t_hist {
        if let Some(&s) = s_hist.get(level) {
            expected += (F::count(t) / pairs_f) * (F::count(s) / pairs_f);
        }
    }
    if expected == F::one() {
        return Ok(F::one());
    }
    Ok((observed - expected) / (F::one() - expected))
}

fn f1_direction<F: Real>(from: &[Vec<usize>], to: &[Vec<usize>], to_of_node: &[Vec<usize>]) -> F {
    let mut sum = F::zero();
    for x in from {
        let mut overlaps: HashMap<usize, usize> = HashMap::new();
        for &node in x {
            for &y in &to_of_node[node] {
                *overlaps.entry(y).or_insert(0) += 1;
            }
        }
        let mut best = F::zero();
        for (&y, &inter) in &overlaps {
            let f1 = F::count(2 * inter) / F::count(x.len() + to[y].len());
            if f1 > best {
                best = f1;
            }
        }
        sum += best;
    }
    sum / F::count(from.len())
}

/// Mean of the two best-match F1 averages (truth against prediction and
/// prediction against truth).
pub fn mean_f1<F: Real>(truth: &GroundTruthCover, pred: &Partition) -> Result<F, MetricsError> {
    let n = truth.num_nodes();
    if n != pred.num_nodes() {
        return Err(MetricsError::SizeMismatch(n, pred.num_nodes()));
    }
    if truth.num_communities() == 0 || pred.num_communities() == 0 {
        return Err(MetricsError::EmptySide);
    }
    let truth_of_node: Vec<Vec<usize>> = (0..n).map(|v| truth.memberships(v).to_vec()).collect();
    let pred_of_node: Vec<Vec<usize>> = (0..n).map(|v| vec![pred.label_of(v)]).collect();
    let a = f1_direction::<F>(truth.communities(), pred.communities(), &pred_of_node);
    let b = f1_direction::<F>(pred.communities(), truth.communities(), &truth_of_node);
    Ok((a + b) / F::lit(2.0))
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn nmi_brute(truth: &Partition, pred: &Partition, norm: NmiNorm) -> f64 {
        let n = truth.num_nodes() as f64;
        let kt = truth.num_communities();
        let kp = pred.num_communities();
        let mut joint = vec![vec![0f64; kp]; kt];
        for node in 0..truth.num_nodes() {
            joint[truth.label_of(node)][pred.label_of(node)] += 1.0;
        }
        let pt: Vec<f64> = (0..kt).map(|c| truth.members(c).len() as f64 / n).collect();
        let pp: Vec<f64> = (0..kp).map(|c| pred.members(c).len() as f64 / n).collect();
        let mut mi = 0.0;
        for c in 0..kt {
            for p in 0..kp {
                let pj = joint[c][p] / n;
                if pj > 0.0 {
                    mi += pj * (pj / (pt[c] * pp[p])).ln();
                }
            }
        }
        let h = |probs: &[f64]| -> f64 { probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum() };
        let (ht, hp) = (h(&pt), h(&pp));
        if ht == 0.0 && hp == 0.0 {
            return 1.0;
        }
        let denom = match norm {
            NmiNorm::Max => ht.max(hp),
            NmiNorm::Geometric => (ht * hp).sqrt(),
        };
        if denom == 0.0 {
            0.0
        } else {
            (mi / denom).clamp(0.0, 1.0)
        }
    }

    pub fn omega_brute(truth: &GroundTruthCover, pred: &Partition) -> f64 {
        let n = truth.num_nodes();
        let count_in = |comms: &[Vec<usize>], u: usize, v: usize| -> usize {
            comms
                .iter()
                .filter(|c| c.contains(&u) && c.contains(&v))
                .count()
        };
        let mut t_of_pair = Vec::new();
        let mut s_of_pair = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                t_of_pair.push(count_in(truth.communities(), u, v));
                s_of_pair.push(count_in(pred.communities(), u, v));
            }
        }
        let pairs = t_of_pair.len() as f64;
        let obs = t_of_pair
            .iter()
            .zip(&s_of_pair)
            .filter(|(t, s)| t == s)
            .count() as f64
            / pairs;
        let max_level = t_of_pair
            .iter()
            .chain(&s_of_pair)
            .copied()
            .max()
            .unwrap_or(0);
        let mut exp = 0.0;
        for level in 0..=max_level {
            let t = t_of_pair.iter().filter(|&&x| x == level).count() as f64;
            let s = s_of_pair.iter().filter(|&&x| x == level).count() as f64;
            exp += (t / pairs) * (s / pairs);
        }
        if exp == 1.0 {
            1.0
        } else {
            (obs - exp) / (1.0 - exp)
        }
    }

    pub fn mean_f1_brute(truth: &GroundTruthCover, pred: &Partition) -> f64 {
        let f1 = |x: &[usize], y: &[usize]| -> f64 {
            let inter = x.iter().filter(|u| y.contains(u)).count() as f64;
            2.0 * inter / (x.len() + y.len()) as f64
        };
        let dir = |from: &[Vec<usize>], to: &[Vec<usize>]| -> f64 {
            from.iter()
                .map(|x| {
                    to.iter()
                        .map(|y| f1(x, y))
                        .fold(0.0f64, f64::max)
                })
                .sum::<f64>()
                / from.len() as f64
        };
        (dir(truth.communities(), pred.communities())
            + dir(pred.communities(), truth.communities()))
            / 2.0
    }

    pub fn random_partition_of(n: usize, rng: &mut ChaCha8Rng) -> Partition {
        let k = rng.random_range(1..=n);
        loop {
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let p = Partition::from_labels(&labels);
            if p.num_communities() >= 1 {
                return p;
            }
        }
    }

    /// Random cover over all nodes; roughly a third of nodes get a second
    /// membership so overlap is exercised.
    pub fn random_cover_of(n: usize, rng: &mut ChaCha8Rng) -> GroundTruthCover {
        let k = rng.random_range(1..=n.min(4));
        let mut comms: Vec<Vec<usize>> = vec![Vec::new(); k];
        for node in 0..n {
            let first = rng.random_range(0..k);
            comms[first].push(node);
            if k > 1 && rng.random::<f64>() < 0.3 {
                let mut second = rng.random_range(0..k);
                while second == first {
                    second = rng.random_range(0..k);
                }
                comms[second].push(node);
            }
        }
        comms.retain(|c| !c.is_empty());
        GroundTruthCover::from_communities(n, comms).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_partitions_score_exactly_one() {
        let p = Partition::from_labels(&[0, 0, 1, 1, 2]);
        let relabelled = Partition::from_labels(&[5, 5, 9, 9, 1]);
        assert_eq!(nmi::<f64>(&p, &relabelled, NmiNorm::Max).unwrap(), 1.0);
        assert_eq!(nmi::<f64>(&p, &relabelled, NmiNorm::Geometric).unwrap(), 1.0);
        let cover = GroundTruthCover::from_partition(&p);
        assert_eq!(omega::<f64>(&cover, &relabelled).unwrap(), 1.0);
        assert_eq!(mean_f1::<f64>(&cover, &relabelled).unwrap(), 1.0);
    }

    #[test]
    fn independent_partitions_have_zero_nmi() {
        // {ab|cd} against {ac|bd}
        let t = Partition::from_labels(&[0, 0, 1, 1]);
        let p = Partition::from_labels(&[0, 1, 0, 1]);
        assert_eq!(nmi::<f64>(&t, &p, NmiNorm::Max).unwrap(), 0.0);
        assert_eq!(nmi::<f64>(&t, &p, NmiNorm::Geometric).unwrap(), 0.0);
    }

    #[test]
    fn single_cluster_conventions() {
        let one = Partition::from_labels(&[0, 0, 0, 0]);
        let split = Partition::from_labels(&[0, 0, 1, 1]);
        assert_eq!(nmi::<f64>(&one, &one, NmiNorm::Max).unwrap(), 1.0);
        assert_eq!(nmi::<f64>(&one, &split, NmiNorm::Max).unwrap(), 0.0);
        assert_eq!(nmi::<f64>(&one, &split, NmiNorm::Geometric).unwrap(), 0.0);
    }

    #[test]
    fn omega_singletons_versus_single_block_is_zero() {
        let singles = Partition::from_labels(&[0, 1, 2, 3]);
        let block = Partition::from_labels(&[0, 0, 0, 0]);
        let cover = GroundTruthCover::from_partition(&singles);
        assert_eq!(omega::<f64>(&cover, &block).unwrap(), 0.0);
    }

    #[test]
    fn mean_f1_halves_against_merged_prediction() {
        // truth {ab|cd}, prediction {abcd}: every best match is 2/3
        let t = GroundTruthCover::from_partition(&Partition::from_labels(&[0, 0, 1, 1]));
        let p = Partition::from_labels(&[0, 0, 0, 0]);
        let f = mean_f1::<f64>(&t, &p).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_norm_dominates_max_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let t = random_partition_of(10, &mut rng);
            let p = random_partition_of(10, &mut rng);
            let max = nmi::<f64>(&t, &p, NmiNorm::Max).unwrap();
            let geo = nmi::<f64>(&t, &p, NmiNorm::Geometric).unwrap();
            assert!(geo >= max - 1e-12, "geo {geo} < max {max}");
        }
    }

    #[test]
    fn agrees_with_brute_force_references() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..200 {
            let n = (case % 7) + 2;
            let t = random_partition_of(n, &mut rng);
            let p = random_partition_of(n, &mut rng);
            for norm in [NmiNorm::Max, NmiNorm::Geometric] {
                let fast = nmi::<f64>(&t, &p, norm).unwrap();
                let brute = nmi_brute(&t, &p, norm);
                assert!((fast - brute).abs() <= 1e-12, "case {case}: {fast} vs {brute}");
            }
            let cover = random_cover_of(n, &mut rng);
            let fast = omega::<f64>(&cover, &p).unwrap();
            let brute = omega_brute(&cover, &p);
            assert!((fast - brute).abs() <= 1e-12, "case {case}: {fast} vs {brute}");
            let fast = mean_f1::<f64>(&cover, &p).unwrap();
            let brute = mean_f1_brute(&cover, &p);
            assert!((fast - brute).abs() <= 1e-12, "case {case}: {fast} vs {brute}");
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        let t = Partition::from_labels(&[0, 1]);
        let p = Partition::from_labels(&[0, 1, 1]);
        assert!(nmi::<f64>(&t, &p, NmiNorm::Max).is_err());
        let cover = GroundTruthCover::from_partition(&t);
        assert!(omega::<f64>(&cover, &p).is_err());
        assert!(mean_f1::<f64>(&cover, &p).is_err());
    }

    proptest! {
        #[test]
        fn scores_stay_in_range_and_nmi_is_symmetric(
            labels_a in proptest::collection::vec(0usize..5, 6..20),
            seed in 0u64..500,
        ) {
            let n = labels_a.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = Partition::from_labels(&labels_a);
            let p = random_partition_of(n, &mut rng);
            let v = nmi::<f64>(&t, &p, NmiNorm::Max).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            let w = nmi::<f64>(&p, &t, NmiNorm::Max).unwrap();
            prop_assert!((v - w).abs() <= 1e-12);

            let cover = GroundTruthCover::from_partition(&t);
            let om = omega::<f64>(&cover, &p).unwrap();
            prop_assert!(om <= 1.0 + 1e-12);
            let f = mean_f1::<f64>(&cover, &p).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        }
    }
}
