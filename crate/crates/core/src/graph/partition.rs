//! Disjoint partitions, possibly overlapping ground-truth covers, and the
//! shared one-community-per-line file format.

use std::io;

use super::{Graph, GraphError, NodeId};
use crate::scalar::Real;

/// Disjoint community assignment with dense labels `0..num_communities`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    members: Vec<Vec<NodeId>>,
}

impl Partition {
    /// Compacts arbitrary labels to dense ids in first-seen order.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        let mut members: Vec<Vec<NodeId>> = Vec::new();
        for (node, &l) in raw.iter().enumerate() {
            let next = members.len();
            let dense = *remap.entry(l).or_insert(next);
            if dense == members.len() {
                members.push(Vec::new());
            }
            labels.push(dense);
            members[dense].push(node);
        }
        Partition { labels, members }
    }

    /// Exact partition from member lists: every node in `0..num_nodes` must
    /// appear in exactly one community.
    pub fn from_member_lists(
        num_nodes: usize,
        communities: Vec<Vec<NodeId>>,
    ) -> Result<Self, GraphError> {
        let mut labels = vec![usize::MAX; num_nodes];
        for (c, members) in communities.iter().enumerate() {
            if members.is_empty() {
                return Err(GraphError::EmptyCommunity(c));
            }
            for &node in members {
                if node >= num_nodes {
                    return Err(GraphError::NodeOutOfRange(node, num_nodes));
                }
                if labels[node] != usize::MAX {
                    return Err(GraphError::OverlapInPartition(node));
                }
                labels[node] = c;
            }
        }
        if let Some(node) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(GraphError::NotAPartition(node));
        }
        let mut members = communities;
        for m in &mut members {
            m.sort_unstable();
        }
        Ok(Partition { labels, members })
    }

    pub fn singletons(num_nodes: usize) -> Self {
        let labels: Vec<usize> = (0..num_nodes).collect();
        Self::from_labels(&labels)
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_communities(&self) -> usize {
        self.members.len()
    }

    pub fn label_of(&self, node: NodeId) -> usize {
        self.labels[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn members(&self, community: usize) -> &[NodeId] {
        &self.members[community]
    }

    pub fn communities(&self) -> &[Vec<NodeId>] {
        &self.members
    }

    /// One community per line, members as external ids.
    pub fn write_communities<F: Real, W: io::Write>(
        &self,
        graph: &Graph<F>,
        out: &mut W,
    ) -> io::Result<()> {
        for members in &self.members {
            let line: Vec<String> = members
                .iter()
                .map(|&v| graph.orig_id(v).to_string())
                .collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Ground-truth communities; unlike [`Partition`] a node may belong to several
/// communities or to none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthCover {
    num_nodes: usize,
    communities: Vec<Vec<NodeId>>,
    memberships: Vec<Vec<usize>>,
}

/// What flattening an overlapping cover into a partition had to do.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverFlatten {
    /// Nodes in several communities, assigned their smallest community id.
    pub overlapping_nodes: usize,
    /// Nodes in no community, given fresh singleton communities.
    pub uncovered_nodes: usize,
}

impl CoverFlatten {
    pub fn is_lossless(&self) -> bool {
        self.overlapping_nodes == 0 && self.uncovered_nodes == 0
    }
}

impl GroundTruthCover {
    pub fn from_communities(
        num_nodes: usize,
        communities: Vec<Vec<NodeId>>,
    ) -> Result<Self, GraphError> {
        let mut memberships = vec![Vec::new(); num_nodes];
        for (c, members) in communities.iter().enumerate() {
            if members.is_empty() {
                return Err(GraphError::EmptyCommunity(c));
            }
            let mut seen = std::collections::HashSet::new();
            for &node in members {
                if node >= num_nodes {
                    return Err(GraphError::NodeOutOfRange(node, num_nodes));
                }
                if !seen.insert(node) {
                    return Err(GraphError::DuplicateMember {
                        community: c,
                        node: node as u64,
                    });
                }
                memberships[node].push(c);
            }
        }
        let mut communities = communities;
        for m in &mut communities {
            m.sort_unstable();
        }
        Ok(GroundTruthCover {
            num_nodes,
            communities,
            memberships,
        })
    }

    pub fn from_partition(p: &Partition) -> Self {
        Self::from_communities(p.num_nodes(), p.communities().to_vec())
            .expect("a partition is always a valid cover")
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_communities(&self) -> usize {
        self.communities.len()
    }

    pub fn communities(&self) -> &[Vec<NodeId>] {
        &self.communities
    }

    /// Community ids containing `node` (may be empty).
    pub fn memberships(&self, node: NodeId) -> &[usize] {
        &self.memberships[node]
    }

    pub fn is_disjoint(&self) -> bool {
        self.memberships.iter().all(|m| m.len() <= 1)
            && self.memberships.iter().all(|m| !m.is_empty())
    }

    /// Flattens to a disjoint partition: overlapping nodes keep their smallest
    /// community id, uncovered nodes become singletons. The report says how
    /// lossy that was.
    pub fn to_partition(&self) -> (Partition, CoverFlatten) {
        let k = self.communities.len();
        let mut flatten = CoverFlatten::default();
        let mut next_fresh = k;
        let labels: Vec<usize> = self
            .memberships
            .iter()
            .map(|m| match m.len() {
                0 => {
                    flatten.uncovered_nodes += 1;
                    next_fresh += 1;
                    next_fresh - 1
                }
                1 => m[0],
                _ => {
                    flatten.overlapping_nodes += 1;
                    *m.iter().min().expect("non-empty")
                }
            })
            .collect();
        (Partition::from_labels(&labels), flatten)
    }

    pub fn write_communities<F: Real, W: io::Write>(
        &self,
        graph: &Graph<F>,
        out: &mut W,
    ) -> io::Result<()> {
        for members in &self.communities {
            let line: Vec<String> = members
                .iter()
                .map(|&v| graph.orig_id(v).to_string())
                .collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Community file still keyed by external ids; resolve against a graph to get
/// internal ids.
#[derive(Debug, Clone)]
pub struct RawCover {
    communities: Vec<Vec<u64>>,
}

impl RawCover {
    pub fn num_communities(&self) -> usize {
        self.communities.len()
    }

    pub fn resolve<F: Real>(&self, graph: &Graph<F>) -> Result<GroundTruthCover, GraphError> {
        let mut mapped = Vec::with_capacity(self.communities.len());
        for comm in &self.communities {
            let mut members = Vec::with_capacity(comm.len());
            for &orig in comm {
                let node = graph
                    .internal_id(orig)
                    .ok_or(GraphError::UnknownNode(orig))?;
                members.push(node);
            }
            mapped.push(members);
        }
        GroundTruthCover::from_communities(graph.num_nodes(), mapped)
    }

    /// Like `resolve`, but the result must be an exact partition.
    pub fn resolve_partition<F: Real>(&self, graph: &Graph<F>) -> Result<Partition, GraphError> {
        let cover = self.resolve(graph)?;
        let (partition, flatten) = cover.to_partition();
        if !flatten.is_lossless() {
            if flatten.overlapping_nodes > 0 {
                let node = (0..cover.num_nodes())
                    .find(|&v| cover.memberships(v).len() > 1)
                    .expect("an overlapping node exists");
                return Err(GraphError::OverlapInPartition(node));
            }
            let node = (0..cover.num_nodes())
                .find(|&v| cover.memberships(v).is_empty())
                .expect("an uncovered node exists");
            return Err(GraphError::NotAPartition(node));
        }
        Ok(partition)
    }
}

/// Parses the one-community-per-line format (`#` comments, blank lines skipped).
pub fn parse_community_file(text: &str) -> Result<RawCover, GraphError> {
    let mut communities = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut members = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for tok in line.split_whitespace() {
            let id = tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: lineno + 1,
                msg: format!("invalid node id {tok:?}"),
            })?;
            if !seen.insert(id) {
                return Err(GraphError::DuplicateMember {
                    community: communities.len(),
                    node: id,
                });
            }
            members.push(id);
        }
        communities.push(members);
    }
    if communities.is_empty() {
        return Err(GraphError::Empty);
    }
    Ok(RawCover { communities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    #[test]
    fn labels_compact_in_first_seen_order() {
        let p = Partition::from_labels(&[9, 4, 9, 7]);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.num_communities(), 3);
        assert_eq!(p.members(0), &[0, 2]);
    }

    #[test]
    fn member_lists_must_partition() {
        assert!(Partition::from_member_lists(3, vec![vec![0, 1], vec![2]]).is_ok());
        assert!(matches!(
            Partition::from_member_lists(3, vec![vec![0, 1], vec![1, 2]]),
            Err(GraphError::OverlapInPartition(1))
        ));
        assert!(matches!(
            Partition::from_member_lists(3, vec![vec![0, 1]]),
            Err(GraphError::NotAPartition(2))
        ));
        assert!(matches!(
            Partition::from_member_lists(2, vec![vec![0, 1], vec![]]),
            Err(GraphError::EmptyCommunity(1))
        ));
    }

    #[test]
    fn cover_tracks_overlap_and_flattens_smallest_id() {
        let cover =
            GroundTruthCover::from_communities(5, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert!(!cover.is_disjoint());
        assert_eq!(cover.memberships(2), &[0, 1]);
        let (p, flatten) = cover.to_partition();
        assert_eq!(flatten.overlapping_nodes, 1);
        assert_eq!(flatten.uncovered_nodes, 1);
        assert_eq!(p.label_of(2), 0);
        assert_eq!(p.label_of(3), 1);
        // uncovered node 4 got its own community
        assert_eq!(p.num_communities(), 3);
    }

    #[test]
    fn duplicate_member_rejected() {
        assert!(matches!(
            GroundTruthCover::from_communities(3, vec![vec![0, 0, 1]]),
            Err(GraphError::DuplicateMember { .. })
        ));
        assert!(matches!(
            parse_community_file("1 2 1\n"),
            Err(GraphError::DuplicateMember { .. })
        ));
    }

    #[test]
    fn community_file_resolves_through_external_ids() {
        let (g, _) = parse_edge_list::<f64>("10 20\n20 30\n30 10\n").unwrap();
        let cover = parse_community_file("10 20\n30\n")
            .unwrap()
            .resolve(&g)
            .unwrap();
        assert_eq!(cover.num_communities(), 2);
        assert_eq!(cover.memberships(g.internal_id(30).unwrap()), &[1]);
        assert!(matches!(
            parse_community_file("10 99\n").unwrap().resolve(&g),
            Err(GraphError::UnknownNode(99))
        ));
    }

    #[test]
    fn community_file_round_trips() {
        let (g, _) = parse_edge_list::<f64>("5 6\n6 7\n7 5\n7 8\n").unwrap();
        let cover = parse_community_file("5 6 7\n8\n").unwrap().resolve(&g).unwrap();
        let mut buf = Vec::new();
        cover.write_communities(&g, &mut buf).unwrap();
        let again = parse_community_file(std::str::from_utf8(&buf).unwrap())
            .unwrap()
            .resolve(&g)
            .unwrap();
        assert_eq!(cover, again);
    }
}
