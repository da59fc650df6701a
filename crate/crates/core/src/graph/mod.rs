//! Undirected graph storage, edge-list parsing, and summary statistics.
//!
//! Graphs are simple (no self-loops, no parallel edges) and stored in CSR
//! form over dense internal ids `0..num_nodes`. External ids from input
//! files are remapped in first-seen order and kept for round-tripping.

mod partition;

use std::collections::HashMap;
use std::io;

use thiserror::Error;

pub use partition::{
    parse_community_file, CoverFlatten, GroundTruthCover, Partition, RawCover,
};

use crate::scalar::Real;

/// Dense internal node id.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph has no edges")]
    Empty,
    #[error("node id {0} out of range for {1} nodes")]
    NodeOutOfRange(NodeId, usize),
    #[error("edge weights must be positive and symmetric: {0}")]
    BadWeights(String),
    #[error("community {community} lists node {node} more than once")]
    DuplicateMember { community: usize, node: u64 },
    #[error("community file references unknown node {0}")]
    UnknownNode(u64),
    #[error("community {0} is empty")]
    EmptyCommunity(usize),
    #[error("node {0} is missing from the partition")]
    NotAPartition(NodeId),
    #[error("node {0} appears in more than one partition community")]
    OverlapInPartition(NodeId),
}

/// Counts of input irregularities tolerated while parsing an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
}

/// Undirected simple graph in CSR form.
#[derive(Debug, Clone)]
pub struct Graph<F: Real> {
    offsets: Vec<usize>,
    adj: Vec<NodeId>,
    /// Per-direction edge weights aligned with `adj`; `None` means all 1.
    weights: Option<Vec<F>>,
    orig_ids: Vec<u64>,
    orig_index: HashMap<u64, NodeId>,
}

impl<F: Real> Graph<F> {
    /// Builds a graph over nodes `0..num_nodes` from an edge list.
    /// Self-loops and duplicate edges are dropped silently; callers that need
    /// the counts go through [`parse_edge_list`].
    pub fn from_edges(num_nodes: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut seen = std::collections::HashSet::new();
        let mut uniq = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= num_nodes {
                return Err(GraphError::NodeOutOfRange(u, num_nodes));
            }
            if v >= num_nodes {
                return Err(GraphError::NodeOutOfRange(v, num_nodes));
            }
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key) {
                uniq.push(key);
            }
        }
        let orig_ids: Vec<u64> = (0..num_nodes as u64).collect();
        Ok(Self::assemble(num_nodes, &uniq, orig_ids))
    }

    fn assemble(num_nodes: usize, edges: &[(NodeId, NodeId)], orig_ids: Vec<u64>) -> Self {
        let mut offsets = vec![0usize; num_nodes + 1];
        for &(u, v) in edges {
            offsets[u + 1] += 1;
            offsets[v + 1] += 1;
        }
        for i in 0..num_nodes {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut adj = vec![0 as NodeId; edges.len() * 2];
        for &(u, v) in edges {
            adj[cursor[u]] = v;
            cursor[u] += 1;
            adj[cursor[v]] = u;
            cursor[v] += 1;
        }
        for u in 0..num_nodes {
            adj[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        let orig_index = orig_ids
            .iter()
            .enumerate()
            .map(|(i, &o)| (o, i))
            .collect();
        Graph {
            offsets,
            adj,
            weights: None,
            orig_ids,
            orig_index,
        }
    }

    /// Replaces the per-direction edge weights. The vector must align with the
    /// CSR adjacency, every weight must be positive, and the weight of (u, v)
    /// must equal the weight of (v, u) exactly.
    pub fn with_edge_weights(mut self, weights: Vec<F>) -> Result<Self, GraphError> {
        if weights.len() != self.adj.len() {
            return Err(GraphError::BadWeights(format!(
                "expected {} entries, got {}",
                self.adj.len(),
                weights.len()
            )));
        }
        for u in 0..self.num_nodes() {
            for (idx, &v) in self.neighbors(u).iter().enumerate() {
                let w = weights[self.offsets[u] + idx];
                if !w.is_finite() || w <= F::zero() {
                    return Err(GraphError::BadWeights(format!(
                        "weight of ({u}, {v}) is {w}"
                    )));
                }
                let back = self.offsets[v]
                    + self.neighbors(v)
                        .binary_search(&u)
                        .expect("CSR adjacency is symmetric");
                if weights[back] != w {
                    return Err(GraphError::BadWeights(format!(
                        "weight of ({u}, {v}) differs from ({v}, {u})"
                    )));
                }
            }
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Weights aligned with `neighbors(u)`, or `None` when all edges weigh 1.
    pub fn neighbor_weights(&self, u: NodeId) -> Option<&[F]> {
        self.weights
            .as_ref()
            .map(|w| &w[self.offsets[u]..self.offsets[u + 1]])
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// External id carried through from the input file.
    pub fn orig_id(&self, u: NodeId) -> u64 {
        self.orig_ids[u]
    }

    pub fn internal_id(&self, orig: u64) -> Option<NodeId> {
        self.orig_index.get(&orig).copied()
    }

    /// Component label per node plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.num_nodes();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes() > 0 && self.components().1 == 1
    }

    /// Two-colorability check; the eigenpair routine shifts the spectrum for
    /// bipartite graphs to break the +/- lambda oscillation.
    pub fn is_bipartite(&self) -> bool {
        let n = self.num_nodes();
        let mut color = vec![u8::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Writes `u v` lines using external ids, one per undirected edge.
    pub fn write_edge_list<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        for u in 0..self.num_nodes() {
            for &v in self.neighbors(u) {
                if u < v {
                    writeln!(out, "{} {}", self.orig_ids[u], self.orig_ids[v])?;
                }
            }
        }
        Ok(())
    }
}

/// Parses a whitespace-separated edge list (`u v` per line, `#` comments).
/// External ids are remapped to dense internal ids in first-seen order.
pub fn parse_edge_list<F: Real>(text: &str) -> Result<(Graph<F>, LoadReport), GraphError> {
    let mut orig_ids: Vec<u64> = Vec::new();
    let mut index: HashMap<u64, NodeId> = HashMap::new();
    let mut intern = |orig: u64, orig_ids: &mut Vec<u64>| -> NodeId {
        *index.entry(orig).or_insert_with(|| {
            orig_ids.push(orig);
            orig_ids.len() - 1
        })
    };

    let mut report = LoadReport::default();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(GraphError::Parse {
                    line: lineno + 1,
                    msg: format!("expected two node ids, got {line:?}"),
                })
            }
        };
        let parse_id = |tok: &str| {
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: lineno + 1,
                msg: format!("invalid node id {tok:?}"),
            })
        };
        let (oa, ob) = (parse_id(a)?, parse_id(b)?);
        let u = intern(oa, &mut orig_ids);
        let v = intern(ob, &mut orig_ids);
        if u == v {
            report.self_loops_dropped += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push(key);
        } else {
            report.duplicate_edges_dropped += 1;
        }
    }
    if edges.is_empty() {
        return Err(GraphError::Empty);
    }
    Ok((Graph::assemble(orig_ids.len(), &edges, orig_ids), report))
}

/// Headline numbers for a dataset, community block present when ground truth is.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub k_max: usize,
    pub k_avg: f64,
    pub communities: Option<CommunityStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityStats {
    pub count: usize,
    pub c_max: usize,
    pub c_min: usize,
    pub c_avg: f64,
}

pub fn graph_stats<F: Real>(graph: &Graph<F>, cover: Option<&GroundTruthCover>) -> GraphStats {
    let n = graph.num_nodes();
    let k_max = (0..n).map(|u| graph.degree(u)).max().unwrap_or(0);
    let communities = cover.map(|c| {
        let sizes: Vec<usize> = c.communities().iter().map(|m| m.len()).collect();
        CommunityStats {
            count: sizes.len(),
            c_max: sizes.iter().copied().max().unwrap_or(0),
            c_min: sizes.iter().copied().min().unwrap_or(0),
            c_avg: sizes.iter().sum::<usize>() as f64 / sizes.len().max(1) as f64,
        }
    });
    GraphStats {
        num_nodes: n,
        num_edges: graph.num_edges(),
        k_max,
        k_avg: if n == 0 {
            0.0
        } else {
            2.0 * graph.num_edges() as f64 / n as f64
        },
        communities,
    }
}
