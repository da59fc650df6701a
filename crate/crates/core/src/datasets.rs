//! Datasets compiled into the library.

use thiserror::Error;

use crate::graph::{parse_community_file, parse_edge_list, Graph, GraphError, GroundTruthCover};
use crate::scalar::Real;

const KARATE_EDGES: &str = include_str!("../data/karate.edges");
const KARATE_CMTY: &str = include_str!("../data/karate.cmty");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("no bundled dataset named {name:?} (available: {})", bundled_names().join(", "))]
    Unknown { name: String },
    #[error("bundled data failed to load: {0}")]
    Load(#[from] GraphError),
}

pub struct Dataset<F: Real> {
    pub name: String,
    pub graph: Graph<F>,
    pub ground_truth: GroundTruthCover,
}

pub fn bundled_names() -> Vec<&'static str> {
    vec!["karate"]
}

/// Loads a dataset compiled into the binary. Only `karate` ships here; other
/// classics are loaded from files via the edge-list and community formats.
pub fn load_bundled<F: Real>(name: &str) -> Result<Dataset<F>, DatasetError> {
    match name {
        "karate" => {
            let (graph, _) = parse_edge_list::<F>(KARATE_EDGES)?;
            let ground_truth = parse_community_file(KARATE_CMTY)?.resolve(&graph)?;
            Ok(Dataset {
                name: name.to_string(),
                graph,
                ground_truth,
            })
        }
        other => Err(DatasetError::Unknown { name: other.to_string() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_stats;

    #[test]
    fn karate_headline_numbers() {
        let ds = load_bundled::<f64>("karate").unwrap();
        let stats = graph_stats(&ds.graph, Some(&ds.ground_truth));
        assert_eq!(stats.num_nodes, 34);
        assert_eq!(stats.num_edges, 78);
        assert_eq!(stats.k_max, 17);
        assert!((stats.k_avg - 4.588).abs() < 5e-4);
        let comm = stats.communities.unwrap();
        assert_eq!(comm.count, 2);
        assert_eq!(comm.c_max, 18);
        assert_eq!(comm.c_min, 16);
        assert!((comm.c_avg - 17.00).abs() < 1e-12);
        assert!(ds.ground_truth.is_disjoint());
        assert!(ds.graph.is_connected());
    }

    #[test]
    fn unknown_dataset_is_an_error() {
        assert!(matches!(
            load_bundled::<f64>("petster"),
            Err(DatasetError::Unknown { .. })
        ));
    }
}
