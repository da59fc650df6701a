//! End-to-end library flows: graph to walks to vectors to clusters to
//! scores, on the bundled dataset and a generated benchmark.

use comembed::cluster::{kmeans, KmeansParams};
use comembed::datasets::load_bundled;
use comembed::embed::{train, SgnsParams};
use comembed::lfr::{generate_lfr, LfrParams};
use comembed::metrics::{mean_f1, nmi, omega, NmiNorm};
use comembed::walk::{generate_corpus, WalkMode, WalkParams};
use comembed::{Graph, GroundTruthCover, Partition};

fn embed_and_cluster(
    graph: &Graph<f64>,
    mode: WalkMode,
    weights: Option<&Partition>,
    k: usize,
    seed: u64,
) -> Partition {
    let walk_params = WalkParams::<f64> {
        mode,
        walk_len: 40,
        walks_per_node: 10,
        seed,
        ..WalkParams::default()
    };
    let corpus = generate_corpus(graph, &walk_params).unwrap();
    let sgns = SgnsParams::<f64> {
        dim: 32,
        window: 5,
        epochs: 10,
        seed,
        ..SgnsParams::default()
    };
    let trained = train(&corpus, weights, &sgns).unwrap();
    let rows: Vec<&[f64]> = (0..graph.num_nodes())
        .map(|v| trained.embedding.vector(v))
        .collect();
    let km = KmeansParams::<f64> {
        seed,
        ..KmeansParams::new(k)
    };
    Partition::from_labels(&kmeans(&rows, &km).unwrap().labels)
}

fn score(truth: &GroundTruthCover, pred: &Partition) -> (f64, f64, f64) {
    let (truth_partition, _) = truth.to_partition();
    (
        nmi::<f64>(&truth_partition, pred, NmiNorm::Max).unwrap(),
        omega::<f64>(truth, pred).unwrap(),
        mean_f1::<f64>(truth, pred).unwrap(),
    )
}

#[test]
fn karate_pipeline_recovers_the_factions() {
    let ds = load_bundled::<f64>("karate").unwrap();
    let pred = embed_and_cluster(&ds.graph, WalkMode::Pq, None, 2, 7);
    let (nmi_val, omega_val, f1_val) = score(&ds.ground_truth, &pred);
    assert!(nmi_val > 0.3, "nmi {nmi_val}");
    assert!(omega_val > 0.2, "omega {omega_val}");
    assert!(f1_val > 0.6, "f1 {f1_val}");
}

#[test]
fn spectrally_reweighted_pipeline_holds_up() {
    let ds = load_bundled::<f64>("karate").unwrap();
    let pred = embed_and_cluster(&ds.graph, WalkMode::MerwPq, None, 2, 7);
    assert_eq!(pred.num_nodes(), 34);
    let (nmi_val, _, _) = score(&ds.ground_truth, &pred);
    assert!(nmi_val > 0.3, "nmi {nmi_val}");
}

#[test]
fn oracle_weighted_embedding_nails_an_easy_benchmark() {
    let params = LfrParams {
        n: 300,
        mu: 0.1,
        seed: 2,
        ..LfrParams::default()
    };
    let (graph, truth) = generate_lfr::<f64>(&params).unwrap();
    let (oracle, _) = truth.to_partition();
    let pred = embed_and_cluster(
        &graph,
        WalkMode::MerwPq,
        Some(&oracle),
        oracle.num_communities(),
        1,
    );
    let (nmi_val, omega_val, _) = score(&truth, &pred);
    assert!(nmi_val > 0.8, "nmi {nmi_val}");
    assert!(omega_val > 0.6, "omega {omega_val}");
    assert!(omega_val > 0.6, "omega {omega_val}");
}
