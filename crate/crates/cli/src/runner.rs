//! Executes configured evaluation runs: dataset loading, seed partitions,
//! method pipelines, and record collection.

use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use comembed::cluster::{kmeans, KmeansParams, Normalize};
use comembed::community::{cnm, louvain, lpa, modularity, LPA_MAX_SWEEPS};
use comembed::embed::{train, SgnsParams};
use comembed::graph::{parse_community_file, parse_edge_list};
use comembed::lfr::{generate_lfr, LfrParams};
use comembed::metrics::{mean_f1, nmi, omega, NmiNorm};
use comembed::walk::{generate_corpus, WalkMode, WalkParams};
use comembed::{Graph, GroundTruthCover, Partition};

use crate::config::{
    DatasetKind, GridPoint, Method, NormalizeConfig, PartitionSource, RunConfig,
};
use crate::report::{EvalRecord, EvalReport};

pub struct DatasetInstance {
    pub name: String,
    pub graph: Graph<f64>,
    pub truth: Option<GroundTruthCover>,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one generated benchmark instance, stable across runs.
pub fn lfr_instance_seed(mu: f64, instance: usize) -> u64 {
    mix(mu.to_bits() ^ mix(instance as u64))
}

pub fn load_datasets(cfg: &RunConfig) -> Result<Vec<DatasetInstance>> {
    match cfg.dataset.kind {
        DatasetKind::Bundled => {
            let name = cfg.dataset.name.as_ref().expect("validated");
            let ds = comembed::datasets::load_bundled::<f64>(name)?;
            Ok(vec![DatasetInstance {
                name: ds.name,
                graph: ds.graph,
                truth: Some(ds.ground_truth),
            }])
        }
        DatasetKind::Files => {
            let edges_path = cfg.dataset.edges.as_ref().expect("validated");
            let text = std::fs::read_to_string(edges_path)
                .with_context(|| format!("reading {}", edges_path.display()))?;
            let (graph, report) = parse_edge_list::<f64>(&text)?;
            if report.self_loops_dropped + report.duplicate_edges_dropped > 0 {
                eprintln!(
                    "note: dropped {} self loops and {} duplicate edges from {}",
                    report.self_loops_dropped,
                    report.duplicate_edges_dropped,
                    edges_path.display()
                );
            }
            let truth = match &cfg.dataset.communities {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    Some(parse_community_file(&text)?.resolve(&graph)?)
                }
                None => None,
            };
            let name = cfg.dataset.name.clone().unwrap_or_else(|| {
                edges_path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "files".into())
            });
            Ok(vec![DatasetInstance { name, graph, truth }])
        }
        DatasetKind::Lfr => {
            let lfr = cfg.dataset.lfr.as_ref().expect("validated");
            let mut out = Vec::new();
            for mu in lfr.mu.values() {
                for i in 0..lfr.instances {
                    let params = LfrParams {
                        n: lfr.n,
                        tau1: lfr.tau1,
                        tau2: lfr.tau2,
                        mu,
                        k_avg: lfr.k_avg,
                        k_max: lfr.k_max,
                        c_min: lfr.c_min,
                        c_max: lfr.c_max,
                        seed: lfr_instance_seed(mu, i),
                    };
                    let (graph, truth) = generate_lfr::<f64>(&params)
                        .with_context(|| format!("generating mu={mu} instance {i}"))?;
                    out.push(DatasetInstance {
                        name: format!("lfr-n{}-mu{:.2}-i{}", lfr.n, mu, i),
                        graph,
                        truth: Some(truth),
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Computes the seed partition used for pair weighting and for choosing the
/// cluster count.
pub fn seed_partition(
    cfg: &RunConfig,
    instance: &DatasetInstance,
    seed: u64,
) -> Result<Partition> {
    match cfg.run.partition_source {
        PartitionSource::Cnm => Ok(cnm(&instance.graph)),
        PartitionSource::Louvain => Ok(louvain(&instance.graph, seed)),
        PartitionSource::Lpa => Ok(lpa(&instance.graph, seed, LPA_MAX_SWEEPS).partition),
        PartitionSource::File => {
            let path = cfg.run.partition_file.as_ref().expect("validated");
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let cover = parse_community_file(&text)?.resolve(&instance.graph)?;
            let (partition, flatten) = cover.to_partition();
            if flatten.overlapping_nodes + flatten.uncovered_nodes > 0 {
                eprintln!(
                    "note: flattened {} ({} overlapping, {} uncovered nodes)",
                    path.display(),
                    flatten.overlapping_nodes,
                    flatten.uncovered_nodes
                );
            }
            Ok(partition)
        }
        PartitionSource::Oracle => {
            let truth = instance
                .truth
                .as_ref()
                .ok_or_else(|| anyhow!("oracle partition needs ground truth"))?;
            Ok(truth.to_partition().0)
        }
    }
}

fn predict(
    cfg: &RunConfig,
    instance: &DatasetInstance,
    method: Method,
    grid: &GridPoint,
    seed: u64,
) -> Result<(Partition, usize, String)> {
    if !method.uses_embedding() {
        let partition = match method {
            Method::CombCnm => cnm(&instance.graph),
            Method::CombLouvain => louvain(&instance.graph, seed),
            Method::CombLpa => lpa(&instance.graph, seed, LPA_MAX_SWEEPS).partition,
            _ => unreachable!(),
        };
        let k = partition.num_communities();
        return Ok((partition, k, "-".into()));
    }

    let source = seed_partition(cfg, instance, seed)?;
    let k = source.num_communities();
    if k == 0 {
        bail!("seed partition is empty");
    }

    let walk_params = WalkParams::<f64> {
        mode: if method.uses_spectral_weights() {
            WalkMode::MerwPq
        } else {
            WalkMode::Pq
        },
        p: grid.p,
        q: grid.q,
        walk_len: cfg.walk.walk_len,
        walks_per_node: cfg.walk.walks_per_node,
        seed,
    };
    let corpus = generate_corpus(&instance.graph, &walk_params)?;

    let sgns = SgnsParams::<f64> {
        dim: cfg.sgns.dim,
        window: grid.window,
        negatives: cfg.sgns.negatives,
        epochs: cfg.sgns.epochs,
        learning_rate: cfg.sgns.learning_rate,
        alpha: cfg.run.alpha,
        seed,
    };
    let weights = method.uses_partition_weights().then_some(&source);
    let trained = train(&corpus, weights, &sgns)?;

    let rows: Vec<&[f64]> = (0..instance.graph.num_nodes())
        .map(|v| trained.embedding.vector(v))
        .collect();
    let km = KmeansParams::<f64> {
        k,
        max_iter: cfg.kmeans.max_iter,
        tol: 0.0,
        seed,
        restarts: cfg.kmeans.restarts,
        normalize: match cfg.kmeans.normalize {
            NormalizeConfig::None => Normalize::None,
            NormalizeConfig::L2 => Normalize::L2,
        },
    };
    let clustered = kmeans(&rows, &km)?;
    Ok((
        Partition::from_labels(&clustered.labels),
        k,
        cfg.run.partition_source.to_string(),
    ))
}

/// Runs one (dataset, method, grid point, seed) cell.
pub fn run_single(
    cfg: &RunConfig,
    instance: &DatasetInstance,
    method: Method,
    grid: &GridPoint,
    seed: u64,
) -> Result<EvalRecord> {
    let started = Instant::now();
    let (predicted, k, source_label) = predict(cfg, instance, method, grid, seed)?;
    let seconds = if cfg.run.deterministic {
        0.0
    } else {
        started.elapsed().as_secs_f64()
    };

    let q = modularity(&instance.graph, &predicted)?;
    let (nmi_max, nmi_geo, om, f1) = match &instance.truth {
        Some(truth) => {
            let (truth_partition, _) = truth.to_partition();
            (
                nmi::<f64>(&truth_partition, &predicted, NmiNorm::Max)?,
                nmi::<f64>(&truth_partition, &predicted, NmiNorm::Geometric)?,
                omega::<f64>(truth, &predicted)?,
                mean_f1::<f64>(truth, &predicted)?,
            )
        }
        None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    };

    Ok(EvalRecord {
        dataset: instance.name.clone(),
        method: format!("{method}{}", grid.label),
        partition_source: source_label,
        seed,
        k,
        nmi: nmi_max,
        nmi_sqrt: nmi_geo,
        omega: om,
        f1,
        modularity: q,
        seconds,
    })
}

/// Runs the whole plan. Failed cells are reported on stderr and skipped;
/// the failure count is returned alongside the report.
pub fn execute(cfg: &RunConfig) -> Result<(EvalReport, usize)> {
    let instances = load_datasets(cfg)?;
    let grid = cfg.grid();
    let mut records = Vec::new();
    let mut failures = 0usize;
    for instance in &instances {
        for &method in &cfg.run.methods {
            let points: &[GridPoint] = if method.uses_embedding() {
                &grid
            } else {
                // combinatorial methods ignore the sweep
                std::slice::from_ref(&grid[0])
            };
            for point in points {
                let label = if method.uses_embedding() {
                    point.label.clone()
                } else {
                    String::new()
                };
                let point = GridPoint {
                    label,
                    ..point.clone()
                };
                for &seed in &cfg.run.seeds {
                    match run_single(cfg, instance, method, &point, seed) {
                        Ok(record) => records.push(record),
                        Err(e) => {
                            failures += 1;
                            eprintln!(
                                "error: {} {}{} seed {seed}: {e:#}",
                                instance.name, method, point.label
                            );
                        }
                    }
                }
            }
        }
    }
    Ok((EvalReport::from_records(records), failures))
}
