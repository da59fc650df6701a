use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use comembed::community::{cnm, louvain, lpa, LPA_MAX_SWEEPS};
use comembed::graph::{graph_stats, parse_community_file, parse_edge_list};
use comembed::lfr::{generate_lfr, LfrParams};
use comembed_cli::config::RunConfig;
use comembed_cli::runner::execute;

#[derive(Parser)]
#[command(
    name = "comembed",
    about = "Community-aware node embedding benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a configured evaluation and write CSV/JSON reports.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate a synthetic benchmark graph and its planted communities.
    GenLfr {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Writes `<prefix>.edges` and `<prefix>.cmty`.
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long, default_value_t = 8.0)]
        k_avg: f64,
        #[arg(long, default_value_t = 50)]
        k_max: usize,
        #[arg(long, default_value_t = 2.0)]
        tau1: f64,
        #[arg(long, default_value_t = 1.0)]
        tau2: f64,
        #[arg(long, default_value_t = 5)]
        c_min: usize,
        #[arg(long, default_value_t = 100)]
        c_max: usize,
    },
    /// Print summary statistics of an edge list as JSON.
    Stats {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        communities: Option<PathBuf>,
    },
    /// Run a combinatorial community detector and write the communities.
    Partition {
        #[arg(long, value_enum)]
        method: CombMethod,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CombMethod {
    Cnm,
    Louvain,
    Lpa,
}

fn cmd_run(config_path: &Path) -> Result<ExitCode> {
    let cfg = match RunConfig::load(config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return Ok(ExitCode::from(1));
        }
    };
    let (report, failures) = execute(&cfg)?;
    let csv_path = cfg.run.output.with_extension("csv");
    let json_path = cfg.run.output.with_extension("json");
    if let Some(dir) = csv_path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    let mut csv = std::fs::File::create(&csv_path)
        .with_context(|| format!("creating {}", csv_path.display()))?;
    report.write_csv(&mut csv)?;
    let mut json = std::fs::File::create(&json_path)
        .with_context(|| format!("creating {}", json_path.display()))?;
    report.write_json(&mut json)?;
    println!(
        "wrote {} and {} ({} records, {} failed)",
        csv_path.display(),
        json_path.display(),
        report.records.len(),
        failures
    );
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen_lfr(
    n: usize,
    mu: f64,
    seed: u64,
    out_prefix: &Path,
    k_avg: f64,
    k_max: usize,
    tau1: f64,
    tau2: f64,
    c_min: usize,
    c_max: usize,
) -> Result<()> {
    let params = LfrParams {
        n,
        tau1,
        tau2,
        mu,
        k_avg,
        k_max,
        c_min,
        c_max,
        seed,
    };
    let (graph, truth) = generate_lfr::<f64>(&params)?;
    if let Some(dir) = out_prefix.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let edges_path = out_prefix.with_extension("edges");
    let cmty_path = out_prefix.with_extension("cmty");
    let mut edges = std::fs::File::create(&edges_path)
        .with_context(|| format!("creating {}", edges_path.display()))?;
    graph.write_edge_list(&mut edges)?;
    let mut cmty = std::fs::File::create(&cmty_path)
        .with_context(|| format!("creating {}", cmty_path.display()))?;
    truth.write_communities(&graph, &mut cmty)?;
    println!(
        "wrote {} ({} nodes, {} edges) and {} ({} communities)",
        edges_path.display(),
        graph.num_nodes(),
        graph.num_edges(),
        cmty_path.display(),
        truth.num_communities()
    );
    Ok(())
}

fn cmd_stats(edges: &PathBuf, communities: Option<&PathBuf>) -> Result<()> {
    let text =
        std::fs::read_to_string(edges).with_context(|| format!("reading {}", edges.display()))?;
    let (graph, _) = parse_edge_list::<f64>(&text)?;
    let cover = match communities {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Some(parse_community_file(&text)?.resolve(&graph)?)
        }
        None => None,
    };
    let stats = graph_stats(&graph, cover.as_ref());
    let mut value = serde_json::json!({
        "num_nodes": stats.num_nodes,
        "num_edges": stats.num_edges,
        "k_max": stats.k_max,
        "k_avg": stats.k_avg,
    });
    if let Some(c) = stats.communities {
        value["communities"] = serde_json::json!({
            "count": c.count,
            "c_max": c.c_max,
            "c_min": c.c_min,
            "c_avg": c.c_avg,
        });
    }
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn cmd_partition(
    method: CombMethod,
    edges: &PathBuf,
    seed: u64,
    out: Option<&PathBuf>,
) -> Result<()> {
    let text =
        std::fs::read_to_string(edges).with_context(|| format!("reading {}", edges.display()))?;
    let (graph, _) = parse_edge_list::<f64>(&text)?;
    let partition = match method {
        CombMethod::Cnm => cnm(&graph),
        CombMethod::Louvain => louvain(&graph, seed),
        CombMethod::Lpa => {
            let outcome = lpa(&graph, seed, LPA_MAX_SWEEPS);
            if !outcome.converged {
                eprintln!(
                    "note: label propagation stopped after {} sweeps without settling",
                    outcome.sweeps
                );
            }
            outcome.partition
        }
    };
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            partition.write_communities(&graph, &mut file)?;
            println!(
                "wrote {} ({} communities)",
                path.display(),
                partition.num_communities()
            );
        }
        None => {
            let mut buf = Vec::new();
            partition.write_communities(&graph, &mut buf)?;
            print!("{}", String::from_utf8(buf).expect("ids are ascii"));
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { config } => cmd_run(&config),
        Cmd::GenLfr {
            n,
            mu,
            seed,
            out_prefix,
            k_avg,
            k_max,
            tau1,
            tau2,
            c_min,
            c_max,
        } => {
            if !(0.0..=1.0).contains(&mu) {
                eprintln!("error: --mu must lie in [0, 1]");
                return Ok(ExitCode::from(1));
            }
            cmd_gen_lfr(
                n, mu, seed, &out_prefix, k_avg, k_max, tau1, tau2, c_min, c_max,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Stats { edges, communities } => {
            cmd_stats(&edges, communities.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Partition {
            method,
            edges,
            seed,
            out,
        } => {
            cmd_partition(method, &edges, seed, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

// exit codes: 0 success, 1 config/usage error, 2 runtime failure
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 {
                0 // --help / --version
            } else {
                1
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
