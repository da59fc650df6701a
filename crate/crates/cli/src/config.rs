//! TOML run configuration and its expansion into a concrete plan.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

/// Accepts `x = 1.0` and `x = [1.0, 2.0]` alike.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(vs) => vs.clone(),
        }
    }
}

fn default_one_f64() -> OneOrMany<f64> {
    OneOrMany::One(1.0)
}

fn default_window() -> OneOrMany<usize> {
    OneOrMany::One(10)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    /// Bundled dataset name; for `files` datasets an optional report label
    /// overriding the edges file stem.
    pub name: Option<String>,
    /// Edge list path for `files`.
    pub edges: Option<PathBuf>,
    /// Optional community file for `files`.
    pub communities: Option<PathBuf>,
    pub lfr: Option<LfrConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Bundled,
    Files,
    Lfr,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LfrConfig {
    #[serde(default = "default_lfr_n")]
    pub n: usize,
    pub mu: OneOrMany<f64>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_k_avg")]
    pub k_avg: f64,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_tau1")]
    pub tau1: f64,
    #[serde(default = "default_tau2")]
    pub tau2: f64,
    #[serde(default = "default_c_min")]
    pub c_min: usize,
    #[serde(default = "default_c_max")]
    pub c_max: usize,
}

fn default_lfr_n() -> usize {
    1000
}
fn default_instances() -> usize {
    1
}
fn default_k_avg() -> f64 {
    8.0
}
fn default_k_max() -> usize {
    50
}
fn default_tau1() -> f64 {
    2.0
}
fn default_tau2() -> f64 {
    1.0
}
fn default_c_min() -> usize {
    5
}
fn default_c_max() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Method {
    #[serde(rename = "comb.cnm")]
    CombCnm,
    #[serde(rename = "comb.louvain")]
    CombLouvain,
    #[serde(rename = "comb.lpa")]
    CombLpa,
    #[serde(rename = "n2v")]
    N2v,
    #[serde(rename = "cn2v")]
    Cn2v,
    #[serde(rename = "mn2v")]
    Mn2v,
    #[serde(rename = "mcn2v")]
    Mcn2v,
}

impl Method {
    pub fn uses_embedding(self) -> bool {
        !matches!(self, Method::CombCnm | Method::CombLouvain | Method::CombLpa)
    }

    /// Embedding methods that weight pairs by the seed partition.
    pub fn uses_partition_weights(self) -> bool {
        matches!(self, Method::Cn2v | Method::Mcn2v)
    }

    /// Embedding methods that reweight edges by the dominant eigenvector.
    pub fn uses_spectral_weights(self) -> bool {
        matches!(self, Method::Mn2v | Method::Mcn2v)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::CombCnm => "comb.cnm",
            Method::CombLouvain => "comb.louvain",
            Method::CombLpa => "comb.lpa",
            Method::N2v => "n2v",
            Method::Cn2v => "cn2v",
            Method::Mn2v => "mn2v",
            Method::Mcn2v => "mcn2v",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionSource {
    Cnm,
    Louvain,
    Lpa,
    File,
    Oracle,
}

impl fmt::Display for PartitionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PartitionSource::Cnm => "cnm",
            PartitionSource::Louvain => "louvain",
            PartitionSource::Lpa => "lpa",
            PartitionSource::File => "file",
            PartitionSource::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub methods: Vec<Method>,
    pub partition_source: PartitionSource,
    pub partition_file: Option<PathBuf>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Zeroes the seconds column so reruns are byte-identical.
    #[serde(default = "default_true")]
    pub deterministic: bool,
    /// Output prefix; the report lands at `<output>.csv` and `<output>.json`.
    pub output: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_alpha() -> f64 {
    0.8
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkSection {
    pub p: OneOrMany<f64>,
    pub q: OneOrMany<f64>,
    pub walk_len: usize,
    pub walks_per_node: usize,
}

impl Default for WalkSection {
    fn default() -> Self {
        WalkSection {
            p: default_one_f64(),
            q: default_one_f64(),
            walk_len: 80,
            walks_per_node: 10,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgnsSection {
    pub dim: usize,
    pub window: OneOrMany<usize>,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for SgnsSection {
    fn default() -> Self {
        SgnsSection {
            dim: 128,
            window: default_window(),
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizeConfig {
    None,
    L2,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KmeansSection {
    pub restarts: usize,
    pub max_iter: usize,
    pub normalize: NormalizeConfig,
}

impl Default for KmeansSection {
    fn default() -> Self {
        KmeansSection {
            restarts: 10,
            max_iter: 100,
            normalize: NormalizeConfig::None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    pub run: RunSection,
    #[serde(default)]
    pub walk: WalkSection,
    #[serde(default)]
    pub sgns: SgnsSection,
    #[serde(default)]
    pub kmeans: KmeansSection,
}

/// One point of the p/q/window grid. The label is empty when the grid is a
/// single point, otherwise a suffix like `(p=0.5,q=2,ws=5)` naming only the
/// swept dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub p: f64,
    pub q: f64,
    pub window: usize,
    pub label: String,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.dataset.kind {
            DatasetKind::Bundled => {
                if self.dataset.name.is_none() {
                    bail!("dataset.kind = \"bundled\" needs dataset.name");
                }
            }
            DatasetKind::Files => {
                if self.dataset.edges.is_none() {
                    bail!("dataset.kind = \"files\" needs dataset.edges");
                }
            }
            DatasetKind::Lfr => {
                let lfr = self
                    .dataset
                    .lfr
                    .as_ref()
                    .context("dataset.kind = \"lfr\" needs a [dataset.lfr] table")?;
                if lfr.instances == 0 {
                    bail!("dataset.lfr.instances must be positive");
                }
                for mu in lfr.mu.values() {
                    if !(0.0..=1.0).contains(&mu) {
                        bail!("dataset.lfr.mu {mu} outside [0, 1]");
                    }
                }
            }
        }
        if self.run.methods.is_empty() {
            bail!("run.methods must list at least one method");
        }
        if self.run.seeds.is_empty() {
            bail!("run.seeds must list at least one seed");
        }
        if self.run.partition_source == PartitionSource::File
            && self.run.partition_file.is_none()
        {
            bail!("run.partition_source = \"file\" needs run.partition_file");
        }
        if !(0.0..=1.0).contains(&self.run.alpha) {
            bail!("run.alpha {} outside [0, 1]", self.run.alpha);
        }
        for p in self.walk.p.values() {
            if !p.is_finite() || p <= 0.0 {
                bail!("walk.p must be positive and finite, got {p}");
            }
        }
        for q in self.walk.q.values() {
            if !q.is_finite() || q <= 0.0 {
                bail!("walk.q must be positive and finite, got {q}");
            }
        }
        if self.walk.walk_len < 2 || self.walk.walks_per_node == 0 {
            bail!("walk.walk_len must be at least 2 and walk.walks_per_node positive");
        }
        if self.sgns.dim == 0 || self.sgns.epochs == 0 {
            bail!("sgns.dim and sgns.epochs must be positive");
        }
        for ws in self.sgns.window.values() {
            if ws == 0 {
                bail!("sgns.window must be positive");
            }
        }
        if !self.sgns.learning_rate.is_finite() || self.sgns.learning_rate <= 0.0 {
            bail!("sgns.learning_rate must be positive and finite");
        }
        if self.kmeans.restarts == 0 || self.kmeans.max_iter == 0 {
            bail!("kmeans.restarts and kmeans.max_iter must be positive");
        }
        Ok(())
    }

    /// Cross product of the swept walk and window settings.
    pub fn grid(&self) -> Vec<GridPoint> {
        let ps = self.walk.p.values();
        let qs = self.walk.q.values();
        let wss = self.sgns.window.values();
        let mut points = Vec::with_capacity(ps.len() * qs.len() * wss.len());
        for &p in &ps {
            for &q in &qs {
                for &ws in &wss {
                    let mut parts = Vec::new();
                    if ps.len() > 1 {
                        parts.push(format!("p={p}"));
                    }
                    if qs.len() > 1 {
                        parts.push(format!("q={q}"));
                    }
                    if wss.len() > 1 {
                        parts.push(format!("ws={ws}"));
                    }
                    let label = if parts.is_empty() {
                        String::new()
                    } else {
                        format!("({})", parts.join(","))
                    };
                    points.push(GridPoint {
                        p,
                        q,
                        window: ws,
                        label,
                    });
                }
            }
        }
        points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            r#"
[dataset]
kind = "bundled"
name = "karate"

[run]
methods = ["comb.louvain", "cn2v"]
partition_source = "lpa"
output = "out/karate"
{extra}
"#
        )
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg: RunConfig = toml::from_str(&minimal("")).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.run.seeds, vec![0]);
        assert!((cfg.run.alpha - 0.8).abs() < 1e-15);
        assert!(cfg.run.deterministic);
        assert_eq!(cfg.sgns.dim, 128);
        assert_eq!(cfg.walk.walk_len, 80);
        assert_eq!(cfg.kmeans.restarts, 10);
        let grid = cfg.grid();
        assert_eq!(grid.len(), 1);
        assert_eq!(grid[0].label, "");
    }

    #[test]
    fn grid_expands_cross_product_with_labels() {
        let text = format!(
            "{}\n[walk]\np = [0.5, 1.0]\nq = [1.0, 2.0]\n\n[sgns]\nwindow = [5, 10, 15]\n",
            minimal("")
        );
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        cfg.validate().unwrap();
        let grid = cfg.grid();
        assert_eq!(grid.len(), 12);
        assert_eq!(grid[0].label, "(p=0.5,q=1,ws=5)");
        assert!(grid.iter().all(|g| !g.label.is_empty()));
    }

    #[test]
    fn file_source_requires_path() {
        let text = minimal("").replace("\"lpa\"", "\"file\"");
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{}\ntypo = 1\n", minimal(""));
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }

    #[test]
    fn bad_ranges_are_rejected() {
        let cfg: RunConfig = toml::from_str(&minimal("alpha = 1.5")).unwrap();
        assert!(cfg.validate().is_err());
        let text = format!("{}\n[walk]\np = 0.0\n", minimal(""));
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn lfr_dataset_parses_mu_list() {
        let text = r#"
[dataset]
kind = "lfr"

[dataset.lfr]
mu = [0.2, 0.8]
instances = 10

[run]
methods = ["mcn2v"]
partition_source = "oracle"
output = "out/lfr"
"#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        cfg.validate().unwrap();
        let lfr = cfg.dataset.lfr.unwrap();
        assert_eq!(lfr.mu.values(), vec![0.2, 0.8]);
        assert_eq!(lfr.n, 1000);
        assert_eq!(lfr.instances, 10);
    }
}
