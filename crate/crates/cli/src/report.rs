//! Evaluation records and their CSV/JSON serialisations.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

pub const CSV_HEADER: &str = "dataset,method,partition_source,seed,K,nmi,nmi_sqrt,omega,f1,modularity,seconds";

#[derive(Debug, Clone, Serialize)]
pub struct EvalRecord {
    pub dataset: String,
    /// Method name, suffixed with the grid point when a sweep is active.
    pub method: String,
    /// `-` for methods that take no seed partition.
    pub partition_source: String,
    pub seed: u64,
    pub k: usize,
    pub nmi: f64,
    pub nmi_sqrt: f64,
    pub omega: f64,
    pub f1: f64,
    pub modularity: f64,
    pub seconds: f64,
}

impl EvalRecord {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.dataset,
            self.method,
            self.partition_source,
            self.seed,
            self.k,
            self.nmi,
            self.nmi_sqrt,
            self.omega,
            self.f1,
            self.modularity,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricSummary {
    pub nmi: f64,
    pub nmi_sqrt: f64,
    pub omega: f64,
    pub f1: f64,
    pub modularity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub dataset: String,
    pub method: String,
    pub partition_source: String,
    pub runs: usize,
    pub median: MetricSummary,
    pub min: MetricSummary,
    pub max: MetricSummary,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct EvalReport {
    pub records: Vec<EvalRecord>,
    pub groups: Vec<GroupSummary>,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn summarize(records: &[&EvalRecord], pick: fn(&[f64]) -> f64) -> MetricSummary {
    let stat = |get: fn(&EvalRecord) -> f64| {
        let vals: Vec<f64> = records.iter().map(|r| get(r)).collect();
        pick(&vals)
    };
    MetricSummary {
        nmi: stat(|r| r.nmi),
        nmi_sqrt: stat(|r| r.nmi_sqrt),
        omega: stat(|r| r.omega),
        f1: stat(|r| r.f1),
        modularity: stat(|r| r.modularity),
    }
}

impl EvalReport {
    /// Groups records by (dataset, method, partition_source) in first-seen
    /// order and attaches median/min/max summaries.
    pub fn from_records(records: Vec<EvalRecord>) -> Self {
        let mut keys: Vec<(String, String, String)> = Vec::new();
        for r in &records {
            let key = (
                r.dataset.clone(),
                r.method.clone(),
                r.partition_source.clone(),
            );
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let groups = keys
            .into_iter()
            .map(|(dataset, method, source)| {
                let members: Vec<&EvalRecord> = records
                    .iter()
                    .filter(|r| {
                        r.dataset == dataset
                            && r.method == method
                            && r.partition_source == source
                    })
                    .collect();
                GroupSummary {
                    runs: members.len(),
                    median: summarize(&members, |vals| median(&mut vals.to_vec())),
                    min: summarize(&members, |vals| {
                        vals.iter().copied().fold(f64::INFINITY, f64::min)
                    }),
                    max: summarize(&members, |vals| {
                        vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                    }),
                    dataset,
                    method,
                    partition_source: source,
                }
            })
            .collect();
        EvalReport { records, groups }
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.records {
            writeln!(out, "{}", r.csv_line())?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: &mut W) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }
}
