//! Run reports and the files written for a finished analysis.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::WeightedGraph;
use crate::optimizer::{AnalysisResult, StageTimings, SweepResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Periphery marker used in per-vertex tables.
pub const PERIPHERY: &str = "P";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRow {
    pub label: String,
    /// 1-based core id; `None` for periphery.
    pub core_id: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub input_digest: String,
    pub analysis: AnalysisResult,
    pub vertices: Vec<VertexRow>,
    /// Labels grouped core by core, periphery last.
    pub matrix_order: Vec<String>,
    pub timing: Option<StageTimings>,
}

pub fn input_digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

/// Vertex permutation for matrix rendering: core blocks in core-id order
/// (largest first), each sorted by vertex id, then the periphery.
pub fn export_matrix_order(result: &AnalysisResult) -> Vec<usize> {
    let p = &result.optimal_partition;
    let mut order: Vec<usize> = p.cores().into_iter().flatten().collect();
    order.extend(p.periphery());
    order
}

impl RunReport {
    pub fn new(
        g: &WeightedGraph,
        input_text: &str,
        analysis: AnalysisResult,
        timing: Option<StageTimings>,
    ) -> Self {
        let vertices = (0..g.n_vertices())
            .map(|v| VertexRow {
                label: g.label(v).to_string(),
                core_id: analysis.optimal_partition.core_of(v).map(|c| c + 1),
            })
            .collect();
        let matrix_order = export_matrix_order(&analysis)
            .into_iter()
            .map(|v| g.label(v).to_string())
            .collect();
        RunReport {
            schema_version: SCHEMA_VERSION,
            input_digest: input_digest(input_text),
            analysis,
            vertices,
            matrix_order,
            timing,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `label,core_id` with `P` marking periphery rows.
    pub fn partition_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "core_id"]).expect("in-memory write");
        for row in &self.vertices {
            let id = row
                .core_id
                .map(|c| c.to_string())
                .unwrap_or_else(|| PERIPHERY.to_string());
            w.write_record([row.label.as_str(), id.as_str()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }

    /// One-line summary of the selected cut.
    pub fn summary(&self) -> String {
        let a = &self.analysis;
        let r = a
            .optimal_metrics
            .r
            .map(|r| format!("{r:.6}"))
            .unwrap_or_else(|| "undefined".into());
        format!(
            "transform={} cut={} k={} m={} r={} z={:.6}",
            a.config_echo.transform,
            a.optimal_cut,
            a.optimal_partition.n_cores(),
            a.optimal_partition.n_periphery(),
            r,
            a.optimal_z
        )
    }

    /// Writes the partition (in `format`), `zcurve.csv`, `dendrogram.csv`
    /// and `diagnostics.csv` into `dir`.
    pub fn write_outputs(&self, dir: &Path, format: OutputFormat) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        match format {
            OutputFormat::Json => fs::write(dir.join("partition.json"), self.to_json())?,
            OutputFormat::Csv => fs::write(dir.join("partition.csv"), self.partition_csv())?,
        }
        fs::write(dir.join("zcurve.csv"), self.analysis.z_curve.zcurve_csv())?;
        fs::write(dir.join("dendrogram.csv"), self.analysis.dendrogram.to_csv())?;
        fs::write(
            dir.join("diagnostics.csv"),
            self.analysis.z_curve.diagnostics_csv(),
        )?;
        Ok(())
    }
}

/// Parses a `label,core_id` table back into rows.
pub fn parse_partition_csv(text: &str) -> Result<Vec<VertexRow>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let label = rec.get(0).ok_or("missing label")?.to_string();
        let id = rec.get(1).ok_or("missing core_id")?;
        let core_id = if id == PERIPHERY {
            None
        } else {
            Some(id.parse().map_err(|_| format!("bad core id {id:?}"))?)
        };
        rows.push(VertexRow { label, core_id });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub transform: String,
    pub optimal_cut: Option<usize>,
    pub n_cores: Option<usize>,
    pub n_periphery: Option<usize>,
    pub r: Option<f64>,
    pub z: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub input_digest: String,
    pub transforms: Vec<SweepSummaryRow>,
    pub agreement: Vec<crate::optimizer::Agreement>,
}

impl SweepReport {
    pub fn new(input_text: &str, sweep: &SweepResult) -> Self {
        let transforms = sweep
            .outcomes
            .iter()
            .map(|o| SweepSummaryRow {
                transform: o.transform.to_string(),
                optimal_cut: o.result.as_ref().map(|r| r.optimal_cut),
                n_cores: o.result.as_ref().map(|r| r.optimal_partition.n_cores()),
                n_periphery: o.result.as_ref().map(|r| r.optimal_partition.n_periphery()),
                r: o.result.as_ref().and_then(|r| r.optimal_metrics.r),
                z: o.result.as_ref().map(|r| r.optimal_z),
                error: o.error.clone(),
            })
            .collect();
        SweepReport {
            schema_version: SCHEMA_VERSION,
            input_digest: input_digest(input_text),
            transforms,
            agreement: sweep.agreement.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
