//! End-to-end search for the multicore-periphery partition with maximal z.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::hclust::{
    average_linkage, build_distance_matrix, enumerate_partitions, ClusterError, Dendrogram,
    DistanceTransform, Partition, TieBreak,
};
use crate::metrics::{compute_metrics, PartitionMetrics};
use crate::null_model::{evaluate_ensemble, ConfigError, EnsembleResult, RandomizationConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("no dendrogram cut has a defined z-score with at least one core and one periphery vertex")]
    NoValidPartition,
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Every knob that influences an analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub transform: DistanceTransform,
    pub tie_break: TieBreak,
    pub randomization: RandomizationConfig,
}

impl AnalysisConfig {
    pub fn new(transform: DistanceTransform, randomization: RandomizationConfig) -> Self {
        AnalysisConfig {
            transform,
            tie_break: TieBreak::default(),
            randomization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub optimal_cut: usize,
    pub optimal_partition: Partition,
    pub optimal_metrics: PartitionMetrics,
    pub optimal_z: f64,
    pub z_curve: EnsembleResult,
    pub dendrogram: Dendrogram,
    pub config_echo: AnalysisConfig,
}

/// Wall-clock time spent in each pipeline stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub distance_ms: f64,
    pub linkage_ms: f64,
    pub enumerate_ms: f64,
    pub ensemble_ms: f64,
    pub select_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn find_optimal(
    g: &WeightedGraph,
    transform: DistanceTransform,
    cfg: &RandomizationConfig,
) -> Result<AnalysisResult, AnalysisError> {
    analyze(g, &AnalysisConfig::new(transform, cfg.clone()))
}

pub fn analyze(g: &WeightedGraph, cfg: &AnalysisConfig) -> Result<AnalysisResult, AnalysisError> {
    analyze_timed(g, cfg).map(|(r, _)| r)
}

pub fn analyze_timed(
    g: &WeightedGraph,
    cfg: &AnalysisConfig,
) -> Result<(AnalysisResult, StageTimings), AnalysisError> {
    if g.n_vertices() < 3 {
        return Err(AnalysisError::TooFewVertices(g.n_vertices()));
    }
    cfg.randomization.validate()?;
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let dm = build_distance_matrix(g, cfg.transform)?;
    timings.distance_ms = ms(t.elapsed());

    let t = Instant::now();
    let dendrogram = average_linkage(&dm, cfg.tie_break);
    timings.linkage_ms = ms(t.elapsed());

    let t = Instant::now();
    let partitions = enumerate_partitions(&dendrogram);
    timings.enumerate_ms = ms(t.elapsed());

    let t = Instant::now();
    let z_curve = evaluate_ensemble(g, &partitions, &cfg.randomization)?;
    timings.ensemble_ms = ms(t.elapsed());

    let t = Instant::now();
    let best = select_optimal(&z_curve).ok_or(AnalysisError::NoValidPartition)?;
    let optimal_partition = partitions[best].clone();
    let optimal_metrics = compute_metrics(g, &optimal_partition);
    let optimal_z = z_curve.per_partition[best].z.expect("selected cut has z");
    timings.select_ms = ms(t.elapsed());

    Ok((
        AnalysisResult {
            optimal_cut: optimal_partition.cut_index,
            optimal_partition,
            optimal_metrics,
            optimal_z,
            z_curve,
            dendrogram,
            config_echo: cfg.clone(),
        },
        timings,
    ))
}

/// Index of the cut with maximal defined z among cuts with `k >= 1` and
/// `m >= 1`; ties go to the smaller cut.
pub fn select_optimal(curve: &EnsembleResult) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in curve.per_partition.iter().enumerate() {
        let Some(z) = s.z else { continue };
        if s.n_cores == 0 || s.n_periphery == 0 {
            continue;
        }
        if best.is_none_or(|(_, bz)| z > bz) {
            best = Some((i, z));
        }
    }
    best.map(|(i, _)| i)
}

/// Fraction of vertex pairs on whose status (same core or not) both
/// partitions agree.
pub fn pair_agreement(a: &Partition, b: &Partition) -> f64 {
    let n = a.n_vertices();
    assert_eq!(n, b.n_vertices(), "partitions of different vertex sets");
    if n < 2 {
        return 1.0;
    }
    let together = |p: &Partition, i: usize, j: usize| matches!((p.core_of(i), p.core_of(j)), (Some(x), Some(y)) if x == y);
    let mut agree = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            agree += usize::from(together(a, i, j) == together(b, i, j));
        }
    }
    agree as f64 / (n * (n - 1) / 2) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformOutcome {
    pub transform: DistanceTransform,
    pub result: Option<AnalysisResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub a: DistanceTransform,
    pub b: DistanceTransform,
    pub pair_agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub outcomes: Vec<TransformOutcome>,
    /// Only for pairs where both transforms produced a result.
    pub agreement: Vec<Agreement>,
}

impl SweepResult {
    /// Successful outcome with the largest optimal z (first wins on ties).
    pub fn best(&self) -> Option<&AnalysisResult> {
        self.outcomes
            .iter()
            .filter_map(|o| o.result.as_ref())
            .fold(None, |best: Option<&AnalysisResult>, r| match best {
                Some(b) if b.optimal_z >= r.optimal_z => Some(b),
                _ => Some(r),
            })
    }
}

pub fn sweep_transforms(g: &WeightedGraph, cfg: &RandomizationConfig) -> SweepResult {
    sweep_with(g, cfg, TieBreak::default())
}

pub fn sweep_with(g: &WeightedGraph, cfg: &RandomizationConfig, tie_break: TieBreak) -> SweepResult {
    let outcomes: Vec<TransformOutcome> = DistanceTransform::ALL
        .into_iter()
        .map(|transform| {
            let acfg = AnalysisConfig {
                transform,
                tie_break,
                randomization: cfg.clone(),
            };
            match analyze(g, &acfg) {
                Ok(r) => TransformOutcome {
                    transform,
                    result: Some(r),
                    error: None,
                },
                Err(e) => TransformOutcome {
                    transform,
                    result: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let mut agreement = Vec::new();
    for (i, x) in outcomes.iter().enumerate() {
        for y in &outcomes[i + 1..] {
            if let (Some(rx), Some(ry)) = (&x.result, &y.result) {
                agreement.push(Agreement {
                    a: x.transform,
                    b: y.transform,
                    pair_agreement: pair_agreement(&rx.optimal_partition, &ry.optimal_partition),
                });
            }
        }
    }
    SweepResult { outcomes, agreement }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_edge_list, EdgeFormat};
    use crate::null_model::PartitionStats;

    fn stats(cut: usize, k: usize, m: usize, z: Option<f64>) -> PartitionStats {
        PartitionStats {
            cut_index: cut,
            n_cores: k,
            n_periphery: m,
            r_obs: z,
            mean_r: z,
            std_r: z,
            z,
            n_valid_replicas: 10,
        }
    }

    #[test]
    fn selection_skips_invalid_and_prefers_earlier_ties() {
        let curve = EnsembleResult {
            per_partition: vec![
                stats(0, 0, 5, Some(99.0)),
                stats(1, 1, 3, Some(2.0)),
                stats(2, 1, 2, None),
                stats(3, 2, 1, Some(4.0)),
                stats(4, 1, 1, Some(4.0)),
                stats(5, 1, 0, Some(50.0)),
            ],
            diagnostics: vec![],
        };
        assert_eq!(select_optimal(&curve), Some(3));
        let none = EnsembleResult {
            per_partition: vec![stats(0, 0, 3, Some(1.0)), stats(1, 1, 1, None)],
            diagnostics: vec![],
        };
        assert_eq!(select_optimal(&none), None);
    }

    #[test]
    fn pair_agreement_basics() {
        let a = Partition::from_groups(4, &[vec![0, 1], vec![2, 3]], 0);
        let b = Partition::from_groups(4, &[vec![0, 1, 2, 3]], 0);
        assert_eq!(pair_agreement(&a, &a), 1.0);
        // Pairs: 01 23 agree; 02 03 12 13 disagree.
        assert!((pair_agreement(&a, &b) - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn complete_graph_has_no_valid_partition() {
        let mut text = String::new();
        for i in 0..5 {
            for j in i + 1..5 {
                text.push_str(&format!("v{i} v{j} 1\n"));
            }
        }
        let g = parse_edge_list(&text, EdgeFormat::Whitespace).unwrap();
        let cfg = RandomizationConfig {
            n_replicas: 50,
            ..Default::default()
        };
        for t in DistanceTransform::ALL {
            assert_eq!(find_optimal(&g, t, &cfg), Err(AnalysisError::NoValidPartition));
        }
    }

    #[test]
    fn tiny_graph_rejected() {
        let g = parse_edge_list("a b", EdgeFormat::Whitespace).unwrap();
        assert_eq!(
            find_optimal(&g, DistanceTransform::SimComplement, &RandomizationConfig::default()),
            Err(AnalysisError::TooFewVertices(2))
        );
    }
}
