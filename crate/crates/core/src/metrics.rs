//! Core and periphery densities and the cores-periphery ratio of a partition.
//!
//! With `n_i` the core sizes and `m` the periphery size:
//!
//! ```text
//! density_cores     = C / sum_i n_i (n_i - 1) / 2
//! density_periphery = P / (m (m - 1) / 2 + m sum_i n_i)
//! r                 = density_cores / density_periphery
//! ```
//!
//! `C` sums edges inside a single core and `P` sums edges touching the
//! periphery. Edges joining two different cores count toward neither; their
//! total is reported as `intercore_weight`.

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, WeightedGraph};
use crate::hclust::Partition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionMetrics {
    pub core_weight: f64,
    pub periphery_weight: f64,
    pub intercore_weight: f64,
    pub core_pair_capacity: f64,
    pub periphery_pair_capacity: f64,
    /// `None` when the core pair capacity is zero.
    pub density_cores: Option<f64>,
    /// `None` when the periphery pair capacity is zero.
    pub density_periphery: Option<f64>,
    /// `None` unless both densities exist and the periphery density is > 0.
    pub r: Option<f64>,
}

/// Pair capacities of a partition; independent of the edge set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Capacities {
    pub core: f64,
    pub periphery: f64,
}

impl Capacities {
    pub fn of(p: &Partition) -> Self {
        let core: usize = p.core_sizes.iter().map(|&s| s * (s - 1) / 2).sum();
        let in_cores: usize = p.core_sizes.iter().sum();
        let m = p.n_periphery();
        let periphery = m * m.saturating_sub(1) / 2 + m * in_cores;
        Capacities {
            core: core as f64,
            periphery: periphery as f64,
        }
    }
}

pub fn core_weight(g: &WeightedGraph, p: &Partition) -> f64 {
    classify(g.edges(), p).0
}

pub fn periphery_weight(g: &WeightedGraph, p: &Partition) -> f64 {
    classify(g.edges(), p).1
}

pub fn compute_metrics(g: &WeightedGraph, p: &Partition) -> PartitionMetrics {
    metrics_from_edges(g.edges(), p, Capacities::of(p))
}

/// Returns `(C, P, W_intercore)`.
fn classify(edges: &[Edge], p: &Partition) -> (f64, f64, f64) {
    let (mut c, mut per, mut inter) = (0.0, 0.0, 0.0);
    for e in edges {
        match (p.assignment[e.u], p.assignment[e.v]) {
            (Some(a), Some(b)) if a == b => c += e.w,
            (Some(_), Some(_)) => inter += e.w,
            _ => per += e.w,
        }
    }
    (c, per, inter)
}

pub(crate) fn metrics_from_edges(edges: &[Edge], p: &Partition, cap: Capacities) -> PartitionMetrics {
    let (c, per, inter) = classify(edges, p);
    let density_cores = (cap.core > 0.0).then(|| c / cap.core);
    let density_periphery = (cap.periphery > 0.0).then(|| per / cap.periphery);
    PartitionMetrics {
        core_weight: c,
        periphery_weight: per,
        intercore_weight: inter,
        core_pair_capacity: cap.core,
        periphery_pair_capacity: cap.periphery,
        density_cores,
        density_periphery,
        r: ratio(c, per, cap),
    }
}

/// `(C / cap_core) / (P / cap_periphery)`, evaluated as
/// `(C * cap_periphery) / (P * cap_core)` so that scaling every weight by a
/// constant cancels exactly whenever the products are exact.
pub(crate) fn ratio(c: f64, per: f64, cap: Capacities) -> Option<f64> {
    if cap.core > 0.0 && cap.periphery > 0.0 && per > 0.0 {
        Some((c * cap.periphery) / (per * cap.core))
    } else {
        None
    }
}

/// Just `r`, skipping the struct.
pub(crate) fn ratio_from_edges(edges: &[Edge], p: &Partition, cap: Capacities) -> Option<f64> {
    let (c, per, _) = classify(edges, p);
    ratio(c, per, cap)
}
