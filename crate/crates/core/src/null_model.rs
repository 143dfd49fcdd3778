//! Degree-preserving randomization and per-partition z-scores.
//!
//! Replicas come from weight-carrying double edge swaps: each accepted swap
//! rewires `(a,b,w1),(c,d,w2)` into `(a,d,w1),(c,b,w2)`. Binary degrees and
//! the weight multiset are preserved exactly; vertex strengths only in
//! expectation, which the per-replica drift diagnostic quantifies.
//!
//! Replica `i` draws from ChaCha8 stream `i` of the master seed, so results
//! do not depend on how replicas are scheduled. Statistics are folded in
//! replica-index order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, WeightedGraph};
use crate::hclust::Partition;
use crate::metrics::{ratio_from_edges, Capacities};

/// Standard deviations below this leave z undefined.
pub const MIN_STD: f64 = 1e-12;

/// Replicas evaluated per parallel batch before folding into the statistics.
const BLOCK: usize = 512;

/// Vertex counts up to this use a dense adjacency bitmap during swaps.
const DENSE_LOOKUP_MAX: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("n_replicas must be at least 2, got {0}")]
    TooFewReplicas(usize),
    #[error("swap_factor must be finite and > 0, got {0}")]
    BadSwapFactor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// One replica set scores every partition.
    #[default]
    Shared,
    /// Every partition gets its own independently seeded replica set.
    PerPartition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizationConfig {
    pub n_replicas: usize,
    /// Attempted swaps per replica are `ceil(swap_factor * n_edges)`.
    pub swap_factor: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub mode: EnsembleMode,
}

impl Default for RandomizationConfig {
    fn default() -> Self {
        RandomizationConfig {
            n_replicas: 1000,
            swap_factor: 10.0,
            master_seed: 0,
            mode: EnsembleMode::Shared,
        }
    }
}

impl RandomizationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_replicas < 2 {
            return Err(ConfigError::TooFewReplicas(self.n_replicas));
        }
        if !(self.swap_factor.is_finite() && self.swap_factor > 0.0) {
            return Err(ConfigError::BadSwapFactor(self.swap_factor));
        }
        Ok(())
    }

    pub fn attempts(&self, n_edges: usize) -> usize {
        (self.swap_factor * n_edges as f64).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaDiagnostic {
    pub replica_index: usize,
    pub accepted_swaps: usize,
    /// Sum over vertices of |strength after - strength before|.
    pub strength_l1_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub cut_index: usize,
    pub n_cores: usize,
    pub n_periphery: usize,
    pub r_obs: Option<f64>,
    pub mean_r: Option<f64>,
    pub std_r: Option<f64>,
    pub z: Option<f64>,
    pub n_valid_replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub per_partition: Vec<PartitionStats>,
    /// One row per replica in shared mode; empty in per-partition mode.
    pub diagnostics: Vec<ReplicaDiagnostic>,
}

impl EnsembleResult {
    /// CSV `cut_index,n_cores,n_periphery,r_obs,mean_r,std_r,z`; undefined
    /// values are empty fields.
    pub fn zcurve_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["cut_index", "n_cores", "n_periphery", "r_obs", "mean_r", "std_r", "z"])
            .expect("in-memory write");
        for s in &self.per_partition {
            w.write_record([
                s.cut_index.to_string(),
                s.n_cores.to_string(),
                s.n_periphery.to_string(),
                opt(s.r_obs),
                opt(s.mean_r),
                opt(s.std_r),
                opt(s.z),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }

    /// CSV `replica_index,accepted_swaps,strength_l1_drift`.
    pub fn diagnostics_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["replica_index", "accepted_swaps", "strength_l1_drift"])
            .expect("in-memory write");
        for d in &self.diagnostics {
            w.write_record([
                d.replica_index.to_string(),
                d.accepted_swaps.to_string(),
                format!("{:?}", d.strength_l1_drift),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

/// `(r_obs - mean) / std`, undefined for `std` below [`MIN_STD`].
pub fn z_score(r_obs: f64, mean: f64, std: f64) -> Option<f64> {
    (std >= MIN_STD).then(|| (r_obs - mean) / std)
}

enum EdgeLookup {
    Dense { n: usize, bits: Vec<bool> },
    Sparse(std::collections::HashSet<(usize, usize)>),
}

impl EdgeLookup {
    fn new(n: usize, edges: &[Edge]) -> Self {
        let mut lookup = if n <= DENSE_LOOKUP_MAX {
            EdgeLookup::Dense {
                n,
                bits: vec![false; n * n],
            }
        } else {
            EdgeLookup::Sparse(Default::default())
        };
        for e in edges {
            lookup.set(e.u, e.v, true);
        }
        lookup
    }

    fn contains(&self, u: usize, v: usize) -> bool {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        match self {
            EdgeLookup::Dense { n, bits } => bits[u * n + v],
            EdgeLookup::Sparse(set) => set.contains(&(u, v)),
        }
    }

    fn set(&mut self, u: usize, v: usize, present: bool) {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        match self {
            EdgeLookup::Dense { n, bits } => bits[u * *n + v] = present,
            EdgeLookup::Sparse(set) => {
                if present {
                    set.insert((u, v));
                } else {
                    set.remove(&(u, v));
                }
            }
        }
    }
}

/// Runs `attempts` swap proposals in place; returns the number accepted.
fn swap_edges<R: Rng>(n: usize, edges: &mut [Edge], attempts: usize, rng: &mut R) -> usize {
    let m = edges.len();
    if m < 2 {
        return 0;
    }
    let mut lookup = EdgeLookup::new(n, edges);
    let mut accepted = 0;
    for _ in 0..attempts {
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (a, b, w1) = (edges[i].u, edges[i].v, edges[i].w);
        let (mut c, mut d, w2) = (edges[j].u, edges[j].v, edges[j].w);
        if rng.gen::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || lookup.contains(a, d) || lookup.contains(c, b) {
            continue;
        }
        lookup.set(a, b, false);
        lookup.set(c, d, false);
        lookup.set(a, d, true);
        lookup.set(c, b, true);
        edges[i] = Edge::new(a, d, w1);
        edges[j] = Edge::new(c, b, w2);
        accepted += 1;
    }
    accepted
}

/// Randomized copy of `g` after `n_attempts` swap proposals.
pub fn randomize(g: &WeightedGraph, n_attempts: usize, seed: u64) -> WeightedGraph {
    randomize_counted(g, n_attempts, seed).0
}

/// Like [`randomize`], also returning the number of accepted swaps.
pub fn randomize_counted(g: &WeightedGraph, n_attempts: usize, seed: u64) -> (WeightedGraph, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = g.edges().to_vec();
    let accepted = swap_edges(g.n_vertices(), &mut edges, n_attempts, &mut rng);
    (
        WeightedGraph::from_canonical(g.labels().to_vec(), edges),
        accepted,
    )
}

fn replica_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn partition_seed(master: u64, cut_index: usize) -> u64 {
    // SplitMix64 finalizer over (master, cut).
    let mut z = master ^ (cut_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn strength_drift(n: usize, before: &[Edge], after: &[Edge]) -> f64 {
    let mut delta = vec![0.0; n];
    for e in before {
        delta[e.u] -= e.w;
        delta[e.v] -= e.w;
    }
    for e in after {
        delta[e.u] += e.w;
        delta[e.v] += e.w;
    }
    delta.iter().map(|x| x.abs()).sum()
}

/// Replica `index` of the shared ensemble described by `cfg`.
pub fn replica(g: &WeightedGraph, cfg: &RandomizationConfig, index: usize) -> (WeightedGraph, ReplicaDiagnostic) {
    let (edges, diag) = replica_edges(g, cfg.attempts(g.n_edges()), cfg.master_seed, index);
    (WeightedGraph::from_canonical(g.labels().to_vec(), edges), diag)
}

fn replica_edges(g: &WeightedGraph, attempts: usize, seed: u64, index: usize) -> (Vec<Edge>, ReplicaDiagnostic) {
    let mut rng = replica_rng(seed, index);
    let mut edges = g.edges().to_vec();
    let accepted = swap_edges(g.n_vertices(), &mut edges, attempts, &mut rng);
    let drift = strength_drift(g.n_vertices(), g.edges(), &edges);
    (
        edges,
        ReplicaDiagnostic {
            replica_index: index,
            accepted_swaps: accepted,
            strength_l1_drift: drift,
        },
    )
}

/// Welford accumulator over defined ratios.
#[derive(Debug, Clone, Copy, Default)]
struct Running {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn sample_std(&self) -> Option<f64> {
        (self.count >= 2).then(|| (self.m2 / (self.count - 1) as f64).sqrt())
    }
}

fn finish(p: &Partition, r_obs: Option<f64>, acc: Running) -> PartitionStats {
    let mean_r = (acc.count > 0).then_some(acc.mean);
    let std_r = acc.sample_std();
    let z = match (r_obs, mean_r, std_r) {
        (Some(r), Some(mu), Some(sd)) => z_score(r, mu, sd),
        _ => None,
    };
    PartitionStats {
        cut_index: p.cut_index,
        n_cores: p.n_cores(),
        n_periphery: p.n_periphery(),
        r_obs,
        mean_r,
        std_r,
        z,
        n_valid_replicas: acc.count,
    }
}

/// Null distribution of `r` for every partition and the resulting z-scores.
///
/// Runs on the current rayon pool; the result is bit-identical for any
/// number of worker threads.
pub fn evaluate_ensemble(
    g: &WeightedGraph,
    partitions: &[Partition],
    cfg: &RandomizationConfig,
) -> Result<EnsembleResult, ConfigError> {
    cfg.validate()?;
    let caps: Vec<Capacities> = partitions.iter().map(Capacities::of).collect();
    let r_obs: Vec<Option<f64>> = partitions
        .iter()
        .zip(&caps)
        .map(|(p, &cap)| ratio_from_edges(g.edges(), p, cap))
        .collect();
    let attempts = cfg.attempts(g.n_edges());

    match cfg.mode {
        EnsembleMode::Shared => {
            let mut acc = vec![Running::default(); partitions.len()];
            let mut diagnostics = Vec::with_capacity(cfg.n_replicas);
            for start in (0..cfg.n_replicas).step_by(BLOCK) {
                let end = (start + BLOCK).min(cfg.n_replicas);
                let block: Vec<(Vec<Option<f64>>, ReplicaDiagnostic)> = (start..end)
                    .into_par_iter()
                    .map(|i| {
                        let (edges, diag) = replica_edges(g, attempts, cfg.master_seed, i);
                        let rs = partitions
                            .iter()
                            .zip(&caps)
                            .map(|(p, &cap)| ratio_from_edges(&edges, p, cap))
                            .collect();
                        (rs, diag)
                    })
                    .collect();
                for (rs, diag) in block {
                    for (a, r) in acc.iter_mut().zip(rs) {
                        if let Some(r) = r {
                            a.push(r);
                        }
                    }
                    diagnostics.push(diag);
                }
            }
            let per_partition = partitions
                .iter()
                .zip(r_obs)
                .zip(acc)
                .map(|((p, r), a)| finish(p, r, a))
                .collect();
            Ok(EnsembleResult {
                per_partition,
                diagnostics,
            })
        }
        EnsembleMode::PerPartition => {
            let mut per_partition = Vec::with_capacity(partitions.len());
            for ((p, &cap), r) in partitions.iter().zip(&caps).zip(r_obs) {
                let seed = partition_seed(cfg.master_seed, p.cut_index);
                let mut acc = Running::default();
                for start in (0..cfg.n_replicas).step_by(BLOCK) {
                    let end = (start + BLOCK).min(cfg.n_replicas);
                    let block: Vec<Option<f64>> = (start..end)
                        .into_par_iter()
                        .map(|i| {
                            let (edges, _) = replica_edges(g, attempts, seed, i);
                            ratio_from_edges(&edges, p, cap)
                        })
                        .collect();
                    for r in block.into_iter().flatten() {
                        acc.push(r);
                    }
                }
                per_partition.push(finish(p, r, acc));
            }
            Ok(EnsembleResult {
                per_partition,
                diagnostics: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_edge_list, EdgeFormat};

    fn graph(text: &str) -> WeightedGraph {
        parse_edge_list(text, EdgeFormat::Whitespace).unwrap()
    }

    #[test]
    fn triangle_is_rigid() {
        let g = graph("a b 1\nb c 2\na c 3");
        for seed in 0..20 {
            let (r, accepted) = randomize_counted(&g, 200, seed);
            assert_eq!(accepted, 0);
            assert_eq!(r, g);
        }
    }

    #[test]
    fn path_keeps_degree_sequence() {
        let g = graph("a b\nb c\nc d");
        let mut saw_change = false;
        for seed in 0..50 {
            let r = randomize(&g, 10, seed);
            assert_eq!(r.stats().degree_sequence, vec![1, 2, 2, 1]);
            saw_change |= r.edges() != g.edges();
        }
        assert!(saw_change, "the a-c / b-d rewiring must be reachable");
    }

    #[test]
    fn single_edge_is_untouched() {
        let g = graph("a b 2");
        assert_eq!(randomize_counted(&g, 100, 1), (g.clone(), 0));
    }

    #[test]
    fn z_score_substitution() {
        assert_eq!(z_score(5.0, 3.0, 1.0), Some(2.0));
        assert_eq!(z_score(5.0, 3.0, 1e-13), None);
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs = [3.5, 1.25, 9.0, 4.75, 2.0, 7.5];
        let mut acc = Running::default();
        xs.iter().for_each(|&x| acc.push(x));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((acc.mean - mean).abs() < 1e-12);
        assert!((acc.sample_std().unwrap() - var.sqrt()).abs() < 1e-12);
        let mut one = Running::default();
        one.push(1.0);
        assert_eq!(one.sample_std(), None);
    }

    #[test]
    fn rigid_graph_gives_undefined_z() {
        // K4: no legal swap, so every replica equals the original.
        let g = graph("a b\na c\na d\nb c\nb d\nc d 2");
        let p = Partition::from_groups(4, &[vec![0, 1, 2]], 1);
        let cfg = RandomizationConfig {
            n_replicas: 20,
            ..Default::default()
        };
        let res = evaluate_ensemble(&g, &[p], &cfg).unwrap();
        let s = &res.per_partition[0];
        assert!(s.r_obs.is_some());
        assert_eq!(s.n_valid_replicas, 20);
        assert_eq!(s.mean_r, s.r_obs);
        assert_eq!(s.z, None);
        assert!(res.diagnostics.iter().all(|d| d.accepted_swaps == 0));
    }

    #[test]
    fn config_validation() {
        let bad = RandomizationConfig {
            n_replicas: 1,
            ..Default::default()
        };
        assert_eq!(bad.validate(), Err(ConfigError::TooFewReplicas(1)));
        let bad = RandomizationConfig {
            swap_factor: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(RandomizationConfig::default().attempts(78), 780);
        let cfg = RandomizationConfig {
            swap_factor: 0.25,
            ..Default::default()
        };
        assert_eq!(cfg.attempts(5), 2);
    }

    #[test]
    fn partition_seeds_differ() {
        assert_ne!(partition_seed(0, 0), partition_seed(0, 1));
        assert_ne!(partition_seed(0, 3), partition_seed(1, 3));
    }
}
