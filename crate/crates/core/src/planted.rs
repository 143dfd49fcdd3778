//! Synthetic graphs with a known multicore-periphery structure.
//!
//! `n_cores` cliques of `core_size` vertices carry heavy intra-core edges.
//! The `periphery_size` extra vertices form a light cycle, and each also
//! attaches to a few random core vertices with light edges. Every light
//! weight is at most `1 / separation` of every heavy weight.
//!
//! The cycle matters: without it, two periphery vertices that happen to
//! share a light edge form a small dense pair, and pendant periphery vertices
//! with above-average weight are better scored inside a core. Either way the
//! planted labeling stops being the clear optimum.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, WeightedGraph};
use crate::hclust::Partition;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub n_cores: usize,
    pub core_size: usize,
    pub periphery_size: usize,
    /// Minimum heavy weight over maximum light weight.
    pub separation: f64,
    /// Light edges from each periphery vertex into the cores, drawn
    /// uniformly in this range.
    pub core_attachments: (usize, usize),
    /// Relative weight spread: heavy weights lie in `[1, 1 + jitter]`,
    /// light weights in `[1 - jitter, 1] / separation`.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            n_cores: 3,
            core_size: 5,
            periphery_size: 10,
            separation: 5.0,
            core_attachments: (1, 1),
            jitter: 0.2,
            seed: 0,
        }
    }
}

/// Planted graph and its ground-truth partition. Core vertices come first,
/// core by core; periphery vertices follow.
pub fn planted_graph(cfg: &PlantedConfig) -> (WeightedGraph, Partition) {
    assert!(cfg.core_size >= 2, "cores need at least two vertices");
    assert!(cfg.separation >= 1.0, "separation must be >= 1");
    assert!((0.0..1.0).contains(&cfg.jitter), "jitter must be in [0, 1)");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_core_vertices = cfg.n_cores * cfg.core_size;
    let n = n_core_vertices + cfg.periphery_size;

    let labels = (0..n)
        .map(|v| {
            if v < n_core_vertices {
                format!("c{}_{}", v / cfg.core_size, v % cfg.core_size)
            } else {
                format!("p{}", v - n_core_vertices)
            }
        })
        .collect();

    let heavy = |rng: &mut ChaCha8Rng| rng.gen_range(1.0..=1.0 + cfg.jitter);
    let light = |rng: &mut ChaCha8Rng| rng.gen_range(1.0 - cfg.jitter..=1.0) / cfg.separation;

    let mut edges = Vec::new();
    let mut groups = Vec::with_capacity(cfg.n_cores);
    for c in 0..cfg.n_cores {
        let members: Vec<usize> = (c * cfg.core_size..(c + 1) * cfg.core_size).collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                edges.push(Edge::new(a, b, heavy(&mut rng)));
            }
        }
        groups.push(members);
    }

    let periphery: Vec<usize> = (n_core_vertices..n).collect();
    match periphery.len() {
        0 | 1 => {}
        2 => edges.push(Edge::new(periphery[0], periphery[1], light(&mut rng))),
        m => {
            for i in 0..m {
                edges.push(Edge::new(periphery[i], periphery[(i + 1) % m], light(&mut rng)));
            }
        }
    }

    let (lo, hi) = cfg.core_attachments;
    let mut core_vertices: Vec<usize> = (0..n_core_vertices).collect();
    for &p in &periphery {
        let k = rng.gen_range(lo..=hi.max(lo)).min(n_core_vertices);
        core_vertices.shuffle(&mut rng);
        for &t in &core_vertices[..k] {
            edges.push(Edge::new(p, t, light(&mut rng)));
        }
    }

    let g = WeightedGraph::new(labels, edges).expect("planted graph is valid");
    let truth = Partition::from_groups(n, &groups, 0);
    (g, truth)
}

/// True when `found` has exactly the planted cores and periphery.
pub fn recovers(truth: &Partition, found: &Partition) -> bool {
    let mut a = truth.cores();
    let mut b = found.cores();
    a.sort();
    b.sort();
    a == b && truth.periphery() == found.periphery()
}
