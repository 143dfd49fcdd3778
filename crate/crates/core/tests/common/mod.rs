//! Independent reference implementations used as test oracles. Nothing here
//! calls into the code paths it checks.

#![allow(dead_code)]

use mcp_core::{Partition, WeightedGraph};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Expected partition of the karate club: nine cores and ten periphery members.
pub const KARATE_CORES: [&[&str]; 9] = [
    &["1", "2", "3", "8", "14"],
    &["16", "24", "33", "34"],
    &["6", "7", "17"],
    &["26", "32"],
    &["27", "30"],
    &["5", "11"],
    &["4", "13"],
    &["25", "28"],
    &["9", "31"],
];
pub const KARATE_PERIPHERY: [&str; 10] = ["10", "12", "15", "18", "19", "20", "21", "22", "23", "29"];

/// Core member label sets (sorted) and periphery labels (sorted) of a partition.
pub fn labelled(g: &WeightedGraph, p: &Partition) -> (Vec<Vec<String>>, Vec<String>) {
    let mut cores: Vec<Vec<String>> = p
        .cores()
        .iter()
        .map(|c| {
            let mut v: Vec<String> = c.iter().map(|&i| g.label(i).to_string()).collect();
            v.sort();
            v
        })
        .collect();
    cores.sort();
    let mut periphery: Vec<String> = p.periphery().iter().map(|&i| g.label(i).to_string()).collect();
    periphery.sort();
    (cores, periphery)
}

pub fn karate_expected() -> (Vec<Vec<String>>, Vec<String>) {
    let mut cores: Vec<Vec<String>> = KARATE_CORES
        .iter()
        .map(|c| {
            let mut v: Vec<String> = c.iter().map(|s| s.to_string()).collect();
            v.sort();
            v
        })
        .collect();
    cores.sort();
    let mut periphery: Vec<String> = KARATE_PERIPHERY.iter().map(|s| s.to_string()).collect();
    periphery.sort();
    (cores, periphery)
}

/// Naive edge classification: returns (C, P, W_inter, density_cores,
/// density_periphery, r) straight from the defining formulas.
pub struct NaiveMetrics {
    pub c: f64,
    pub p: f64,
    pub inter: f64,
    pub density_cores: Option<f64>,
    pub density_periphery: Option<f64>,
    pub r: Option<f64>,
}

pub fn naive_metrics(g: &WeightedGraph, groups: &[Vec<usize>]) -> NaiveMetrics {
    let n = g.n_vertices();
    // group index per vertex, singletons and ungrouped are periphery
    let mut core_of = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for grp in groups.iter().filter(|g| g.len() >= 2) {
        for &v in grp {
            core_of[v] = sizes.len();
        }
        sizes.push(grp.len());
    }
    let in_core = |v: usize| core_of[v] != usize::MAX;
    let (mut c, mut p, mut inter) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let Some(w) = g.weight(i, j) else { continue };
            if !in_core(i) || !in_core(j) {
                p += w;
            } else if core_of[i] == core_of[j] {
                c += w;
            } else {
                inter += w;
            }
        }
    }
    let m = (0..n).filter(|&v| !in_core(v)).count() as f64;
    let core_cap: f64 = sizes.iter().map(|&s| (s * (s - 1)) as f64 / 2.0).sum();
    let total_in_cores: f64 = sizes.iter().map(|&s| s as f64).sum();
    let per_cap = m * (m - 1.0) / 2.0 + m * total_in_cores;
    let density_cores = (core_cap > 0.0).then(|| c / core_cap);
    let density_periphery = (per_cap > 0.0).then(|| p / per_cap);
    let r = match (density_cores, density_periphery) {
        (Some(dc), Some(dp)) if dp > 0.0 => Some(dc / dp),
        _ => None,
    };
    NaiveMetrics {
        c,
        p,
        inter,
        density_cores,
        density_periphery,
        r,
    }
}

/// All set partitions of `0..n` (restricted growth strings).
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

/// O(n^3)-per-step average linkage computed from scratch every step: each
/// candidate's mean distance is re-summed over leaf pairs. Ties (relative
/// 1e-12) go to the lexicographically largest (min id, min id) key when
/// `highest` is set, else the smallest. Returns (members, height) per merge.
pub fn brute_force_linkage(d: &[Vec<f64>], highest: bool) -> Vec<(Vec<usize>, f64)> {
    let n = d.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    while clusters.len() > 1 {
        let mut cands = Vec::new();
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let mut s = 0.0;
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        s += d[i][j];
                    }
                }
                let avg = s / (clusters[a].len() * clusters[b].len()) as f64;
                let (ma, mb) = (clusters[a][0], clusters[b][0]);
                cands.push((avg, (ma.min(mb), ma.max(mb)), a, b));
            }
        }
        let min = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let tied = cands
            .iter()
            .filter(|c| (c.0 - min).abs() <= 1e-12 * c.0.abs().max(min.abs()).max(1.0));
        let pick = if highest {
            tied.max_by_key(|c| c.1)
        } else {
            tied.min_by_key(|c| c.1)
        }
        .unwrap();
        let (h, _, a, b) = *pick;
        let mut merged = clusters[a].clone();
        merged.extend(&clusters[b]);
        merged.sort_unstable();
        clusters.remove(b);
        clusters.remove(a);
        clusters.push(merged.clone());
        clusters.sort_by_key(|c| c[0]);
        out.push((merged, h));
    }
    out
}

pub fn random_distance_matrix(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    symmetric(n, || rng.gen_range(0.0..10.0))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean and sample standard deviation by the two-pass formula.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Symmetric matrix with zero diagonal; `f` draws each upper-triangle entry.
#[allow(clippy::needless_range_loop)]
pub fn symmetric(n: usize, mut f: impl FnMut() -> f64) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = f();
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    d
}
