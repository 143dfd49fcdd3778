//! Distance transforms, average-linkage clustering and dendrogram cuts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::WeightedGraph;

/// Relative tolerance under which two candidate merge heights count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("need at least {needed} vertices, got {got}")]
    TooFewVertices { needed: usize, got: usize },
    #[error("edge weights are degenerate (no positive maximum weight)")]
    DegenerateWeights,
}

/// How edge weights (similarities) become clustering distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceTransform {
    /// `1 - w / w_max`; absent pairs at exactly 1.
    #[default]
    SimComplement,
    /// `1 / w`; absent pairs at ten times the largest edge distance.
    InverseWeight,
    /// `(w_max - w) / w_max`; absent pairs at `1 + 1 / w_max`.
    MaxMinus,
}

impl DistanceTransform {
    pub const ALL: [DistanceTransform; 3] = [
        DistanceTransform::SimComplement,
        DistanceTransform::InverseWeight,
        DistanceTransform::MaxMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceTransform::SimComplement => "sim_complement",
            DistanceTransform::InverseWeight => "inverse_weight",
            DistanceTransform::MaxMinus => "max_minus",
        }
    }
}

impl fmt::Display for DistanceTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceTransform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DistanceTransform::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown distance transform {s:?}"))
    }
}

/// Which of several equally-distant cluster pairs merges first.
///
/// Each candidate pair is keyed by the smaller and larger of the two
/// clusters' minimum vertex ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lexicographically largest key wins.
    #[default]
    HighestIds,
    /// Lexicographically smallest key wins.
    LowestIds,
}

impl TieBreak {
    pub fn name(self) -> &'static str {
        match self {
            TieBreak::HighestIds => "highest_ids",
            TieBreak::LowestIds => "lowest_ids",
        }
    }

    /// True when `candidate` should replace `incumbent`.
    pub fn prefers(self, candidate: (usize, usize), incumbent: (usize, usize)) -> bool {
        match self {
            TieBreak::HighestIds => candidate > incumbent,
            TieBreak::LowestIds => candidate < incumbent,
        }
    }
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Two heights are tied when they agree to within [`TIE_TOLERANCE`].
pub fn heights_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Symmetric, zero-diagonal matrix of vertex-pair distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
    transform: Option<DistanceTransform>,
}

impl DistanceMatrix {
    /// Wraps an explicit row-major matrix. Panics if it is not square,
    /// symmetric, finite, non-negative and zero on the diagonal.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "distance matrix must be square");
            d.extend_from_slice(row);
        }
        for i in 0..n {
            assert_eq!(d[i * n + i], 0.0, "diagonal must be zero");
            for j in 0..n {
                let x = d[i * n + j];
                assert!(x.is_finite() && x >= 0.0, "distances must be finite and >= 0");
                assert_eq!(x, d[j * n + i], "distance matrix must be symmetric");
            }
        }
        DistanceMatrix {
            n,
            d,
            transform: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn transform(&self) -> Option<DistanceTransform> {
        self.transform
    }
}

pub fn build_distance_matrix(
    g: &WeightedGraph,
    transform: DistanceTransform,
) -> Result<DistanceMatrix, ClusterError> {
    let n = g.n_vertices();
    if n < 2 {
        return Err(ClusterError::TooFewVertices { needed: 2, got: n });
    }
    let w_max = g.max_weight().unwrap_or(0.0);
    let w_min = g.min_weight().unwrap_or(0.0);
    if !(w_max > 0.0 && w_min > 0.0) {
        return Err(ClusterError::DegenerateWeights);
    }

    let (edge_distance, absent): (Box<dyn Fn(f64) -> f64>, f64) = match transform {
        DistanceTransform::SimComplement => (Box::new(move |w| 1.0 - w / w_max), 1.0),
        DistanceTransform::InverseWeight => (Box::new(|w| 1.0 / w), 10.0 * (1.0 / w_min)),
        DistanceTransform::MaxMinus => {
            (Box::new(move |w| (w_max - w) / w_max), 1.0 + 1.0 / w_max)
        }
    };

    let mut d = vec![absent; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for e in g.edges() {
        let x = edge_distance(e.w).max(0.0);
        d[e.u * n + e.v] = x;
        d[e.v * n + e.u] = x;
    }
    Ok(DistanceMatrix {
        n,
        d,
        transform: Some(transform),
    })
}

/// One agglomeration step. Node refs `0..n` are leaves; ref `n + i` is the
/// cluster created by merge `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    /// Sorted vertex ids of the merged cluster.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Checks the structural invariants; used by tests and debug builds.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.n_leaves;
        if self.merges.len() + 1 != n.max(1) {
            return Err(format!("{} merges for {} leaves", self.merges.len(), n));
        }
        let mut used = vec![false; 2 * n];
        let mut prev = f64::NEG_INFINITY;
        for (i, m) in self.merges.iter().enumerate() {
            for r in [m.left, m.right] {
                if r >= n + i || used[r] {
                    return Err(format!("merge {i} reuses or forward-references node {r}"));
                }
                used[r] = true;
            }
            if m.height < prev {
                return Err(format!("merge {i} height decreases"));
            }
            prev = m.height;
        }
        if let Some(last) = self.merges.last() {
            if last.members != (0..n).collect::<Vec<_>>() {
                return Err("final merge does not contain every vertex".into());
            }
        }
        Ok(())
    }

    /// CSV with columns `merge_index,left_ref,right_ref,height,member_count`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["merge_index", "left_ref", "right_ref", "height", "member_count"])
            .expect("in-memory write");
        for (i, m) in self.merges.iter().enumerate() {
            w.write_record([
                i.to_string(),
                m.left.to_string(),
                m.right.to_string(),
                format!("{:?}", m.height),
                m.members.len().to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }
}

/// Average-linkage agglomerative clustering.
///
/// At each step the pair of active clusters with the smallest mean pairwise
/// leaf distance merges; pairs within [`TIE_TOLERANCE`] of that minimum are
/// resolved by `tie_break`. Runs in O(n^3).
pub fn average_linkage(dm: &DistanceMatrix, tie_break: TieBreak) -> Dendrogram {
    let n = dm.n();
    // Slot i holds an active cluster; sums[i*n+j] is the total leaf distance
    // between the clusters in slots i and j.
    let mut sums = dm.d.clone();
    let mut size = vec![1usize; n];
    let min_id: Vec<usize> = (0..n).collect();
    let mut node_ref: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut prev_height = f64::NEG_INFINITY;

    for step in 0..n.saturating_sub(1) {
        let avg = |a: usize, b: usize, sums: &[f64]| sums[a * n + b] / (size[a] * size[b]) as f64;

        let mut min = f64::INFINITY;
        for (x, &a) in active.iter().enumerate() {
            for &b in &active[x + 1..] {
                min = min.min(avg(a, b, &sums));
            }
        }

        let mut best: Option<(usize, usize, (usize, usize), f64)> = None;
        for (x, &a) in active.iter().enumerate() {
            for &b in &active[x + 1..] {
                let h = avg(a, b, &sums);
                if !heights_tied(h, min) {
                    continue;
                }
                let key = (min_id[a].min(min_id[b]), min_id[a].max(min_id[b]));
                match best {
                    Some((_, _, k, _)) if !tie_break.prefers(key, k) => {}
                    _ => best = Some((a, b, key, h)),
                }
            }
        }
        let (a, b, _, h) = best.expect("at least two active clusters");

        // Keep the cluster whose min id is smaller in slot `a`.
        let (a, b) = if min_id[a] <= min_id[b] { (a, b) } else { (b, a) };
        let (left, right) = (node_ref[a], node_ref[b]);
        let height = h.max(prev_height);
        prev_height = height;

        for &c in &active {
            if c != a && c != b {
                let s = sums[a * n + c] + sums[b * n + c];
                sums[a * n + c] = s;
                sums[c * n + a] = s;
            }
        }
        size[a] += size[b];
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);
        members[a].sort_unstable();
        node_ref[a] = n + step;
        active.retain(|&c| c != b);

        let (left, right) = if left <= right { (left, right) } else { (right, left) };
        merges.push(Merge {
            left,
            right,
            height,
            members: members[a].clone(),
        });
    }

    Dendrogram {
        n_leaves: n,
        merges,
    }
}

/// Cores (clusters of two or more vertices) plus a periphery of singletons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Number of merges applied to reach this partition.
    pub cut_index: usize,
    /// Core id per vertex, `None` for periphery.
    pub assignment: Vec<Option<usize>>,
    /// Size of each core, indexed by core id.
    pub core_sizes: Vec<usize>,
}

impl Partition {
    /// Builds a partition from arbitrary groups. Groups of one vertex (and
    /// vertices in no group) become periphery; core ids are assigned by
    /// descending size, ties by smallest member id.
    pub fn from_groups(n: usize, groups: &[Vec<usize>], cut_index: usize) -> Self {
        let mut cores: Vec<Vec<usize>> = groups
            .iter()
            .filter(|g| g.len() >= 2)
            .map(|g| {
                let mut g = g.clone();
                g.sort_unstable();
                g
            })
            .collect();
        cores.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
        let mut assignment = vec![None; n];
        for (id, core) in cores.iter().enumerate() {
            for &v in core {
                assert!(assignment[v].is_none(), "vertex {v} in two groups");
                assignment[v] = Some(id);
            }
        }
        Partition {
            cut_index,
            assignment,
            core_sizes: cores.iter().map(Vec::len).collect(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.assignment.len()
    }

    /// Number of cores, `k`.
    pub fn n_cores(&self) -> usize {
        self.core_sizes.len()
    }

    /// Number of periphery vertices, `m`.
    pub fn n_periphery(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_none()).count()
    }

    pub fn core_of(&self, v: usize) -> Option<usize> {
        self.assignment[v]
    }

    pub fn periphery(&self) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&v| self.assignment[v].is_none())
            .collect()
    }

    /// Member lists indexed by core id, each sorted.
    pub fn cores(&self) -> Vec<Vec<usize>> {
        let mut cores = vec![Vec::new(); self.n_cores()];
        for (v, a) in self.assignment.iter().enumerate() {
            if let Some(c) = a {
                cores[*c].push(v);
            }
        }
        cores
    }
}

/// One partition per cut `0..n`: cut `t` applies the first `t` merges.
pub fn enumerate_partitions(dend: &Dendrogram) -> Vec<Partition> {
    let n = dend.n_leaves;
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    // node ref -> slot in `groups`
    let mut slot: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    out.push(Partition::from_groups(n, &groups, 0));
    for (i, m) in dend.merges.iter().enumerate() {
        let (a, b) = (slot[m.left], slot[m.right]);
        let moved = std::mem::take(&mut groups[b]);
        groups[a].extend(moved);
        slot.push(a);
        out.push(Partition::from_groups(n, &groups, i + 1));
    }
    out
}
