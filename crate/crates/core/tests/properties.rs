use mcp_core::{
    average_linkage, build_distance_matrix, compute_metrics, enumerate_partitions, graph_stats, parse_edge_list,
    write_edge_list, DistanceTransform, Edge, EdgeFormat, Partition, TieBreak, WeightedGraph,
};
use proptest::prelude::*;

/// Random simple graph: n vertices, each pair present with a coin flip,
/// weights drawn from a small integer range so sums are exact.
fn arb_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), prop::collection::vec(prop::option::weighted(0.5, 1u32..20), pairs))
        })
        .prop_filter_map("needs an edge", |(n, ws)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if let Some(w) = ws[k] {
                        edges.push(Edge::new(i, j, w as f64));
                    }
                    k += 1;
                }
            }
            if edges.is_empty() {
                return None;
            }
            let labels = (0..n).map(|i| format!("n{i}")).collect();
            Some(WeightedGraph::new(labels, edges).unwrap())
        })
}

fn arb_graph_and_partition(max_n: usize) -> impl Strategy<Value = (WeightedGraph, Partition)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.n_vertices();
        (Just(g), prop::collection::vec(0..n, n)).prop_map(|(g, bucket)| {
            let n = g.n_vertices();
            let mut groups = vec![Vec::new(); n];
            for (v, b) in bucket.into_iter().enumerate() {
                groups[b].push(v);
            }
            let p = Partition::from_groups(n, &groups, 0);
            (g, p)
        })
    })
}

proptest! {
    #[test]
    fn stats_identities(g in arb_graph(12)) {
        let s = graph_stats(&g);
        prop_assert_eq!(s.degree_sequence.iter().sum::<usize>(), 2 * s.n_edges);
        let strength: f64 = s.strength_sequence.iter().sum();
        prop_assert!((strength - 2.0 * s.total_weight).abs() < 1e-9);
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph(12), csv in any::<bool>()) {
        let fmt = if csv { EdgeFormat::Csv } else { EdgeFormat::Whitespace };
        let text = write_edge_list(&g, fmt);
        prop_assert_eq!(parse_edge_list(&text, fmt).unwrap(), g);
    }

    #[test]
    fn weight_conservation((g, p) in arb_graph_and_partition(10)) {
        let m = compute_metrics(&g, &p);
        let total = graph_stats(&g).total_weight;
        prop_assert!(m.core_weight >= 0.0 && m.periphery_weight >= 0.0);
        prop_assert!((m.core_weight + m.periphery_weight + m.intercore_weight - total).abs() < 1e-9);
        if let (Some(dc), Some(dp), Some(r)) = (m.density_cores, m.density_periphery, m.r) {
            prop_assert!((r - dc / dp).abs() <= 1e-12 * r.abs().max(1.0));
        }
    }

    #[test]
    fn ratio_is_scale_invariant((g, p) in arb_graph_and_partition(10)) {
        let base = compute_metrics(&g, &p);
        for alpha in [0.5, 3.0, 1000.0] {
            let m = compute_metrics(&g.scaled(alpha).unwrap(), &p);
            prop_assert_eq!(m.r, base.r);
            prop_assert_eq!(m.core_weight, base.core_weight * alpha);
            prop_assert_eq!(m.periphery_weight, base.periphery_weight * alpha);
            if let (Some(a), Some(b)) = (m.density_cores, base.density_cores) {
                prop_assert!((a - b * alpha).abs() <= 1e-12 * a.abs().max(1.0));
            }
            if let (Some(a), Some(b)) = (m.density_periphery, base.density_periphery) {
                prop_assert!((a - b * alpha).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dendrogram_invariants(g in arb_graph(14), t in 0usize..3, hi in any::<bool>()) {
        let transform = DistanceTransform::ALL[t];
        let tb = if hi { TieBreak::HighestIds } else { TieBreak::LowestIds };
        let dm = build_distance_matrix(&g, transform).unwrap();
        for i in 0..dm.n() {
            prop_assert_eq!(dm.get(i, i), 0.0);
            for j in 0..dm.n() {
                prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                prop_assert!(dm.get(i, j).is_finite() && dm.get(i, j) >= 0.0);
                if i != j && transform == DistanceTransform::SimComplement {
                    match g.weight(i, j) {
                        Some(_) => prop_assert!(dm.get(i, j) < 1.0),
                        None => prop_assert_eq!(dm.get(i, j), 1.0),
                    }
                }
            }
        }
        let d1 = average_linkage(&dm, tb);
        prop_assert!(d1.validate().is_ok());
        // Same input, same dendrogram, bit for bit.
        let d2 = average_linkage(&build_distance_matrix(&g, transform).unwrap(), tb);
        prop_assert_eq!(serde_json::to_string(&d1).unwrap(), serde_json::to_string(&d2).unwrap());
        let parts = enumerate_partitions(&d1);
        prop_assert_eq!(parts[0].n_cores(), 0);
        prop_assert_eq!(parts.last().unwrap().n_periphery(), 0);
        for p in &parts {
            let mut seen = vec![0; g.n_vertices()];
            for c in p.cores() { for v in c { seen[v] += 1; } }
            for v in p.periphery() { seen[v] += 1; }
            prop_assert!(seen.iter().all(|&x| x == 1));
        }
    }
}
