use proptest::prelude::*;

use robust_sampling::hypergraph::{
    cut_value, for_each_partition, format_edge_stream, min_normalized_cut, parse_edge_stream, size_audit,
    stream_sparsify, strength, verify_sparsifier, CutFamily, Hyperedge, Hypergraph, Partition, DEFAULT_C_SIZE,
};
use robust_sampling::seed::stream_rng;

fn edge_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=n.min(4))
}

fn hypergraph_strategy() -> impl Strategy<Value = (usize, Vec<(Vec<usize>, u8)>)> {
    (3usize..=6).prop_flat_map(|n| (Just(n), proptest::collection::vec((edge_strategy(n), 1u8..=4), 1..12)))
}

fn build(n: usize, edges: &[(Vec<usize>, u8)]) -> Hypergraph {
    let mut h = Hypergraph::new(n).unwrap();
    for (vs, w) in edges {
        h.add_edge(vs, f64::from(*w)).unwrap();
    }
    h
}

#[test]
fn k3_repeated_keeps_every_edge_at_default_constant() {
    let text = "0 1\n1 2\n0 2\n".repeat(3);
    let edges = parse_edge_stream(&text, 3).unwrap();
    let (decisions, s) = stream_sparsify(&edges, 3, 0.3, 8.0, &mut stream_rng(5)).unwrap();
    assert!(decisions.iter().all(|d| d.coin && d.p == 1.0));
    assert_eq!(s.kept().len(), 9);
    let mut h = Hypergraph::new(3).unwrap();
    for e in &edges {
        h.add_hyperedge(*e, 1.0).unwrap();
    }
    let report = verify_sparsifier(&h, &s.to_hypergraph(), 0.3, &CutFamily::AllCuts).unwrap();
    assert!(report.passed);
    assert_eq!((report.worst_ratio_low, report.worst_ratio_high), (1.0, 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn a_hypergraph_sparsifies_itself((n, edges) in hypergraph_strategy()) {
        let h = build(n, &edges);
        let r = verify_sparsifier(&h, &h, 0.01, &CutFamily::AllCuts).unwrap();
        prop_assert!(r.passed);
        prop_assert_eq!(r.num_violations, 0);
    }

    #[test]
    fn strength_scales_with_weights((n, edges) in hypergraph_strategy()) {
        let h = build(n, &edges);
        let doubled = h.scaled(2.0);
        for (vs, _) in &edges {
            prop_assert_eq!(strength(vs, &doubled).unwrap(), 2.0 * strength(vs, &h).unwrap());
        }
        prop_assert_eq!(min_normalized_cut(&doubled).unwrap().0, 2.0 * min_normalized_cut(&h).unwrap().0);
    }

    #[test]
    fn strength_is_at_least_the_global_minimum((n, edges) in hypergraph_strategy()) {
        let h = build(n, &edges);
        let (global, _) = min_normalized_cut(&h).unwrap();
        for (vs, _) in &edges {
            prop_assert!(strength(vs, &h).unwrap() >= global);
        }
    }

    #[test]
    fn the_minimizer_attains_the_minimum((n, edges) in hypergraph_strategy()) {
        let h = build(n, &edges);
        let (value, part) = min_normalized_cut(&h).unwrap();
        prop_assert_eq!(cut_value(&h, &part).unwrap() / (part.num_blocks() - 1) as f64, value);
        let mut smallest = f64::INFINITY;
        for_each_partition(n, |rgs, k| {
            if k >= 2 {
                let p = Partition::new(rgs.iter().map(|&b| usize::from(b)).collect()).unwrap();
                smallest = smallest.min(cut_value(&h, &p).unwrap() / (k - 1) as f64);
            }
        });
        prop_assert_eq!(smallest, value);
    }

    #[test]
    fn edge_streams_round_trip((n, edges) in hypergraph_strategy()) {
        let hs: Vec<Hyperedge> = edges.iter().map(|(vs, _)| Hyperedge::new(vs, n).unwrap()).collect();
        prop_assert_eq!(parse_edge_stream(&format_edge_stream(&hs), n).unwrap(), hs);
    }

    #[test]
    fn sparsifier_weights_are_inverse_probabilities(seed in any::<u64>(), k1 in 0.01f64..0.2) {
        let edges = robust_sampling::hypergraph::RandomEdges::generate(6, 60, seed);
        let (decisions, s) = stream_sparsify(&edges, 6, 0.3, k1, &mut stream_rng(seed)).unwrap();
        let kept: Vec<_> = decisions.iter().filter(|d| d.coin).collect();
        prop_assert_eq!(kept.len(), s.kept().len());
        for (d, k) in kept.iter().zip(s.kept()) {
            prop_assert_eq!(k.weight, 1.0 / d.p);
            prop_assert_eq!(k.index, d.index);
        }
        prop_assert!(size_audit(&s, DEFAULT_C_SIZE).weight_ok);
    }
}
