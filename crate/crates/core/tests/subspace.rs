use proptest::prelude::*;

use robust_sampling::seed::stream_rng;
use robust_sampling::subspace::{
    format_row_stream, online_sensitivity, parse_row_stream, sensitivity_sum_audit, stream_embed, verify_embedding,
    verify_ridge_embedding, EmbedConfig, KeptRow, RandomRows, RowDistribution, SpanMode, VerifyMode, WeightedRowSet,
    DEFAULT_C_AUDIT,
};

fn kept_set(rows: &[(Vec<i64>, f64)], lambda: f64) -> WeightedRowSet {
    let d = rows[0].0.len();
    let mut set = WeightedRowSet::new(d, 2.0, 1.0, lambda);
    for (i, (row, p_i)) in rows.iter().enumerate() {
        set.rows.push(KeptRow { row: row.clone(), p_i: *p_i, scale: p_i.powf(-0.5), s_prime: 1.0, index: i });
    }
    set
}

fn rows_strategy(d: usize) -> impl Strategy<Value = Vec<(Vec<i64>, f64)>> {
    proptest::collection::vec((proptest::collection::vec(-6i64..=6, d), 0.05f64..=1.0), 1..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sensitivities_lie_in_the_unit_interval(rows in rows_strategy(3), a in proptest::collection::vec(-6i64..=6, 3)) {
        let set = kept_set(&rows, 1e-3);
        let s = online_sensitivity(&a, &set, SpanMode::Exact).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s == 0.0, a.iter().all(|&v| v == 0));
    }

    #[test]
    fn sensitivity_is_quadratic_in_the_row(rows in rows_strategy(3), k in 2i64..=4) {
        let set = kept_set(&rows, 1e-2);
        let a = rows[0].0.clone();
        prop_assume!(a.iter().any(|&v| v != 0));
        let s = online_sensitivity(&a, &set, SpanMode::Exact).unwrap();
        let scaled: Vec<i64> = a.iter().map(|v| v * k).collect();
        let sk = online_sensitivity(&scaled, &set, SpanMode::Exact).unwrap();
        let expect = ((k * k) as f64 * s).min(1.0);
        prop_assert!((sk - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn adding_a_kept_row_never_raises_sensitivity(
        rows in rows_strategy(3),
        extra in (proptest::collection::vec(-6i64..=6, 3), 0.05f64..=1.0),
        a in proptest::collection::vec(-6i64..=6, 3),
    ) {
        let before = online_sensitivity(&a, &kept_set(&rows, 1e-3), SpanMode::Exact).unwrap();
        let mut more = rows.clone();
        more.push(extra);
        let after = online_sensitivity(&a, &kept_set(&more, 1e-3), SpanMode::Exact).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-9), "{} -> {}", before, after);
    }

    #[test]
    fn span_modes_agree_on_small_integers(rows in rows_strategy(4), a in proptest::collection::vec(-6i64..=6, 4)) {
        let set = kept_set(&rows, 1e-2);
        let exact = online_sensitivity(&a, &set, SpanMode::Exact).unwrap();
        let tol = online_sensitivity(&a, &set, SpanMode::Tolerance(1e-9)).unwrap();
        prop_assert!((exact - tol).abs() <= 1e-9, "{} vs {}", exact, tol);
    }

    #[test]
    fn ridge_guarantee_implies_plain_guarantee(seed in any::<u64>(), k1 in 0.005f64..0.05) {
        let eps = 0.25;
        let config = EmbedConfig::new(3, 2.0, eps, 1e3, 80, 10).unwrap().with_k1(k1).unwrap();
        let rows = RandomRows::generate(80, 3, 10, RowDistribution::Gaussian, seed);
        let tr = stream_embed(&rows, &config, &mut stream_rng(seed)).unwrap();
        let ridge = verify_ridge_embedding(&tr.rows, &tr.kept, eps).unwrap();
        let plain = verify_embedding(&tr.rows, &tr.kept, 2.0 * eps, VerifyMode::Pencil).unwrap();
        prop_assert!(!ridge.passed || plain.passed);
        // kept rows carry the probabilities their coins were flipped with
        for k in &tr.kept.rows {
            prop_assert_eq!(tr.decisions[k.index].p, k.p_i);
            prop_assert!(tr.decisions[k.index].coin);
        }
        prop_assert!(sensitivity_sum_audit(&tr, DEFAULT_C_AUDIT).kept_ok);
    }

    #[test]
    fn embedding_is_reproducible(seed in any::<u64>()) {
        let config = EmbedConfig::new(4, 2.0, 0.3, 1e3, 50, 20).unwrap().with_k1(0.02).unwrap();
        let rows = RandomRows::generate(50, 4, 20, RowDistribution::Uniform, seed);
        let a = stream_embed(&rows, &config, &mut stream_rng(seed)).unwrap();
        let b = stream_embed(&rows, &config, &mut stream_rng(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn row_streams_round_trip(rows in proptest::collection::vec(proptest::collection::vec(-1000i64..=1000, 5), 0..20)) {
        prop_assert_eq!(parse_row_stream(&format_row_stream(&rows), Some(5)).unwrap(), rows);
    }
}
