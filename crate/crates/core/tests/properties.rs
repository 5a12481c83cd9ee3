mod common;

use std::sync::Arc;

use nalgebra::DMatrix;
use noisycd::adversary::AdversaryStrategy;
use noisycd::detect::{
    amplify, count_cross_accusations, exact_bayes_posterior, robust_majority_partition, CoinView, SearchMode,
};
use noisycd::game::{Game, GameConfig, GroundTruth};
use noisycd::graph::{check_delta_excellent, gen_random_regular, spectral_second_eigenvalue, ExcellentMode, Graph};
use noisycd::harness::{evaluate_estimate, summarize, ResultRow, Scenario};
use noisycd::lowerbound::{find_obscured, lemma_trash_probability};
use noisycd::sizes;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn regular_params(max_n: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (5..=max_n)
        .prop_flat_map(|n| (Just(n), 3..n))
        .prop_filter("n*d even", |(n, d)| n * d % 2 == 0)
        .prop_flat_map(|(n, d)| (Just(n), Just(d), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_revalidate((n, d, seed) in regular_params(40)) {
        let g = gen_random_regular(n, d, seed).unwrap();
        prop_assert!(g.validate().is_ok());
        prop_assert_eq!(g.regular_degree(), Some(d));
        prop_assert_eq!(g.edge_count(), n * d / 2);
        for (u, v) in g.edges() {
            prop_assert!(u < v);
            prop_assert!(g.has_edge(v, u));
        }
        let back = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn excellence_is_monotone_in_delta((n, d, seed) in regular_params(14), i in 0usize..5, j in 0usize..5) {
        let grid = [0.08, 0.15, 0.22, 0.3, 0.4];
        let (lo, hi) = (grid[i.min(j)], grid[i.max(j)]);
        let g = gen_random_regular(n, d, seed).unwrap();
        prop_assume!(sizes::delta_set(hi, n) >= sizes::delta_set(lo, n));
        let a = check_delta_excellent(&g, lo, ExcellentMode::Exhaustive).unwrap();
        let b = check_delta_excellent(&g, hi, ExcellentMode::Exhaustive).unwrap();
        prop_assert!(!a.holds() || b.holds());
    }

    #[test]
    fn spectral_matches_dense_eigensolver((n, d, seed) in regular_params(32)) {
        let g = gen_random_regular(n, d, seed).unwrap();
        let tol = 1e-9;
        let lambda = spectral_second_eigenvalue(&g, tol).unwrap();
        let a = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
        let mut eig: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
        // the top eigenvalue d is simple for a connected graph
        let oracle = eig[1..].iter().map(|x| x.abs()).fold(0.0, f64::max);
        prop_assert!((lambda - oracle).abs() <= 10.0 * tol, "power {lambda} dense {oracle}");
    }

    #[test]
    fn coin_answers_carry_no_information(n in 4usize..=9, q in 0usize..30, seed: u64) {
        let t = n / 2 + 1;
        let game = common::random_game(n, t, 0.2, q, seed);
        let transcript = game.transcript();
        let mut flipped = transcript.clone();
        for r in flipped.records.iter_mut().filter(|r| r.coin) {
            r.answer = r.answer.negate();
        }
        let sn = AdversaryStrategy::SymmetricNoise;
        let a = exact_bayes_posterior(&transcript, t, 0.2, &sn, CoinView::Revealed).unwrap();
        let b = exact_bayes_posterior(&flipped, t, 0.2, &sn, CoinView::Revealed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn swap_symmetry_at_even_split(half in 2usize..=4, q in 0usize..40, seed: u64) {
        let n = 2 * half;
        let game = common::random_game(n, half, 0.3, q, seed);
        let post = exact_bayes_posterior(&game.transcript(), half, 0.3, &AdversaryStrategy::SymmetricNoise, CoinView::Hidden).unwrap();
        let full = (1u64 << n) - 1;
        for e in &post.support {
            let mirror = post.support.iter().find(|f| f.truthful == full ^ e.truthful).unwrap();
            prop_assert_eq!(e.probability.to_bits(), mirror.probability.to_bits());
        }
    }

    #[test]
    fn amplify_budget_is_exact((n, d, seed) in regular_params(20), half_r in 0usize..4) {
        let r = 2 * half_r + 1;
        let g = Arc::new(gen_random_regular(n, d, seed).unwrap());
        let mut game = Game::new(GameConfig::new(g.clone(), n / 2 + 1, 0.2, AdversaryStrategy::SymmetricNoise, seed)).unwrap();
        let acc = amplify(&mut game, r).unwrap();
        prop_assert_eq!(game.budget_used(), 2 * g.edge_count() * r);
        prop_assert!(acc.is_complete());
        prop_assert_eq!(acc.repeats(), r);
    }

    #[test]
    fn partition_candidates_recount(n in 8usize..=24, seed: u64, eps in 0.0f64..0.3) {
        let n = n + n % 2;
        let g = Arc::new(gen_random_regular(n, 4, seed).unwrap());
        let t = sizes::ceil(0.7 * n as f64);
        let mut game = Game::new(GameConfig::new(g, t, eps, AdversaryStrategy::SymmetricNoise, seed)).unwrap();
        let acc = amplify(&mut game, 3).unwrap();
        let delta = 0.2;
        let half = sizes::partition_half(delta, n);
        let modes = [SearchMode::LocalSearch { budget: Some(2000), seed }, SearchMode::Exhaustive];
        for mode in modes.into_iter().take(if n <= 16 { 2 } else { 1 }) {
            if let Some(c) = robust_majority_partition(&acc, delta, mode).unwrap() {
                prop_assert_eq!(c.x.len(), half);
                prop_assert_eq!(c.y.len(), half);
                prop_assert!(c.x.iter().all(|v| !c.y.contains(v)));
                prop_assert_eq!(count_cross_accusations(&acc, &c.x, &c.y).unwrap(), c.cross_accusations);
                prop_assert!(c.cross_accusations < sizes::delta_set(delta, n));
            }
        }
    }

    #[test]
    fn obscured_iff_every_incident_record_is_a_coin(n in 4usize..=10, q in 0usize..40, seed: u64) {
        let game = common::random_game(n, n / 2, 0.35, q, seed);
        let transcript = game.transcript();
        let report = find_obscured(&transcript);
        for v in 0..n {
            let naming: Vec<_> = transcript.records.iter().filter(|r| r.asker == v || r.subject == v).collect();
            prop_assert_eq!(report.involvement[v], naming.len());
            prop_assert_eq!(report.obscured.contains(&v), naming.iter().all(|r| r.coin));
        }
    }

    #[test]
    fn complement_estimates_have_equal_differences(n in 2usize..40, seed: u64) {
        let truth = GroundTruth::sample(n, n / 2, seed).unwrap();
        let est = GroundTruth::sample(n, n.div_ceil(2), seed ^ 1).unwrap();
        let m = evaluate_estimate(&truth, est.labels(), Some(0.1), 0).unwrap();
        prop_assert_eq!(m.sym_diff_t, m.sym_diff_b);
    }

    #[test]
    fn lemma_is_monotone_in_the_gap(n in 2usize..=200, o_frac in 0.0f64..=1.0) {
        let o = (o_frac * n as f64) as usize;
        let mut prev = 0.0;
        for t in n.div_ceil(2)..=n {
            let p = lemma_trash_probability(n, t, o).unwrap();
            prop_assert!(p + 1e-12 >= prev, "t={t}: {p} < {prev}");
            prev = p;
        }
    }

    #[test]
    fn summary_depends_only_on_the_row_multiset(seed: u64, k in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<ResultRow> = (0..k).map(|i| row(i, &mut rng)).collect();
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rng);
        prop_assert_eq!(summarize(&rows).unwrap(), summarize(&shuffled).unwrap());
    }
}

fn row(trial: usize, rng: &mut ChaCha8Rng) -> ResultRow {
    use rand::Rng;
    ResultRow {
        scenario: if rng.gen() { Scenario::LowerBound } else { Scenario::NeighborMajoritySweep },
        sweep_value: Some(rng.gen_range(0..3)),
        trial,
        seed: rng.gen(),
        n: 20,
        t: 11,
        epsilon: 0.2,
        player: "p".into(),
        adversary: "symmetric-noise".into(),
        repeats: None,
        queries_used: rng.gen_range(0..10_000),
        sym_diff_t: rng.gen_range(0..20),
        sym_diff_b: 0,
        success: rng.gen(),
        success_tenth: false,
        success_six_delta: None,
        found: None,
        cross_accusations: None,
        truth_split_cross: None,
        obscured: None,
        posterior_success: None,
    }
}
