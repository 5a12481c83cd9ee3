mod common;

use std::sync::Arc;

use noisycd::adversary::AdversaryStrategy;
use noisycd::detect::{amplify, choose_repeats, exact_bayes_posterior, neighbor_majority, CoinView};
use noisycd::game::{Game, GameConfig, GroundTruth, Label, Labeling};
use noisycd::graph::{
    check_delta_excellent, gen_named, gen_random_regular, spectral_second_eigenvalue, ExcellentMode, Graph, NamedGraph,
    Outcome,
};
use noisycd::harness::{run_experiment, wilson, write_results, ExperimentConfig, Z95, Z99};
use noisycd::lowerbound::{
    default_budget, default_c, find_obscured, hypergeometric_pmf, lemma_trash_probability, run_lowerbound,
    LowerBoundConfig, Player,
};
use noisycd::sizes;
use statrs::distribution::{Discrete, Hypergeometric};

#[test]
fn hypergeometric_matches_statrs() {
    for &(n, k, m) in &[(20, 12, 7), (60, 31, 25), (200, 101, 80), (13, 7, 13), (50, 0, 10)] {
        let oracle = Hypergeometric::new(n as u64, k as u64, m as u64).unwrap();
        let pmf = hypergeometric_pmf(n, k, m).unwrap();
        let total: f64 = (0..=m as u64).map(|x| oracle.pmf(x)).sum();
        assert!((total - 1.0).abs() < 1e-9);
        for (x, p) in pmf {
            assert!((p - oracle.pmf(x as u64)).abs() < 1e-12, "n={n} k={k} m={m} x={x}");
        }
    }
    for &(n, t, o) in &[(100, 55, 30), (200, 104, 150), (64, 32, 17)] {
        let oracle = Hypergeometric::new(n as u64, t as u64, o as u64).unwrap();
        let cutoff = (2 * t - n + o) / 2;
        let expect: f64 = (0..=cutoff as u64).map(|x| oracle.pmf(x)).sum();
        assert!((lemma_trash_probability(n, t, o).unwrap() - expect).abs() < 1e-9);
    }
}

#[test]
fn lemma_at_a_tie_is_half_plus_half_the_tie_mass() {
    for n in (2..=200).step_by(2) {
        let t = n / 2;
        for o in [0, 1, 2, n / 3, n / 2, n - 1, n] {
            let pmf = hypergeometric_pmf(n, t, o).unwrap();
            let tie: f64 = pmf.iter().filter(|(k, _)| 2 * k == o).map(|(_, p)| p).sum();
            let value = lemma_trash_probability(n, t, o).unwrap();
            assert!((value - (0.5 + tie / 2.0)).abs() < 1e-12, "n={n} o={o}");
        }
    }
}

#[test]
fn obscured_with_probability_two_epsilon_to_the_k() {
    let eps = 0.2;
    let trials = 10_000;
    let g = Arc::new(Graph::from_edges(2, &[(0, 1)]).unwrap());
    for k in [1usize, 2, 5] {
        let mut hits = 0;
        for s in 0..trials {
            let cfg = GameConfig::new(g.clone(), 2, eps, AdversaryStrategy::SymmetricNoise, s);
            let mut game = Game::new(cfg).unwrap();
            for _ in 0..k {
                game.query(0, 1).unwrap();
            }
            let report = find_obscured(&game.transcript());
            assert_eq!(report.involvement, vec![k, k]);
            hits += usize::from(report.obscured.contains(&1));
        }
        let p = (2.0 * eps).powi(k as i32);
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        let freq = hits as f64 / trials as f64;
        assert!((freq - p).abs() <= 3.0 * se, "k={k}: {freq} vs {p}");
    }
}

fn answer_stats(asker: Label, subject: Label, samples: usize, seed: u64) -> (usize, usize) {
    let g = Arc::new(Graph::from_edges(2, &[(0, 1)]).unwrap());
    let truth = GroundTruth::from_labels(Labeling(vec![asker, subject]));
    let t = truth.t();
    let cfg = GameConfig::new(g, t, 0.2, AdversaryStrategy::SymmetricNoise, seed);
    let mut game = Game::with_truth(cfg, truth).unwrap();
    let mut says_truthful = 0;
    for _ in 0..samples {
        says_truthful += usize::from(game.query(0, 1).unwrap().matches(Label::Truthful));
    }
    let coins = game.records().iter().filter(|r| r.coin).count();
    (says_truthful, coins)
}

fn two_proportion_z(a: usize, b: usize, n: usize) -> f64 {
    let (pa, pb) = (a as f64 / n as f64, b as f64 / n as f64);
    let pooled = (a + b) as f64 / (2 * n) as f64;
    let se = (pooled * (1.0 - pooled) * 2.0 / n as f64).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (pa - pb) / se
    }
}

#[test]
fn corrupt_answers_mirror_truthful_ones() {
    let samples = 100_000;
    let critical = 2.5758293035489004;
    for subject in [Label::Truthful, Label::Corrupt] {
        let (truthful_yes, truthful_coins) = answer_stats(Label::Truthful, subject, samples, 1);
        let (corrupt_yes, corrupt_coins) = answer_stats(Label::Corrupt, subject, samples, 2);
        // negate the corrupt asker's answers: "says truthful" becomes "says corrupt"
        let mirrored_yes = samples - corrupt_yes;
        assert!(two_proportion_z(truthful_yes, mirrored_yes, samples).abs() < critical);
        assert!(two_proportion_z(truthful_coins, corrupt_coins, samples).abs() < critical);
    }
}

#[test]
fn posterior_on_a_path_matches_brute_force() {
    let g = Arc::new(Graph::from_edges(8, &(0..7).map(|v| (v, v + 1)).collect::<Vec<_>>()).unwrap());
    let mut game = Game::new(GameConfig::new(g.clone(), 5, 0.2, AdversaryStrategy::SymmetricNoise, 77)).unwrap();
    for k in 0..20 {
        let (u, v) = g.directed_edge(k * 5 % g.directed_edge_count());
        game.query(u, v).unwrap();
    }
    let transcript = game.transcript();
    let post = exact_bayes_posterior(&transcript, 5, 0.2, &AdversaryStrategy::SymmetricNoise, CoinView::Hidden).unwrap();
    let oracle = common::brute_force_posterior(&transcript, 5, 0.2);
    assert_eq!(post.support.len(), oracle.len());
    for e in &post.support {
        assert!(common::rel_err(e.probability, oracle[&e.truthful]) <= 1e-9);
    }
}

#[test]
fn random_guess_success_by_enumeration() {
    // sets of size 7 within symmetric difference ⌊13/10⌋ of a fixed T
    let truth = common::mask_of(&[0, 1, 2, 3, 4, 5, 6]);
    let near = (0u64..1 << 13)
        .filter(|m| m.count_ones() == 7 && (m ^ truth).count_ones() as usize <= sizes::tenth(13))
        .count();
    assert_eq!(near, 1);
    let within_two = (0u64..1 << 13).filter(|m| m.count_ones() == 7 && (m ^ truth).count_ones() <= 2).count();
    assert_eq!(within_two, 7 * 6 + 1);

    let g = Arc::new(gen_random_regular(13, 4, 2).unwrap());
    let mut cfg = LowerBoundConfig::new(g, 7, 0.2, 0.2, 20_000, 8);
    cfg.budget = 0;
    let outcomes = run_lowerbound(&cfg, Player::RandomGuess).unwrap();
    let wins = outcomes.iter().filter(|o| o.success).count();
    let interval = wilson(wins, outcomes.len(), Z99);
    let p = near as f64 / 1716.0;
    assert!(interval.lo <= p && p <= interval.hi, "{wins} wins, {interval:?}");
}

#[test]
fn exact_bayes_is_optimal_in_posterior_expectation() {
    let players = [
        Player::NeighborMajority,
        Player::AmplifyThenMaxConsistency,
        Player::RobustPartition { delta: 0.05 },
    ];
    for (n, d, t) in [(12, 3, 6), (13, 4, 7), (10, 3, 6)] {
        let g = Arc::new(gen_random_regular(n, d, n as u64).unwrap());
        let mut cfg = LowerBoundConfig::new(g, t, 0.2, 0.2, 60, 5);
        cfg.budget = 3 * n;
        let bayes = run_lowerbound(&cfg, Player::ExactBayes).unwrap();
        for p in players {
            let other = run_lowerbound(&cfg, p).unwrap();
            for (b, o) in bayes.iter().zip(&other) {
                assert_eq!(b.seed, o.seed);
                assert!(b.posterior_success.unwrap() + 1e-12 >= o.posterior_success.unwrap(), "{}", p.name());
            }
        }
        let mut guess_cfg = cfg.clone();
        guess_cfg.budget = 0;
        let guess = run_lowerbound(&guess_cfg, Player::RandomGuess).unwrap();
        let total = |v: &[noisycd::lowerbound::TrialOutcome]| v.iter().map(|o| o.posterior_success.unwrap()).sum::<f64>();
        assert!(total(&bayes) >= total(&guess));
    }
}

#[test]
fn lower_bound_defaults_are_calibrated() {
    let eps = 0.2;
    let beta = 0.2;
    let c = default_c(beta, eps);
    for n in [100usize, 10_000] {
        let obscured = (2.0 * eps).powf(c * (n as f64).ln());
        assert!((obscured - (n as f64).powf(-beta / 2.0)).abs() < 1e-12);
    }
    assert_eq!(default_budget(c, 13), 0);
}

#[test]
fn neighbor_majority_with_robust_neighborhoods() {
    let n = 1024;
    let g = Arc::new(gen_random_regular(n, 16, 3).unwrap());
    let r = choose_repeats(0.1, 1.0 / (n * n) as f64).unwrap();
    let trials = 20u64;
    let mut good = 0u64;
    for s in 0..trials {
        let cfg = GameConfig::new(g.clone(), 768, 0.1, AdversaryStrategy::SymmetricNoise, s);
        let mut game = Game::new(cfg).unwrap();
        let acc = amplify(&mut game, r).unwrap();
        let est = neighbor_majority(&acc);
        let correct = (0..n).filter(|&v| est.label(v) == game.truth().label(v)).count();
        good += u64::from(correct * 10 >= 9 * n);
    }
    assert!(good * 100 >= 95 * trials, "{good}/{trials}");
}

#[test]
fn spectral_verdict_on_a_large_sparse_graph_follows_the_measured_eigenvalue() {
    let g = gen_random_regular(1024, 16, 5).unwrap();
    let tol = 1e-6;
    let lambda = spectral_second_eigenvalue(&g, tol).unwrap();
    let threshold = 16.0 * sizes::delta_set(0.2, 1024) as f64 / 1024.0;
    let verdict = check_delta_excellent(&g, 0.2, ExcellentMode::SpectralSufficient { tol }).unwrap();
    if lambda + tol < threshold {
        assert_eq!(verdict.outcome, Outcome::Holds);
    } else {
        assert_eq!(verdict.outcome, Outcome::Inconclusive);
    }
    // a random 16-regular graph sits near 2√15, far above the threshold
    assert!(lambda > 6.0 && lambda < 8.5);
}

#[test]
fn spectral_examples_against_closed_forms() {
    let tol = 1e-10;
    for n in [4usize, 10] {
        let k = gen_named(NamedGraph::Complete, n).unwrap();
        assert!((spectral_second_eigenvalue(&k, tol).unwrap() - 1.0).abs() < 1e-8);
    }
    let c8 = gen_named(NamedGraph::Cycle, 8).unwrap();
    // circulant spectrum 2cos(2πj/8); the largest modulus off the top is |−2|
    assert!((spectral_second_eigenvalue(&c8, tol).unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn experiment_replay_is_independent_of_thread_count() {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
scenario = "upper-robust-majority"
trials = 6
seed = 99
t = "robust"
epsilon = 0.1
delta = 0.1

[graph]
kind = "random-regular"
n = 40
d = 6
"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let rows = pool.install(|| run_experiment(&cfg)).unwrap();
        let path = dir.path().join(format!("r{threads}.jsonl"));
        write_results(&rows, &path).unwrap();
        files.push((std::fs::read(&path).unwrap(), std::fs::read(path.with_extension("csv")).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn trials_zero_is_a_config_error() {
    let err = ExperimentConfig::from_toml_str(
        "scenario = \"lower-bound\"\ntrials = 0\nt = 7\nepsilon = 0.2\nbeta = 0.2\n[graph]\nkind = \"cycle\"\nn = 13\n",
    )
    .unwrap_err();
    assert!(err.is_config());
}

#[test]
fn wilson_reference_values() {
    let i = wilson(50, 100, Z95);
    assert!((i.lo - 0.40383).abs() < 5e-5 && (i.hi - 0.59617).abs() < 5e-5);
    let all = wilson(100, 100, Z95);
    assert_eq!(all.hi, 1.0);
    let one = wilson(0, 1, Z99);
    assert!(one.lo == 0.0 && one.hi > 0.8 && one.hi < 1.0);
}
