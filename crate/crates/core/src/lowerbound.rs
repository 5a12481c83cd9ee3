//! Lower-bound apparatus for the simple-majority regime.
//!
//! Under the symmetric-noise adversary every answer, truthful or corrupt, is
//! a fair coin with probability `2ε`. A vertex all of whose incident answers
//! were coins is *obscured*: nothing about it leaks into the transcript.
//! With a budget of `c·n·ln(n)/20` queries at most `n/10` vertices can be
//! involved in more than `c·ln n` queries, so many vertices stay obscured,
//! and once they are removed the remaining truthful/corrupt balance is a
//! near-fair coin ([`lemma_trash_probability`]).

use std::sync::Arc;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::AdversaryStrategy;
use crate::detect::{self, AccusationGraph, CoinView, SearchMode};
use crate::error::{Error, Result};
use crate::game::{Game, GameConfig, Labeling, Transcript};
use crate::graph::Graph;
use crate::{seed, sizes};

#[derive(Debug, Clone, PartialEq)]
pub struct ObscuredReport {
    /// Vertices every incident record of which is coin-tagged (including
    /// vertices with no records at all).
    pub obscured: Vec<usize>,
    /// Records naming each vertex as asker or subject.
    pub involvement: Vec<usize>,
}

impl ObscuredReport {
    /// Number of vertices involved in more than `threshold` records.
    pub fn heavily_involved(&self, threshold: f64) -> usize {
        self.involvement.iter().filter(|&&k| k as f64 > threshold).count()
    }

    /// Fraction of vertices involved in at most `threshold` records.
    pub fn fraction_low_involvement(&self, threshold: f64) -> f64 {
        1.0 - self.heavily_involved(threshold) as f64 / self.involvement.len() as f64
    }

    /// `Σ_v (2ε)^involvement(v)`: the expected obscured count given the
    /// involvement profile.
    pub fn expected_obscured(&self, epsilon: f64) -> f64 {
        self.involvement.iter().map(|&k| (2.0 * epsilon).powi(k as i32)).sum()
    }
}

pub fn find_obscured(transcript: &Transcript) -> ObscuredReport {
    let n = transcript.n;
    let mut involvement = vec![0; n];
    let mut informed = vec![false; n];
    for r in &transcript.records {
        involvement[r.asker] += 1;
        involvement[r.subject] += 1;
        if !r.coin {
            informed[r.asker] = true;
            informed[r.subject] = true;
        }
    }
    let obscured = (0..n).filter(|&v| !informed[v]).collect();
    ObscuredReport { obscured, involvement }
}

/// `P[H = k]` for `k` in the support of the hypergeometric law of the
/// number of marked items among `draws` drawn without replacement from
/// `population` items of which `marked` are marked.
///
/// Terms are built by ratio recurrences outward from the mode and
/// normalized by their sum, so no factorials are formed.
pub fn hypergeometric_pmf(population: usize, marked: usize, draws: usize) -> Result<Vec<(usize, f64)>> {
    if marked > population || draws > population {
        return Err(Error::param("hypergeometric parameters exceed the population"));
    }
    let (nn, kk, m) = (population as f64, marked as f64, draws as f64);
    let lo = (draws + marked).saturating_sub(population);
    let hi = draws.min(marked);
    let mode = (((m + 1.0) * (kk + 1.0) / (nn + 2.0)).floor() as usize).clamp(lo, hi);
    let mut w = vec![0.0; hi - lo + 1];
    w[mode - lo] = 1.0;
    for k in mode..hi {
        let kf = k as f64;
        let ratio = (kk - kf) * (m - kf) / ((kf + 1.0) * (nn - kk - m + kf + 1.0));
        w[k + 1 - lo] = w[k - lo] * ratio;
    }
    for k in (lo + 1..=mode).rev() {
        let kf = k as f64;
        let ratio = kf * (nn - kk - m + kf) / ((kk - kf + 1.0) * (m - kf + 1.0));
        w[k - 1 - lo] = w[k - lo] * ratio;
    }
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().enumerate().map(|(i, x)| (lo + i, x / total)).collect())
}

/// Exact `P[|T ∖ O| >= |B ∖ O|]` for `|T| = t`, `|B| = n − t` and `O` a
/// uniform `o`-subset: with `H = |T ∩ O|` hypergeometric, the event is
/// `H <= ⌊(t − b + o)/2⌋`.
pub fn lemma_trash_probability(n: usize, t: usize, o: usize) -> Result<f64> {
    if t > n || o > n {
        return Err(Error::param(format!("need t, o <= n; got n={n}, t={t}, o={o}")));
    }
    let b = n - t;
    if t < b {
        return Err(Error::param(format!("need t >= n - t; got t={t}, n={n}")));
    }
    let cutoff = (t - b + o) / 2;
    let pmf = hypergeometric_pmf(n, t, o)?;
    let p: f64 = pmf.iter().filter(|(k, _)| *k <= cutoff).map(|(_, p)| p).sum();
    Ok(p.min(1.0))
}

/// `c = β / (2 ln(1/(2ε)))`, so that `(2ε)^(c ln n) = n^(−β/2)`.
pub fn default_c(beta: f64, epsilon: f64) -> f64 {
    if epsilon <= 0.0 {
        return 0.0;
    }
    beta / (2.0 * (1.0 / (2.0 * epsilon)).ln())
}

/// `⌊c·n·ln(n)/20⌋`.
pub fn default_budget(c: f64, n: usize) -> usize {
    sizes::floor(c * n as f64 * (n as f64).ln() / 20.0)
}

#[derive(Debug, Clone)]
pub struct LowerBoundConfig {
    pub graph: Arc<Graph>,
    pub beta: f64,
    pub c: f64,
    pub epsilon: f64,
    pub budget: usize,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
}

impl LowerBoundConfig {
    /// Config with the default `c` and budget.
    pub fn new(graph: Arc<Graph>, t: usize, epsilon: f64, beta: f64, trials: usize, seed: u64) -> Self {
        let c = default_c(beta, epsilon);
        let budget = default_budget(c, graph.n());
        LowerBoundConfig { graph, beta, c, epsilon, budget, t, trials, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if self.t > n {
            return Err(Error::param(format!("t = {} exceeds n = {n}", self.t)));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::param(format!("beta must lie in (0, 1/2), got {}", self.beta)));
        }
        if self.c.is_nan() || self.c <= 0.0 {
            return Err(Error::param(format!("c must be positive, got {}", self.c)));
        }
        if !(0.0..0.5).contains(&self.epsilon) {
            return Err(Error::param(format!("epsilon must lie in [0, 1/2), got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Whether `0 <= t − (n − t) <= n^(1/2 − β)` and the budget is within
    /// `c·n·ln(n)/20`.
    pub fn in_theorem_regime(&self) -> bool {
        let n = self.graph.n();
        let gap = 2 * self.t as i64 - n as i64;
        gap >= 0
            && gap as f64 <= (n as f64).powf(0.5 - self.beta) + 1e-9
            && self.budget as f64 <= self.c * n as f64 * (n as f64).ln() / 20.0 + 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Player {
    /// The labeling with the most posterior mass within `⌊n/10⌋`, from the
    /// answers alone; the maximum a posteriori set when that search is too
    /// large.
    ExactBayes,
    NeighborMajority,
    AmplifyThenMaxConsistency,
    /// A uniform size-`t` guess without queries.
    RandomGuess,
    /// `X ∪ Y` from the robust-majority partition search.
    RobustPartition { delta: f64 },
}

impl Player {
    pub fn name(&self) -> &'static str {
        match self {
            Player::ExactBayes => "exact-bayes",
            Player::NeighborMajority => "neighbor-majority",
            Player::AmplifyThenMaxConsistency => "amplify-then-max-consistency",
            Player::RandomGuess => "random-guess",
            Player::RobustPartition { .. } => "robust-partition",
        }
    }

    fn uses_queries(&self) -> bool {
        !matches!(self, Player::RandomGuess)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub player: String,
    pub success: bool,
    pub sym_diff: usize,
    pub obscured: usize,
    pub budget_used: usize,
    /// Posterior mass (player's view) within `⌊n/10⌋` of the estimate, when
    /// the posterior is small enough to enumerate.
    pub posterior_success: Option<f64>,
}

/// Queries directed edges in index order, cycling, until `budget` queries
/// have been made.
pub fn spend_round_robin(game: &mut Game, budget: usize) -> Result<()> {
    let graph = game.shared_graph();
    let m = graph.directed_edge_count();
    for k in 0..budget {
        let (u, v) = graph.directed_edge(k % m);
        game.query(u, v)?;
    }
    Ok(())
}

/// Estimate and game after running `player` on trial `trial`.
pub fn play(config: &LowerBoundConfig, player: Player, trial: usize) -> Result<(Game, Labeling)> {
    config.validate()?;
    let n = config.graph.n();
    let trial_seed = seed::child_seed(config.seed, trial as u64);
    let gc = GameConfig::new(config.graph.clone(), config.t, config.epsilon, AdversaryStrategy::SymmetricNoise, trial_seed);
    let mut game = Game::new(gc)?;
    if player.uses_queries() {
        spend_round_robin(&mut game, config.budget)?;
    }
    let t = config.t;
    let estimate = match player {
        Player::ExactBayes => {
            let post = detect::exact_bayes_posterior(
                &game.transcript(),
                t,
                config.epsilon,
                &AdversaryStrategy::SymmetricNoise,
                CoinView::Hidden,
            )?;
            match post.bayes_decision(sizes::tenth(n)) {
                Some((labeling, _)) => labeling,
                None => post.best,
            }
        }
        Player::NeighborMajority => {
            detect::neighbor_majority(&AccusationGraph::from_observations(game.shared_graph(), &game.observations())?)
        }
        Player::AmplifyThenMaxConsistency => {
            let acc = AccusationGraph::from_observations(game.shared_graph(), &game.observations())?;
            detect::max_consistency_labeling(&acc, t)?.swap_remove(0)
        }
        Player::RandomGuess => {
            let mut rng = seed::stream_rng(trial_seed, seed::STREAM_PLAYER);
            Labeling::from_truthful_set(n, &index::sample(&mut rng, n, t).into_vec())
        }
        Player::RobustPartition { delta } => {
            let acc = AccusationGraph::from_observations(game.shared_graph(), &game.observations())?;
            let mode = if n <= detect::EXHAUSTIVE_PARTITION_MAX_N {
                SearchMode::Exhaustive
            } else {
                SearchMode::LocalSearch { budget: None, seed: trial_seed }
            };
            match detect::robust_majority_partition(&acc, delta, mode)? {
                Some(c) => c.labeling(n),
                None => Labeling::from_truthful_set(n, &[]),
            }
        }
    };
    Ok((game, estimate))
}

pub fn run_lowerbound_trial(config: &LowerBoundConfig, player: Player, trial: usize) -> Result<TrialOutcome> {
    Ok(run_trial_detailed(config, player, trial)?.0)
}

/// [`run_lowerbound_trial`] plus the finished game and the estimate.
pub fn run_trial_detailed(config: &LowerBoundConfig, player: Player, trial: usize) -> Result<(TrialOutcome, Game, Labeling)> {
    let (game, estimate) = play(config, player, trial)?;
    let n = config.graph.n();
    let truth = game.truth().labels();
    let sym_diff = (0..n).filter(|&v| truth.label(v) != estimate.label(v)).count();
    let transcript = game.transcript();
    let posterior_success = if sizes::binomial(n, config.t) <= detect::ENUMERATION_CAP && n <= 64 {
        let post = detect::exact_bayes_posterior(
            &transcript,
            config.t,
            config.epsilon,
            &AdversaryStrategy::SymmetricNoise,
            CoinView::Hidden,
        )?;
        Some(post.mass_near(&estimate, sizes::tenth(n)))
    } else {
        None
    };
    let outcome = TrialOutcome {
        trial,
        seed: seed::child_seed(config.seed, trial as u64),
        player: player.name().to_string(),
        success: sym_diff <= sizes::tenth(n),
        sym_diff,
        obscured: find_obscured(&transcript).obscured.len(),
        budget_used: transcript.budget_used(),
        posterior_success,
    };
    Ok((outcome, game, estimate))
}

/// All `config.trials` trials, in trial order; runs in parallel.
pub fn run_lowerbound(config: &LowerBoundConfig, player: Player) -> Result<Vec<TrialOutcome>> {
    (0..config.trials).into_par_iter().map(|i| run_lowerbound_trial(config, player, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Answer, QueryRecord};
    use crate::graph::{gen_named, gen_random_regular, NamedGraph};

    fn rec(asker: usize, subject: usize, coin: bool) -> QueryRecord {
        QueryRecord { asker, subject, round: 0, answer: Answer::SaysTruthful, coin }
    }

    fn transcript(n: usize, records: Vec<QueryRecord>) -> Transcript {
        Transcript { n, disclosed_t: Some(1), epsilon: 0.2, seed: 0, records }
    }

    #[test]
    fn obscured_fixtures() {
        assert_eq!(find_obscured(&transcript(5, vec![])).obscured, vec![0, 1, 2, 3, 4]);
        let all_coin = transcript(4, vec![rec(0, 1, true), rec(2, 3, true)]);
        assert_eq!(find_obscured(&all_coin).obscured, vec![0, 1, 2, 3]);
        let fixture = transcript(5, vec![rec(0, 1, true), rec(1, 2, false), rec(2, 3, true)]);
        let report = find_obscured(&fixture);
        assert_eq!(report.obscured, vec![0, 3, 4]);
        assert_eq!(report.involvement, vec![1, 2, 2, 1, 0]);
        assert_eq!(report.heavily_involved(1.0), 2);
        assert!((report.fraction_low_involvement(1.0) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn trash_probability_closed_cases() {
        assert_eq!(lemma_trash_probability(10, 6, 0).unwrap(), 1.0);
        assert!((lemma_trash_probability(10, 6, 10).unwrap() - 1.0).abs() < 1e-15);
        assert!((lemma_trash_probability(4, 2, 2).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!(lemma_trash_probability(10, 4, 2).is_err());
        assert!(lemma_trash_probability(10, 6, 11).is_err());
    }

    #[test]
    fn pmf_sums_to_one_and_has_right_support() {
        let pmf = hypergeometric_pmf(20, 12, 15).unwrap();
        assert_eq!(pmf.first().unwrap().0, 7);
        assert_eq!(pmf.last().unwrap().0, 12);
        assert!((pmf.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(hypergeometric_pmf(5, 0, 3).unwrap(), vec![(0, 1.0)]);
    }

    #[test]
    fn default_calibration() {
        let c = default_c(0.2, 0.2);
        let n: f64 = 1000.0;
        assert!(((0.4f64).powf(c * n.ln()) - n.powf(-0.1)).abs() < 1e-12);
        assert_eq!(default_budget(c, 13), 0);
        assert_eq!(default_budget(1.0, 100), 23);
    }

    #[test]
    fn regime_check() {
        let g = Arc::new(gen_random_regular(13, 4, 1).unwrap());
        let cfg = LowerBoundConfig::new(g.clone(), 7, 0.2, 0.2, 10, 1);
        assert!(cfg.in_theorem_regime());
        let cfg = LowerBoundConfig { t: 10, ..cfg };
        assert!(!cfg.in_theorem_regime());
        let bad = LowerBoundConfig { beta: 0.7, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn round_robin_spends_exactly_the_budget() {
        let g = Arc::new(gen_named(NamedGraph::Cycle, 5).unwrap());
        let mut game = Game::new(GameConfig::new(g, 3, 0.2, AdversaryStrategy::SymmetricNoise, 2)).unwrap();
        spend_round_robin(&mut game, 23).unwrap();
        assert_eq!(game.budget_used(), 23);
        let rounds: Vec<u32> = game.records().iter().map(|r| r.round).collect();
        assert_eq!(rounds[..10], [0; 10]);
        assert_eq!(rounds[20..], [2, 2, 2]);
    }

    #[test]
    fn zero_budget_random_guess() {
        let g = Arc::new(gen_random_regular(13, 4, 1).unwrap());
        let mut cfg = LowerBoundConfig::new(g, 7, 0.2, 0.2, 1, 3);
        cfg.budget = 0;
        let out = run_lowerbound_trial(&cfg, Player::RandomGuess, 0).unwrap();
        assert_eq!(out.budget_used, 0);
        assert_eq!(out.obscured, 13);
        assert_eq!(out.success, out.sym_diff == 0);
        // with no data every set has posterior 1/1716
        assert!((out.posterior_success.unwrap() - 1.0 / 1716.0).abs() < 1e-15);
    }
}
