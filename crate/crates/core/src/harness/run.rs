use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Scenario, SearchSpec};
use super::metrics::evaluate_estimate;
use crate::detect::{self, SearchMode};
use crate::error::{Error, Result};
use crate::game::{Game, GameConfig, Labeling};
use crate::graph::Graph;
use crate::lowerbound::{self, LowerBoundConfig, Player};
use crate::{seed, sizes};

/// One trial. Optional fields are empty when the scenario does not
/// produce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: Scenario,
    pub sweep_value: Option<usize>,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub t: usize,
    pub epsilon: f64,
    pub player: String,
    pub adversary: String,
    pub repeats: Option<usize>,
    pub queries_used: usize,
    pub sym_diff_t: usize,
    pub sym_diff_b: usize,
    /// The scenario's own criterion: `6δn` for the robust upper bound,
    /// `n/10` otherwise.
    pub success: bool,
    pub success_tenth: bool,
    pub success_six_delta: Option<bool>,
    pub found: Option<bool>,
    pub cross_accusations: Option<usize>,
    pub truth_split_cross: Option<usize>,
    pub obscured: Option<usize>,
    pub posterior_success: Option<f64>,
}

struct Plan<'a> {
    config: &'a ExperimentConfig,
    graph: Arc<Graph>,
    t: usize,
}

impl Plan<'_> {
    fn game(&self, trial_seed: u64) -> Result<Game> {
        let gc = GameConfig::new(self.graph.clone(), self.t, self.config.epsilon, self.config.adversary(), trial_seed);
        Game::new(gc)
    }

    fn row(&self, sweep_value: Option<usize>, trial: usize, trial_seed: u64) -> ResultRow {
        ResultRow {
            scenario: self.config.scenario,
            sweep_value,
            trial,
            seed: trial_seed,
            n: self.graph.n(),
            t: self.t,
            epsilon: self.config.epsilon,
            player: String::new(),
            adversary: self.config.adversary().name().to_string(),
            repeats: None,
            queries_used: 0,
            sym_diff_t: 0,
            sym_diff_b: 0,
            success: false,
            success_tenth: false,
            success_six_delta: None,
            found: None,
            cross_accusations: None,
            truth_split_cross: None,
            obscured: None,
            posterior_success: None,
        }
    }

    fn finish(&self, mut row: ResultRow, game: &Game, estimate: &Labeling) -> Result<ResultRow> {
        let m = evaluate_estimate(game.truth(), estimate, self.config.delta, game.budget_used())?;
        row.queries_used = m.queries_used;
        row.sym_diff_t = m.sym_diff_t;
        row.sym_diff_b = m.sym_diff_b;
        row.success_tenth = m.success_tenth;
        row.success_six_delta = m.success_six_delta;
        row.success = match self.config.scenario {
            Scenario::UpperRobustMajority => m.success_six_delta.unwrap_or(false),
            _ => m.success_tenth,
        };
        Ok(row)
    }

    fn trial(&self, sweep_value: Option<usize>, trial: usize) -> Result<ResultRow> {
        let trial_seed = seed::child_seed(self.config.seed, trial as u64);
        let mut row = self.row(sweep_value, trial, trial_seed);
        let n = self.graph.n();
        match self.config.scenario {
            Scenario::UpperSimpleMajority => {
                let r = match self.config.repeats {
                    Some(r) => r,
                    None => detect::choose_repeats(self.config.epsilon, 1.0 / (n * n) as f64)?,
                };
                let player = self.config.player.unwrap_or(
                    if n <= 64 && sizes::binomial(n, self.t) <= detect::ENUMERATION_CAP {
                        Player::AmplifyThenMaxConsistency
                    } else {
                        Player::NeighborMajority
                    },
                );
                let mut game = self.game(trial_seed)?;
                let acc = detect::amplify(&mut game, r)?;
                let estimate = match player {
                    Player::AmplifyThenMaxConsistency => detect::max_consistency_labeling(&acc, self.t)?.swap_remove(0),
                    _ => detect::neighbor_majority(&acc),
                };
                row.player = player.name().to_string();
                row.repeats = Some(r);
                self.finish(row, &game, &estimate)
            }
            Scenario::UpperRobustMajority => {
                let delta = self.config.delta.expect("validated");
                let r = match self.config.repeats {
                    Some(r) => r,
                    None => detect::choose_repeats(
                        self.config.epsilon,
                        detect::robust_target_error(delta, self.graph.d_max()),
                    )?,
                };
                let mut game = self.game(trial_seed)?;
                let acc = detect::amplify(&mut game, r)?;
                let mode = match self.config.search() {
                    SearchSpec::Exhaustive => SearchMode::Exhaustive,
                    SearchSpec::Auto if n <= detect::EXHAUSTIVE_PARTITION_MAX_N => SearchMode::Exhaustive,
                    SearchSpec::Auto => SearchMode::LocalSearch { budget: None, seed: trial_seed },
                    SearchSpec::LocalSearch { budget } => SearchMode::LocalSearch { budget, seed: trial_seed },
                };
                let found = detect::robust_majority_partition(&acc, delta, mode)?;
                let estimate = match &found {
                    Some(c) => c.labeling(n),
                    None => Labeling::from_truthful_set(n, &[]),
                };
                if self.t >= 2 * sizes::partition_half(delta, n) {
                    let split = detect::verify_ground_truth_split(&acc, game.truth(), delta, trial_seed)?;
                    row.truth_split_cross = Some(split.cross_accusations);
                }
                row.player = Player::RobustPartition { delta }.name().to_string();
                row.repeats = Some(r);
                row.found = Some(found.is_some());
                row.cross_accusations = found.map(|c| c.cross_accusations);
                self.finish(row, &game, &estimate)
            }
            Scenario::LowerBound => {
                let beta = self.config.beta.expect("validated");
                let mut lb = LowerBoundConfig::new(self.graph.clone(), self.t, self.config.epsilon, beta, 1, self.config.seed);
                if let Some(c) = self.config.c {
                    lb.c = c;
                    lb.budget = lowerbound::default_budget(c, n);
                }
                if let Some(b) = sweep_value.or(self.config.budget) {
                    lb.budget = b;
                }
                let player = self.config.player.unwrap_or(Player::ExactBayes);
                let (out, game, estimate) = lowerbound::run_trial_detailed(&lb, player, trial)?;
                row.player = out.player;
                row.obscured = Some(out.obscured);
                row.posterior_success = out.posterior_success;
                self.finish(row, &game, &estimate)
            }
            Scenario::NeighborMajoritySweep => {
                let r = sweep_value.expect("validated");
                let mut game = self.game(trial_seed)?;
                let acc = detect::amplify(&mut game, r)?;
                let estimate = detect::neighbor_majority(&acc);
                row.player = Player::NeighborMajority.name().to_string();
                row.repeats = Some(r);
                self.finish(row, &game, &estimate)
            }
        }
    }
}

/// Runs every trial (for every sweep value) in parallel. Rows are ordered by
/// sweep position, then trial index, and do not depend on the thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let graph = Arc::new(config.graph.build(config.seed)?);
    let t = config.resolve_t(graph.n())?;
    let plan = Plan { config, graph, t };
    let sweep: Vec<Option<usize>> = match &config.sweep {
        Some(values) => values.iter().map(|&v| Some(v)).collect(),
        None => vec![None],
    };
    let jobs: Vec<(Option<usize>, usize)> =
        sweep.iter().flat_map(|&s| (0..config.trials).map(move |i| (s, i))).collect();
    jobs.into_par_iter().map(|(s, i)| plan.trial(s, i)).collect()
}

pub fn write_jsonl(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `path` as JSON lines and the same rows as CSV beside it; returns
/// the CSV path.
pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<PathBuf> {
    write_jsonl(rows, path)?;
    let csv_path = path.with_extension("csv");
    write_csv(rows, &csv_path)?;
    Ok(csv_path)
}

pub fn parse_rows(text: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(line).map_err(|e| Error::parse(i + 1, e.to_string()))?);
    }
    Ok(rows)
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut text = String::new();
    for line in BufReader::new(File::open(path)?).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    parse_rows(&text)
}
