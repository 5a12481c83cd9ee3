use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversary::AdversaryStrategy;
use crate::error::{Error, Result};
use crate::graph::{gen_named, gen_random_regular, Graph, NamedGraph};
use crate::lowerbound::Player;
use crate::sizes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Amplify to per-edge error `1/n²`, then recover by max-consistency
    /// (or neighbor majority when enumeration is too large).
    UpperSimpleMajority,
    /// Amplify to error `δ/(4·d_max)`, then search for a robust partition.
    UpperRobustMajority,
    /// Budgeted players against the symmetric-noise adversary.
    LowerBound,
    /// Neighbor majority after `r` repeats, for each `r` in the sweep.
    NeighborMajoritySweep,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::UpperSimpleMajority => "upper-simple-majority",
            Scenario::UpperRobustMajority => "upper-robust-majority",
            Scenario::LowerBound => "lower-bound",
            Scenario::NeighborMajoritySweep => "neighbor-majority-sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum GraphSpec {
    /// `seed` defaults to the experiment seed.
    RandomRegular { n: usize, d: usize, seed: Option<u64> },
    Complete { n: usize },
    Cycle { n: usize },
    /// An edge-list file.
    File { path: PathBuf },
}

impl GraphSpec {
    pub fn build(&self, default_seed: u64) -> Result<Graph> {
        match self {
            GraphSpec::RandomRegular { n, d, seed } => gen_random_regular(*n, *d, seed.unwrap_or(default_seed)),
            GraphSpec::Complete { n } => gen_named(NamedGraph::Complete, *n),
            GraphSpec::Cycle { n } => gen_named(NamedGraph::Cycle, *n),
            GraphSpec::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read graph {}: {e}", path.display())))?;
                Graph::parse_edge_list(&text)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TFormula {
    /// `⌈n/2⌉`.
    Half,
    /// `⌈(1/2 + δ)n⌉`.
    Robust,
    /// Largest `t` with `0 <= 2t − n <= n^(1/2 − β)`.
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TSpec {
    Count(usize),
    Formula(TFormula),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum SearchSpec {
    /// Exhaustive up to the enumeration limit, local search beyond.
    Auto,
    Exhaustive,
    /// `budget` defaults to `200n` move evaluations.
    LocalSearch { budget: Option<usize> },
}

/// One experiment, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Results path; the CSV export goes next to it.
    pub output: Option<PathBuf>,
    pub t: TSpec,
    pub epsilon: f64,
    pub delta: Option<f64>,
    pub beta: Option<f64>,
    /// Involvement coefficient for the lower bound.
    pub c: Option<f64>,
    /// Query cap for the lower bound.
    pub budget: Option<usize>,
    /// Fixed repetition count, overriding the computed one.
    pub repeats: Option<usize>,
    pub adversary: Option<AdversaryStrategy>,
    pub player: Option<Player>,
    pub search: Option<SearchSpec>,
    /// Repeat counts (neighbor-majority sweep) or budgets (lower bound).
    pub sweep: Option<Vec<usize>>,
    pub graph: GraphSpec,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn adversary(&self) -> AdversaryStrategy {
        self.adversary.clone().unwrap_or(AdversaryStrategy::SymmetricNoise)
    }

    pub fn search(&self) -> SearchSpec {
        self.search.unwrap_or(SearchSpec::Auto)
    }

    pub fn resolve_t(&self, n: usize) -> Result<usize> {
        let t = match self.t {
            TSpec::Count(t) => t,
            TSpec::Formula(TFormula::Half) => n.div_ceil(2),
            TSpec::Formula(TFormula::Robust) => {
                let delta = self.delta.ok_or_else(|| config_err("t = \"robust\" needs delta"))?;
                sizes::ceil((0.5 + delta) * n as f64)
            }
            TSpec::Formula(TFormula::Simple) => {
                let beta = self.beta.ok_or_else(|| config_err("t = \"simple\" needs beta"))?;
                let gap = sizes::floor((n as f64).powf(0.5 - beta));
                ((n + gap) / 2).max(n.div_ceil(2))
            }
        };
        if t > n {
            return Err(config_err(format!("t = {t} exceeds n = {n}")));
        }
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        if !(0.0..0.5).contains(&self.epsilon) {
            return Err(config_err(format!("epsilon must lie in [0, 1/2), got {}", self.epsilon)));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 0.5) {
                return Err(config_err(format!("delta must lie in (0, 1/2), got {d}")));
            }
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < 0.5) {
                return Err(config_err(format!("beta must lie in (0, 1/2), got {b}")));
            }
        }
        if self.repeats.is_some_and(|r| r == 0 || r.is_multiple_of(2)) {
            return Err(config_err("repeats must be odd"));
        }
        match self.scenario {
            Scenario::UpperSimpleMajority => {
                if let Some(p) = self.player {
                    if !matches!(p, Player::NeighborMajority | Player::AmplifyThenMaxConsistency) {
                        return Err(config_err(format!("player {} does not apply to {}", p.name(), self.scenario.name())));
                    }
                }
            }
            Scenario::UpperRobustMajority => {
                if self.delta.is_none() {
                    return Err(config_err("upper-robust-majority needs delta"));
                }
            }
            Scenario::LowerBound => {
                if self.beta.is_none() {
                    return Err(config_err("lower-bound needs beta"));
                }
                if self.adversary.as_ref().is_some_and(|a| *a != AdversaryStrategy::SymmetricNoise) {
                    return Err(config_err("lower-bound runs against the symmetric-noise adversary only"));
                }
                if self.c.is_some_and(|c| c.is_nan() || c <= 0.0) {
                    return Err(config_err("c must be positive"));
                }
            }
            Scenario::NeighborMajoritySweep => match &self.sweep {
                None => return Err(config_err("neighbor-majority-sweep needs a sweep list")),
                Some(v) if v.is_empty() => return Err(config_err("sweep list is empty")),
                Some(v) if v.iter().any(|r| r.is_multiple_of(2)) => {
                    return Err(config_err("sweep repeat counts must be odd"))
                }
                _ => {}
            },
        }
        if self.sweep.is_some() && !matches!(self.scenario, Scenario::NeighborMajoritySweep | Scenario::LowerBound) {
            return Err(config_err(format!("{} does not take a sweep", self.scenario.name())));
        }
        Ok(())
    }
}
