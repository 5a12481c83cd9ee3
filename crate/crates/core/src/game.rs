//! The hidden partition into truthful and corrupt vertices and the noisy
//! query protocol.
//!
//! Every answer is generated through the coin-flip decomposition: with
//! probability `1 − 2ε` the asker is informative (a truthful asker reports the
//! subject's label, a corrupt asker follows its strategy) and with probability
//! `2ε` the answer is a fair coin. The coin tag is kept in the
//! [`Transcript`] for analysis but never reaches the player-facing
//! [`Answer`] or [`Observation`].
//!
//! Randomness for the `round`-th query of `asker` about `subject` comes from
//! a ChaCha stream addressed by the directed edge and the round, so a
//! transcript is a pure function of the seed and the multiset of queries.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{AdversaryStrategy, Draw, QueryContext};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Truthful,
    Corrupt,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::Truthful => Label::Corrupt,
            Label::Corrupt => Label::Truthful,
        }
    }

    pub fn is_truthful(self) -> bool {
        self == Label::Truthful
    }
}

/// What a vertex says about a neighbor. Also used for amplified verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    SaysTruthful,
    SaysCorrupt,
}

impl Answer {
    /// The answer that reports `label` correctly.
    pub fn about(label: Label) -> Answer {
        match label {
            Label::Truthful => Answer::SaysTruthful,
            Label::Corrupt => Answer::SaysCorrupt,
        }
    }

    pub fn negate(self) -> Answer {
        match self {
            Answer::SaysTruthful => Answer::SaysCorrupt,
            Answer::SaysCorrupt => Answer::SaysTruthful,
        }
    }

    /// Whether this answer reports `label` correctly.
    pub fn matches(self, label: Label) -> bool {
        self == Answer::about(label)
    }

    pub(crate) fn symbol(self) -> char {
        match self {
            Answer::SaysTruthful => 'T',
            Answer::SaysCorrupt => 'C',
        }
    }

    pub(crate) fn from_symbol(s: &str) -> Option<Answer> {
        match s {
            "T" => Some(Answer::SaysTruthful),
            "C" => Some(Answer::SaysCorrupt),
            _ => None,
        }
    }
}

/// A labeling of the vertices, either the hidden truth or a player estimate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labeling(pub Vec<Label>);

impl Labeling {
    pub fn from_truthful_set(n: usize, truthful: &[usize]) -> Labeling {
        let mut labels = vec![Label::Corrupt; n];
        for &v in truthful {
            labels[v] = Label::Truthful;
        }
        Labeling(labels)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, v: usize) -> Label {
        self.0[v]
    }

    pub fn truthful_set(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.0[v].is_truthful()).collect()
    }

    pub fn truthful_count(&self) -> usize {
        self.0.iter().filter(|l| l.is_truthful()).count()
    }

    pub fn complement(&self) -> Labeling {
        Labeling(self.0.iter().map(|l| l.flip()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    labels: Labeling,
    t: usize,
}

impl GroundTruth {
    pub fn from_labels(labels: Labeling) -> GroundTruth {
        let t = labels.truthful_count();
        GroundTruth { labels, t }
    }

    /// Truthful set uniform over all size-`t` subsets of `0..n`.
    pub fn sample(n: usize, t: usize, seed: u64) -> Result<GroundTruth> {
        if t > n {
            return Err(Error::param(format!("t = {t} exceeds n = {n}")));
        }
        let mut rng = seed::stream_rng(seed, seed::STREAM_GROUND_TRUTH);
        let chosen = index::sample(&mut rng, n, t).into_vec();
        Ok(GroundTruth { labels: Labeling::from_truthful_set(n, &chosen), t })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels.label(v)
    }

    pub fn labels(&self) -> &Labeling {
        &self.labels
    }
}

/// One answered query, including the analysis-only coin tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub asker: usize,
    pub subject: usize,
    pub round: u32,
    pub answer: Answer,
    /// True iff the answer came from the fair-coin branch.
    pub coin: bool,
}

/// The player-facing view of a query: no coin tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub asker: usize,
    pub subject: usize,
    pub round: u32,
    pub answer: Answer,
}

impl From<&QueryRecord> for Observation {
    fn from(r: &QueryRecord) -> Self {
        Observation { asker: r.asker, subject: r.subject, round: r.round, answer: r.answer }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub n: usize,
    /// `t` when it is disclosed to the player.
    pub disclosed_t: Option<usize>,
    pub epsilon: f64,
    pub seed: u64,
    pub records: Vec<QueryRecord>,
}

impl Transcript {
    pub fn budget_used(&self) -> usize {
        self.records.len()
    }

    pub fn observations(&self) -> Vec<Observation> {
        self.records.iter().map(Observation::from).collect()
    }

    /// Header `n t epsilon seed` (`t` is `-` when undisclosed), then one
    /// `round asker subject answer coin` line per record.
    pub fn to_text(&self) -> String {
        let t = self.disclosed_t.map_or_else(|| "-".to_string(), |t| t.to_string());
        let mut out = format!("{} {} {} {}\n", self.n, t, self.epsilon, self.seed);
        for r in &self.records {
            let _ = writeln!(out, "{} {} {} {} {}", r.round, r.asker, r.subject, r.answer.symbol(), r.coin as u8);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Transcript> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 {
            return Err(Error::parse(hl, "header must be `n t epsilon seed`"));
        }
        let n = num(hl, h[0])?;
        let disclosed_t = if h[1] == "-" { None } else { Some(num(hl, h[1])?) };
        let epsilon: f64 = h[2].parse().map_err(|_| Error::parse(hl, "bad epsilon"))?;
        let seed: u64 = h[3].parse().map_err(|_| Error::parse(hl, "bad seed"))?;
        let mut records = Vec::new();
        for (line, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 5 {
                return Err(Error::parse(line, "record must be `round asker subject answer coin`"));
            }
            let answer = Answer::from_symbol(f[3]).ok_or_else(|| Error::parse(line, "answer must be T or C"))?;
            let coin = match f[4] {
                "0" => false,
                "1" => true,
                _ => return Err(Error::parse(line, "coin must be 0 or 1")),
            };
            let round = f[0].parse().map_err(|_| Error::parse(line, "bad round"))?;
            let (asker, subject) = (num(line, f[1])?, num(line, f[2])?);
            if asker >= n || subject >= n {
                return Err(Error::parse(line, "vertex out of range"));
            }
            records.push(QueryRecord { asker, subject, round, answer, coin });
        }
        Ok(Transcript { n, disclosed_t, epsilon, seed, records })
    }
}

fn num(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::parse(line, format!("expected an integer, got {s:?}")))
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub graph: Arc<Graph>,
    pub t: usize,
    pub epsilon: f64,
    pub adversary: AdversaryStrategy,
    pub seed: u64,
    /// Whether the player is told `t`.
    pub disclose_t: bool,
}

impl GameConfig {
    pub fn new(graph: Arc<Graph>, t: usize, epsilon: f64, adversary: AdversaryStrategy, seed: u64) -> Self {
        GameConfig { graph, t, epsilon, adversary, seed, disclose_t: true }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if self.t > n {
            return Err(Error::param(format!("t = {} exceeds n = {n}", self.t)));
        }
        if !(0.0..0.5).contains(&self.epsilon) {
            return Err(Error::param(format!("epsilon must lie in [0, 1/2), got {}", self.epsilon)));
        }
        self.adversary.validate(n)
    }
}

/// A running game: hidden truth, adversary and the growing transcript.
#[derive(Debug, Clone)]
pub struct Game {
    graph: Arc<Graph>,
    truth: GroundTruth,
    epsilon: f64,
    adversary: AdversaryStrategy,
    seed: u64,
    disclose_t: bool,
    rng: ChaCha8Rng,
    rounds: Vec<u32>,
    records: Vec<QueryRecord>,
}

impl Game {
    pub fn new(config: GameConfig) -> Result<Game> {
        config.validate()?;
        let truth = GroundTruth::sample(config.graph.n(), config.t, config.seed)?;
        Game::with_truth(config, truth)
    }

    /// A game on a fixed ground truth instead of a sampled one.
    pub fn with_truth(config: GameConfig, truth: GroundTruth) -> Result<Game> {
        config.validate()?;
        if truth.n() != config.graph.n() {
            return Err(Error::param("ground truth size does not match the graph"));
        }
        let directed = config.graph.directed_edge_count();
        Ok(Game {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            rounds: vec![0; directed],
            records: Vec::new(),
            graph: config.graph,
            truth,
            epsilon: config.epsilon,
            adversary: config.adversary,
            seed: config.seed,
            disclose_t: config.disclose_t,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The hidden truth. Players must not read it; evaluation and the
    /// adversary do.
    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn disclosed_t(&self) -> Option<usize> {
        self.disclose_t.then_some(self.truth.t())
    }

    pub fn budget_used(&self) -> usize {
        self.records.len()
    }

    /// Ask `asker` about its neighbor `subject`.
    pub fn query(&mut self, asker: usize, subject: usize) -> Result<Answer> {
        let edge = self.graph.directed_index(asker, subject).ok_or(Error::NotAnEdge { asker, subject })?;
        let round = self.rounds[edge];
        self.rng.set_stream(edge as u64);
        self.rng.set_word_pos(round as u128 * 16);
        let draw = Draw { informative: self.rng.gen(), coin: self.rng.gen() };
        let (answer, coin) = match self.truth.label(asker) {
            Label::Truthful => truthful_response(self.epsilon, self.truth.label(subject), draw),
            Label::Corrupt => {
                let ctx = QueryContext {
                    graph: &self.graph,
                    truth: &self.truth,
                    epsilon: self.epsilon,
                    asker,
                    subject,
                    round,
                };
                self.adversary.respond(&ctx, draw)?
            }
        };
        self.rounds[edge] += 1;
        self.records.push(QueryRecord { asker, subject, round, answer, coin });
        Ok(answer)
    }

    pub fn transcript(&self) -> Transcript {
        Transcript {
            n: self.graph.n(),
            disclosed_t: self.disclosed_t(),
            epsilon: self.epsilon,
            seed: self.seed,
            records: self.records.clone(),
        }
    }

    pub fn records(&self) -> &[QueryRecord] {
        &self.records
    }

    pub fn observations(&self) -> Vec<Observation> {
        self.records.iter().map(Observation::from).collect()
    }
}

/// Informative with probability `1 − 2ε`, otherwise a fair coin.
pub(crate) fn truthful_response(epsilon: f64, subject: Label, draw: Draw) -> (Answer, bool) {
    if draw.informative < 1.0 - 2.0 * epsilon {
        (Answer::about(subject), false)
    } else {
        (draw.coin_answer(), true)
    }
}
