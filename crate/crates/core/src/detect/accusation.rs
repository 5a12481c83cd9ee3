use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{Answer, Game, Observation};
use crate::graph::Graph;

/// Majority verdict per directed edge.
///
/// Graphs built by [`amplify`] have a verdict on every directed edge. Graphs
/// built from a partial set of observations leave unqueried edges empty;
/// empty edges accuse nobody and cast no vote.
#[derive(Debug, Clone, PartialEq)]
pub struct AccusationGraph {
    graph: Arc<Graph>,
    verdicts: Vec<Option<Answer>>,
    repeats: usize,
}

impl AccusationGraph {
    /// `verdicts` is indexed by [`Graph::directed_index`].
    pub fn from_verdicts(graph: Arc<Graph>, verdicts: Vec<Answer>, repeats: usize) -> Result<Self> {
        if verdicts.len() != graph.directed_edge_count() {
            return Err(Error::param("one verdict per directed edge required"));
        }
        Ok(AccusationGraph { graph, verdicts: verdicts.into_iter().map(Some).collect(), repeats })
    }

    /// Every directed edge gets the same verdict.
    pub fn uniform(graph: Arc<Graph>, verdict: Answer) -> Self {
        let verdicts = vec![Some(verdict); graph.directed_edge_count()];
        AccusationGraph { graph, verdicts, repeats: 1 }
    }

    /// Majority of the observed answers per directed edge, ties toward
    /// truthful. `repeats` is the largest number of answers seen on an edge.
    pub fn from_observations(graph: Arc<Graph>, observations: &[Observation]) -> Result<Self> {
        let mut tally = vec![(0usize, 0usize); graph.directed_edge_count()];
        for o in observations {
            let e = graph
                .directed_index(o.asker, o.subject)
                .ok_or(Error::NotAnEdge { asker: o.asker, subject: o.subject })?;
            match o.answer {
                Answer::SaysTruthful => tally[e].0 += 1,
                Answer::SaysCorrupt => tally[e].1 += 1,
            }
        }
        let repeats = tally.iter().map(|(a, b)| a + b).max().unwrap_or(0);
        let verdicts = tally
            .into_iter()
            .map(|(yes, no)| (yes + no > 0).then(|| majority(yes, no)))
            .collect();
        Ok(AccusationGraph { graph, verdicts, repeats })
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

    pub fn repeats(&self) -> usize {
        self.repeats
    }

    pub fn is_complete(&self) -> bool {
        self.verdicts.iter().all(Option::is_some)
    }

    /// Verdict of `u` about `v`; `None` for non-edges and unqueried edges.
    pub fn verdict(&self, u: usize, v: usize) -> Option<Answer> {
        self.graph.directed_index(u, v).and_then(|e| self.verdicts[e])
    }

    pub fn set_verdict(&mut self, u: usize, v: usize, verdict: Answer) -> Result<()> {
        let e = self.graph.directed_index(u, v).ok_or(Error::NotAnEdge { asker: u, subject: v })?;
        self.verdicts[e] = Some(verdict);
        Ok(())
    }

    pub(crate) fn verdict_at(&self, index: usize) -> Option<Answer> {
        self.verdicts[index]
    }

    /// Whether either endpoint of the edge `{u, v}` calls the other corrupt.
    pub fn in_conflict(&self, u: usize, v: usize) -> bool {
        self.verdict(u, v) == Some(Answer::SaysCorrupt) || self.verdict(v, u) == Some(Answer::SaysCorrupt)
    }

    /// Header `n r`, then `u v verdict` per directed edge (`T`, `C`, or `-`
    /// for an edge without a verdict).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.repeats);
        for (i, (u, v)) in self.graph.directed_edges().enumerate() {
            let sym = self.verdicts[i].map_or('-', Answer::symbol);
            let _ = writeln!(out, "{u} {v} {sym}");
        }
        out
    }

    /// Parses [`AccusationGraph::to_text`] output; the underlying graph is
    /// rebuilt from the directed edges, which must come in both directions.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 2 {
            return Err(Error::parse(hl, "header must be `n r`"));
        }
        let n: usize = h[0].parse().map_err(|_| Error::parse(hl, "bad n"))?;
        let repeats: usize = h[1].parse().map_err(|_| Error::parse(hl, "bad r"))?;
        let mut entries = HashMap::new();
        for (line, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::parse(line, "expected `u v verdict`"));
            }
            let u: usize = f[0].parse().map_err(|_| Error::parse(line, "bad vertex"))?;
            let v: usize = f[1].parse().map_err(|_| Error::parse(line, "bad vertex"))?;
            let verdict = match f[2] {
                "-" => None,
                s => Some(Answer::from_symbol(s).ok_or_else(|| Error::parse(line, "verdict must be T, C or -"))?),
            };
            if entries.insert((u, v), verdict).is_some() {
                return Err(Error::parse(line, "duplicate directed edge"));
            }
        }
        let edges: Vec<(usize, usize)> = entries.keys().copied().filter(|&(u, v)| u < v).collect();
        if entries.keys().any(|&(u, v)| !entries.contains_key(&(v, u))) {
            return Err(Error::parse(hl, "every edge must appear in both directions"));
        }
        let graph = Arc::new(Graph::from_edges(n, &edges)?);
        let verdicts = graph.directed_edges().map(|e| entries[&e]).collect();
        Ok(AccusationGraph { graph, verdicts, repeats })
    }
}

fn majority(says_truthful: usize, says_corrupt: usize) -> Answer {
    if says_truthful >= says_corrupt {
        Answer::SaysTruthful
    } else {
        Answer::SaysCorrupt
    }
}

/// Repetition plan for amplification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifyPlan {
    pub repeats: usize,
    pub target_error: f64,
    pub epsilon: f64,
}

impl AmplifyPlan {
    pub fn new(epsilon: f64, target_error: f64) -> Result<Self> {
        Ok(AmplifyPlan { repeats: choose_repeats(epsilon, target_error)?, target_error, epsilon })
    }
}

/// Hoeffding bound `exp(−2r(1/2 − ε)²)` on the probability that the
/// majority of `r` answers, each correct w.p. `1 − ε`, is wrong.
pub fn hoeffding_bound(r: usize, epsilon: f64) -> f64 {
    (-2.0 * r as f64 * (0.5 - epsilon).powi(2)).exp()
}

/// Smallest odd `r` with `hoeffding_bound(r, ε) <= target_error`. A
/// noiseless asker needs a single query.
pub fn choose_repeats(epsilon: f64, target_error: f64) -> Result<usize> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::param(format!("amplification needs epsilon in [0, 1/2), got {epsilon}")));
    }
    if !(target_error > 0.0 && target_error < 1.0) {
        return Err(Error::param(format!("target error must lie in (0, 1), got {target_error}")));
    }
    if epsilon == 0.0 {
        return Ok(1);
    }
    let gap = (0.5 - epsilon).powi(2);
    let mut r = ((1.0 / target_error).ln() / (2.0 * gap)).ceil().max(1.0) as usize;
    if r.is_multiple_of(2) {
        r += 1;
    }
    while hoeffding_bound(r, epsilon) > target_error {
        r += 2;
    }
    while r >= 3 && hoeffding_bound(r - 2, epsilon) <= target_error {
        r -= 2;
    }
    Ok(r)
}

/// Amplification target for the robust-majority search: `δ / (4 d_max)`.
pub fn robust_target_error(delta: f64, d_max: usize) -> f64 {
    delta / (4.0 * d_max.max(1) as f64)
}

/// Asks every directed edge `r` times (`2|E|r` queries) and keeps the
/// majority answer.
pub fn amplify(game: &mut Game, r: usize) -> Result<AccusationGraph> {
    if r == 0 || r.is_multiple_of(2) {
        return Err(Error::param(format!("repeat count must be odd and positive, got {r}")));
    }
    let graph = game.shared_graph();
    let mut verdicts = Vec::with_capacity(graph.directed_edge_count());
    for (u, v) in graph.directed_edges() {
        let mut yes = 0;
        for _ in 0..r {
            if game.query(u, v)? == Answer::SaysTruthful {
                yes += 1;
            }
        }
        verdicts.push(majority(yes, r - yes));
    }
    AccusationGraph::from_verdicts(graph, verdicts, r)
}
