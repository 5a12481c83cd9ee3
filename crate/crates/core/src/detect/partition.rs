//! Search for two disjoint halves `X`, `Y` of size `⌊(1/4 + δ/2)n⌋` with
//! fewer than `⌈δn⌉` accusing edges between them. When the truthful set is a
//! robust majority, `X ∪ Y` is then close to it.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::AccusationGraph;
use crate::error::{Error, Result};
use crate::game::{GroundTruth, Labeling};
use crate::{seed, sizes};

pub const EXHAUSTIVE_PARTITION_MAX_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionCandidate {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub cross_accusations: usize,
}

impl PartitionCandidate {
    /// `T′ = X ∪ Y`, sorted.
    pub fn t_prime(&self) -> Vec<usize> {
        self.x.iter().chain(&self.y).copied().sorted().collect()
    }

    /// `T′ = X ∪ Y` labeled truthful, everything else corrupt.
    pub fn labeling(&self, n: usize) -> Labeling {
        Labeling::from_truthful_set(n, &self.t_prime())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Complete enumeration, `n <= 16`.
    Exhaustive,
    /// Restarted first-improvement descent. `budget` counts move
    /// evaluations and defaults to `200n`.
    LocalSearch { budget: Option<usize>, seed: u64 },
}

/// Unordered adjacent pairs `{x, y}`, `x ∈ X`, `y ∈ Y`, where either endpoint
/// calls the other corrupt.
pub fn count_cross_accusations(acc: &AccusationGraph, x: &[usize], y: &[usize]) -> Result<usize> {
    let n = acc.n();
    let mut in_y = vec![false; n];
    for &v in y {
        if v >= n {
            return Err(Error::VertexOutOfRange(v));
        }
        in_y[v] = true;
    }
    let mut count = 0;
    for &u in x {
        if u >= n {
            return Err(Error::VertexOutOfRange(u));
        }
        if in_y[u] {
            return Err(Error::param(format!("vertex {u} is in both sets")));
        }
        count += acc.graph().neighbors(u).iter().filter(|&&v| in_y[v] && acc.in_conflict(u, v)).count();
    }
    Ok(count)
}

pub fn robust_majority_partition(
    acc: &AccusationGraph,
    delta: f64,
    mode: SearchMode,
) -> Result<Option<PartitionCandidate>> {
    let n = acc.n();
    let half = sizes::partition_half(delta, n);
    if half < 1 || 2 * half > n {
        return Err(Error::param(format!("partition halves of size {half} are infeasible for n = {n}")));
    }
    let threshold = sizes::delta_set(delta, n);
    let conflicts = conflict_lists(acc);
    match mode {
        SearchMode::Exhaustive => exhaustive(&conflicts, half, threshold),
        SearchMode::LocalSearch { budget, seed } => {
            let budget = budget.unwrap_or(200 * n);
            Ok(LocalSearch::new(&conflicts, half, seed).run(threshold, budget))
        }
    }
}

fn conflict_lists(acc: &AccusationGraph) -> Vec<Vec<usize>> {
    let g = acc.graph();
    (0..g.n())
        .map(|u| g.neighbors(u).iter().copied().filter(|&v| acc.in_conflict(u, v)).collect())
        .collect()
}

/// Lexicographically first `(X, Y)` with `min X < min Y`.
fn exhaustive(conflicts: &[Vec<usize>], half: usize, threshold: usize) -> Result<Option<PartitionCandidate>> {
    let n = conflicts.len();
    if n > EXHAUSTIVE_PARTITION_MAX_N {
        return Err(Error::TooLarge(format!(
            "exhaustive partition search needs n <= {EXHAUSTIVE_PARTITION_MAX_N}, got {n}"
        )));
    }
    let masks: Vec<u32> = conflicts.iter().map(|c| c.iter().fold(0, |m, &v| m | 1 << v)).collect();
    for x in (0..n).combinations(half) {
        let xmask = x.iter().fold(0u32, |m, &v| m | 1 << v);
        let rest: Vec<usize> = (x[0] + 1..n).filter(|&v| xmask >> v & 1 == 0).collect();
        for y in rest.into_iter().combinations(half) {
            let ymask = y.iter().fold(0u32, |m, &v| m | 1 << v);
            let cost: u32 = x.iter().map(|&u| (masks[u] & ymask).count_ones()).sum();
            if (cost as usize) < threshold {
                return Ok(Some(PartitionCandidate { x, y, cross_accusations: cost as usize }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    X,
    Y,
    Out,
}

#[derive(Debug, Clone, Copy)]
enum Move {
    /// Replace `members[side][i]` by `out[j]`.
    Replace { side: Side, i: usize, j: usize },
    /// Swap `x[i]` and `y[j]` between the halves.
    Exchange { i: usize, j: usize },
}

struct LocalSearch<'a> {
    conflicts: &'a [Vec<usize>],
    half: usize,
    rng: rand_chacha::ChaCha8Rng,
    side: Vec<Side>,
    x: Vec<usize>,
    y: Vec<usize>,
    out: Vec<usize>,
    /// Conflicting neighbors in X and in Y, per vertex.
    in_x: Vec<usize>,
    in_y: Vec<usize>,
    cost: usize,
}

impl<'a> LocalSearch<'a> {
    fn new(conflicts: &'a [Vec<usize>], half: usize, seed: u64) -> Self {
        let n = conflicts.len();
        LocalSearch {
            conflicts,
            half,
            rng: seed::stream_rng(seed, seed::STREAM_SEARCH),
            side: vec![Side::Out; n],
            x: Vec::new(),
            y: Vec::new(),
            out: Vec::new(),
            in_x: vec![0; n],
            in_y: vec![0; n],
            cost: 0,
        }
    }

    fn restart(&mut self) {
        let n = self.conflicts.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        self.x = order[..self.half].to_vec();
        self.y = order[self.half..2 * self.half].to_vec();
        self.out = order[2 * self.half..].to_vec();
        self.side.fill(Side::Out);
        self.x.iter().for_each(|&v| self.side[v] = Side::X);
        self.y.iter().for_each(|&v| self.side[v] = Side::Y);
        for v in 0..n {
            self.in_x[v] = self.conflicts[v].iter().filter(|&&w| self.side[w] == Side::X).count();
            self.in_y[v] = self.conflicts[v].iter().filter(|&&w| self.side[w] == Side::Y).count();
        }
        self.cost = self.x.iter().map(|&v| self.in_y[v]).sum();
    }

    fn neighborhood(&self) -> usize {
        2 * self.half * self.out.len() + self.half * self.half
    }

    fn nth_move(&self, k: usize) -> Move {
        let replace = 2 * self.half * self.out.len();
        if k < replace {
            let (slot, j) = (k / self.out.len(), k % self.out.len());
            if slot < self.half {
                Move::Replace { side: Side::X, i: slot, j }
            } else {
                Move::Replace { side: Side::Y, i: slot - self.half, j }
            }
        } else {
            let k = k - replace;
            Move::Exchange { i: k / self.half, j: k % self.half }
        }
    }

    fn delta(&self, m: Move) -> isize {
        match m {
            Move::Replace { side: Side::X, i, j } => self.in_y[self.out[j]] as isize - self.in_y[self.x[i]] as isize,
            Move::Replace { side: _, i, j } => self.in_x[self.out[j]] as isize - self.in_x[self.y[i]] as isize,
            Move::Exchange { i, j } => {
                let (a, b) = (self.x[i], self.y[j]);
                let linked = self.conflicts[a].contains(&b) as isize;
                self.in_x[a] as isize + self.in_y[b] as isize - self.in_y[a] as isize - self.in_x[b] as isize
                    + 2 * linked
            }
        }
    }

    fn relocate(&mut self, v: usize, to: Side) {
        let from = self.side[v];
        for &w in &self.conflicts[v] {
            match from {
                Side::X => self.in_x[w] -= 1,
                Side::Y => self.in_y[w] -= 1,
                Side::Out => {}
            }
            match to {
                Side::X => self.in_x[w] += 1,
                Side::Y => self.in_y[w] += 1,
                Side::Out => {}
            }
        }
        self.side[v] = to;
    }

    fn apply(&mut self, m: Move, delta: isize) {
        match m {
            Move::Replace { side, i, j } => {
                let incoming = self.out[j];
                let outgoing = match side {
                    Side::X => std::mem::replace(&mut self.x[i], incoming),
                    _ => std::mem::replace(&mut self.y[i], incoming),
                };
                self.out[j] = outgoing;
                self.relocate(outgoing, Side::Out);
                self.relocate(incoming, side);
            }
            Move::Exchange { i, j } => {
                let (a, b) = (self.x[i], self.y[j]);
                self.x[i] = b;
                self.y[j] = a;
                self.relocate(a, Side::Y);
                self.relocate(b, Side::X);
            }
        }
        self.cost = (self.cost as isize + delta) as usize;
        debug_assert_eq!(self.cost, self.x.iter().map(|&v| self.in_y[v]).sum::<usize>());
    }

    fn candidate(&self) -> PartitionCandidate {
        PartitionCandidate {
            x: self.x.iter().copied().sorted().collect(),
            y: self.y.iter().copied().sorted().collect(),
            cross_accusations: self.cost,
        }
    }

    fn run(mut self, threshold: usize, budget: usize) -> Option<PartitionCandidate> {
        let mut spent = 0;
        'restarts: while spent < budget {
            self.restart();
            let size = self.neighborhood();
            if size == 0 {
                return (self.cost < threshold).then(|| self.candidate());
            }
            loop {
                if self.cost < threshold {
                    return Some(self.candidate());
                }
                // Random probes first, then a full scan to certify a local minimum.
                let mut improved = false;
                for _ in 0..size {
                    if spent >= budget {
                        break 'restarts;
                    }
                    spent += 1;
                    let k = self.rng.gen_range(0..size);
                    let m = self.nth_move(k);
                    let d = self.delta(m);
                    if d < 0 {
                        self.apply(m, d);
                        improved = true;
                        break;
                    }
                }
                if improved {
                    continue;
                }
                for k in 0..size {
                    if spent >= budget {
                        break 'restarts;
                    }
                    spent += 1;
                    let m = self.nth_move(k);
                    let d = self.delta(m);
                    if d < 0 {
                        self.apply(m, d);
                        improved = true;
                        break;
                    }
                }
                if !improved {
                    continue 'restarts;
                }
            }
        }
        None
    }
}

/// A random split of the true truthful set into two halves of size
/// `⌊(1/4 + δ/2)n⌋`, with their cross-accusation count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundTruthSplit {
    pub t1: Vec<usize>,
    pub t2: Vec<usize>,
    pub cross_accusations: usize,
}

pub fn verify_ground_truth_split(
    acc: &AccusationGraph,
    truth: &GroundTruth,
    delta: f64,
    seed: u64,
) -> Result<GroundTruthSplit> {
    let n = acc.n();
    let half = sizes::partition_half(delta, n);
    if truth.t() < 2 * half {
        return Err(Error::param(format!("t = {} is below 2 * {half}", truth.t())));
    }
    let mut truthful = truth.labels().truthful_set();
    truthful.shuffle(&mut seed::stream_rng(seed, seed::STREAM_SPLIT));
    let t1: Vec<usize> = truthful[..half].iter().copied().sorted().collect();
    let t2: Vec<usize> = truthful[half..2 * half].iter().copied().sorted().collect();
    let cross_accusations = count_cross_accusations(acc, &t1, &t2)?;
    Ok(GroundTruthSplit { t1, t2, cross_accusations })
}
