//! Brute-force oracles over all size-`t` truthful sets.
//!
//! Candidate sets are enumerated in lexicographic order as `u64` bitmasks,
//! so these oracles need `n <= 64` and at most [`ENUMERATION_CAP`] sets.

use itertools::Itertools;

use super::AccusationGraph;
use crate::adversary::AdversaryStrategy;
use crate::error::{Error, Result};
use crate::game::{Answer, Labeling, Transcript};
use crate::sizes;

pub const ENUMERATION_CAP: u64 = 1_000_000;

/// How coin tags enter the likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinView {
    /// The player's view: only answers are seen. Under symmetric noise each
    /// answer is correct w.p. `1 − ε` from a truthful asker and wrong w.p.
    /// `1 − ε` from a corrupt one.
    Hidden,
    /// Coin tags revealed after the fact. Coin answers carry a constant
    /// factor; every other answer is a truthful report or a lie.
    Revealed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportEntry {
    /// Bit `v` set iff `v` is truthful.
    pub truthful: u64,
    pub probability: f64,
}

impl SupportEntry {
    pub fn truthful_set(&self) -> Vec<usize> {
        (0..64).filter(|&v| self.truthful >> v & 1 == 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub n: usize,
    /// Every size-`t` set, lexicographic order.
    pub support: Vec<SupportEntry>,
    /// Maximum a posteriori labeling; lexicographically first on ties.
    pub best: Labeling,
    /// Posterior mass within symmetric difference `⌊n/10⌋` of `best`.
    pub success_probability: f64,
}

impl Posterior {
    pub fn probability_of(&self, truthful: &[usize]) -> Option<f64> {
        let mask = to_mask(truthful);
        self.support.iter().find(|e| e.truthful == mask).map(|e| e.probability)
    }

    /// Posterior mass of sets within symmetric difference `radius` of `estimate`.
    pub fn mass_near(&self, estimate: &Labeling, radius: usize) -> f64 {
        let mask = to_mask(&estimate.truthful_set());
        self.support
            .iter()
            .filter(|e| (e.truthful ^ mask).count_ones() as usize <= radius)
            .map(|e| e.probability)
            .sum()
    }
}

/// Upper limit on `support × ball` updates in [`Posterior::bayes_decision`].
pub const DECISION_WORK_CAP: u64 = 50_000_000;

impl Posterior {
    /// The labeling of any size with the most posterior mass within
    /// symmetric difference `radius`, and that mass. Ties go to the
    /// numerically smallest truthful mask among masses within a relative
    /// `1e-12` of the maximum. `None` when the search would
    /// exceed [`DECISION_WORK_CAP`].
    pub fn bayes_decision(&self, radius: usize) -> Option<(Labeling, f64)> {
        let n = self.n;
        let ball: u64 = (0..=radius.min(n)).map(|k| sizes::binomial(n, k)).fold(0, u64::saturating_add);
        if ball.saturating_mul(self.support.len() as u64) > DECISION_WORK_CAP {
            return None;
        }
        let flips: Vec<u64> = (0..=radius.min(n)).flat_map(|k| (0..n).combinations(k).map(|c| to_mask(&c))).collect();
        let mut mass = std::collections::HashMap::<u64, f64>::with_capacity(self.support.len() * flips.len());
        for e in self.support.iter().filter(|e| e.probability > 0.0) {
            for f in &flips {
                *mass.entry(e.truthful ^ f).or_default() += e.probability;
            }
        }
        let top = mass.values().copied().fold(0.0, f64::max);
        let (mask, p) = mass
            .into_iter()
            .filter(|&(_, p)| p >= top * (1.0 - 1e-12))
            .min_by_key(|&(m, _)| m)?;
        let set = SupportEntry { truthful: mask, probability: p }.truthful_set();
        Some((Labeling::from_truthful_set(n, &set), p))
    }
}

fn to_mask(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &v| m | 1 << v)
}

fn check_size(n: usize, t: usize) -> Result<()> {
    if t > n {
        return Err(Error::param(format!("t = {t} exceeds n = {n}")));
    }
    let count = sizes::binomial(n, t);
    if n > 64 || count > ENUMERATION_CAP {
        return Err(Error::TooLarge(format!("C({n}, {t}) = {count} candidate sets exceeds the cap")));
    }
    Ok(())
}

fn candidates(n: usize, t: usize) -> impl Iterator<Item = u64> {
    (0..n).combinations(t).map(|c| to_mask(&c))
}

/// Per directed pair: how often the asker said truthful / corrupt.
struct Tally {
    asker: usize,
    subject: usize,
    says_truthful: u64,
    says_corrupt: u64,
}

fn tally(transcript: &Transcript, skip_coins: bool) -> Vec<Tally> {
    let mut map = std::collections::BTreeMap::<(usize, usize), (u64, u64)>::new();
    for r in transcript.records.iter().filter(|r| !(skip_coins && r.coin)) {
        let e = map.entry((r.asker, r.subject)).or_default();
        match r.answer {
            Answer::SaysTruthful => e.0 += 1,
            Answer::SaysCorrupt => e.1 += 1,
        }
    }
    map.into_iter()
        .map(|((asker, subject), (says_truthful, says_corrupt))| Tally { asker, subject, says_truthful, says_corrupt })
        .collect()
}

/// Exact posterior over truthful sets of size `t`, uniform prior, for a
/// transcript produced against the symmetric-noise adversary.
pub fn exact_bayes_posterior(
    transcript: &Transcript,
    t: usize,
    epsilon: f64,
    adversary: &AdversaryStrategy,
    view: CoinView,
) -> Result<Posterior> {
    if *adversary != AdversaryStrategy::SymmetricNoise {
        return Err(Error::Unsupported(format!(
            "closed-form likelihood only for symmetric-noise, got {}",
            adversary.name()
        )));
    }
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::param(format!("epsilon must lie in [0, 1/2), got {epsilon}")));
    }
    let n = transcript.n;
    check_size(n, t)?;
    let tallies = tally(transcript, view == CoinView::Revealed);
    let (ln_good, ln_bad) = ((1.0 - epsilon).ln(), epsilon.ln());

    let mut sets = Vec::with_capacity(sizes::binomial(n, t) as usize);
    let mut log_weights = Vec::with_capacity(sets.capacity());
    for mask in candidates(n, t) {
        // "good": what the asker's label predicts (truth if truthful, a lie if corrupt)
        let (mut good, mut bad) = (0u64, 0u64);
        for c in &tallies {
            let asker_truthful = mask >> c.asker & 1 == 1;
            let subject_truthful = mask >> c.subject & 1 == 1;
            let (agree, disagree) = if subject_truthful {
                (c.says_truthful, c.says_corrupt)
            } else {
                (c.says_corrupt, c.says_truthful)
            };
            if asker_truthful {
                good += agree;
                bad += disagree;
            } else {
                good += disagree;
                bad += agree;
            }
        }
        let lw = match view {
            CoinView::Revealed => {
                if bad == 0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            CoinView::Hidden if bad > 0 && epsilon == 0.0 => f64::NEG_INFINITY,
            CoinView::Hidden if epsilon == 0.0 => 0.0,
            CoinView::Hidden => good as f64 * ln_good + bad as f64 * ln_bad,
        };
        sets.push(mask);
        log_weights.push(lw);
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::param("transcript has zero likelihood under every candidate set"));
    }
    let weights: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    let z: f64 = weights.iter().sum();
    let support: Vec<SupportEntry> = sets
        .iter()
        .zip(&weights)
        .map(|(&truthful, w)| SupportEntry { truthful, probability: w / z })
        .collect();
    let best_mask = support
        .iter()
        .fold(None::<&SupportEntry>, |best, e| match best {
            Some(b) if b.probability >= e.probability => Some(b),
            _ => Some(e),
        })
        .map(|e| e.truthful)
        .unwrap_or(0);
    let radius = sizes::tenth(n);
    let success_probability = support
        .iter()
        .filter(|e| (e.truthful ^ best_mask).count_ones() as usize <= radius)
        .map(|e| e.probability)
        .sum();
    let best = Labeling::from_truthful_set(n, &SupportEntry { truthful: best_mask, probability: 0.0 }.truthful_set());
    Ok(Posterior { n, support, best, success_probability })
}

/// All size-`t` labelings with the fewest violated verdicts, lexicographic
/// order. A verdict `u → v` is violated when `u` is labeled truthful and the
/// verdict disagrees with `v`'s label.
pub fn max_consistency_labeling(acc: &AccusationGraph, t: usize) -> Result<Vec<Labeling>> {
    let n = acc.n();
    check_size(n, t)?;
    let g = acc.graph();
    let mut calls_truthful = vec![0u64; n];
    let mut calls_corrupt = vec![0u64; n];
    for (i, (u, v)) in g.directed_edges().enumerate() {
        match acc.verdict_at(i) {
            Some(Answer::SaysTruthful) => calls_truthful[u] |= 1 << v,
            Some(Answer::SaysCorrupt) => calls_corrupt[u] |= 1 << v,
            None => {}
        }
    }
    let mut best = u32::MAX;
    let mut winners = Vec::new();
    for mask in candidates(n, t) {
        let mut violations = 0u32;
        let mut rest = mask;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            violations += (calls_truthful[u] & !mask).count_ones() + (calls_corrupt[u] & mask).count_ones();
            rest &= rest - 1;
        }
        if violations < best {
            best = violations;
            winners.clear();
        }
        if violations == best {
            winners.push(mask);
        }
    }
    Ok(winners
        .into_iter()
        .map(|m| Labeling::from_truthful_set(n, &SupportEntry { truthful: m, probability: 0.0 }.truthful_set()))
        .collect())
}

/// Number of violated verdicts under `labeling`.
pub fn violations(acc: &AccusationGraph, labeling: &Labeling) -> usize {
    acc.graph()
        .directed_edges()
        .enumerate()
        .filter(|&(i, (u, v))| {
            labeling.label(u).is_truthful()
                && acc.verdict_at(i).is_some_and(|a| !a.matches(labeling.label(v)))
        })
        .count()
}
