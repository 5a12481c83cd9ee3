//! Checkers for the two expansion hypotheses.
//!
//! *δ-good*: every `U` with `1 <= |U| <= ⌊2δn⌋` has more than `|U|`
//! neighbors outside `U`, and every `U` with `|U| >= ⌈δn⌉` is joined by an
//! edge to every `W` with `|W| >= ⌈n/4⌉`.
//!
//! *δ-excellent*: any two disjoint sets of size `⌈δn⌉` are joined by an edge.
//!
//! Both "joined by an edge" clauses are monotone in the set sizes, so the
//! exhaustive checkers only enumerate the minimal sizes. Exhaustive checks
//! use `u32` bitmasks and are limited to `n <= 20`.

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use super::{spectral, Graph};
use crate::error::{Error, Result};
use crate::{seed, sizes};

pub const EXHAUSTIVE_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum Method {
    Exhaustive,
    Sampled { k: usize },
    SpectralSufficient { lambda: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Witness {
    /// A small set with at most `|set|` neighbors outside it.
    SmallSet { set: Vec<usize> },
    /// Two sets of the required sizes with no edge between them.
    Unlinked { first: Vec<usize>, second: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "outcome", content = "witness")]
pub enum Outcome {
    Holds,
    Fails(Witness),
    /// Only produced by the spectral sufficient condition.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionVerdict {
    pub outcome: Outcome,
    pub method: Method,
    pub delta: f64,
}

impl ExpansionVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::Fails(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum GoodMode {
    Exhaustive,
    /// `k` random candidates per clause; `None` means `10n`.
    Sampled { k: Option<usize>, seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub enum ExcellentMode {
    Exhaustive,
    SpectralSufficient { tol: f64 },
}

/// True when `set` has at most `|set|` neighbors outside itself.
pub fn violates_small_set_expansion(g: &Graph, set: &[usize]) -> bool {
    let inside = membership(g.n(), set);
    let mut outside = vec![false; g.n()];
    for &u in set {
        for &v in g.neighbors(u) {
            if !inside[v] {
                outside[v] = true;
            }
        }
    }
    outside.iter().filter(|&&b| b).count() <= set.len()
}

/// True when `x` and `y` are disjoint and no edge joins them.
pub fn violates_excellent(g: &Graph, x: &[usize], y: &[usize]) -> bool {
    let in_y = membership(g.n(), y);
    x.iter().all(|&u| !in_y[u]) && unlinked(g, x, &in_y)
}

impl Witness {
    /// Re-checks the witness against the definition it claims to violate.
    pub fn reproduces(&self, g: &Graph, delta: f64, excellent: bool) -> bool {
        let n = g.n();
        match self {
            Witness::SmallSet { set } => {
                !excellent
                    && !set.is_empty()
                    && set.len() <= sizes::small_set_limit(delta, n)
                    && violates_small_set_expansion(g, set)
            }
            Witness::Unlinked { first, second } => {
                let s = sizes::delta_set(delta, n);
                if excellent {
                    first.len() >= s && second.len() >= s && violates_excellent(g, first, second)
                } else {
                    first.len() >= s
                        && second.len() >= sizes::quarter(n)
                        && unlinked(g, first, &membership(n, second))
                }
            }
        }
    }
}

pub fn check_delta_good(g: &Graph, delta: f64, mode: GoodMode) -> Result<ExpansionVerdict> {
    check_delta(delta)?;
    let n = g.n();
    let limit = sizes::small_set_limit(delta, n);
    let s = sizes::delta_set(delta, n);
    let q = sizes::quarter(n);
    match mode {
        GoodMode::Exhaustive => {
            let masks = neighbor_masks(g)?;
            let full = full_mask(n);
            for size in 1..=limit.min(n) {
                for set in SubsetMasks::new(n, size) {
                    let reach = union(&masks, set);
                    if ((reach & !set).count_ones() as usize) <= size {
                        return Ok(fails(Witness::SmallSet { set: bits(set) }, Method::Exhaustive, delta));
                    }
                }
            }
            if s <= n {
                for set in SubsetMasks::new(n, s) {
                    let free = full & !union(&masks, set);
                    if free.count_ones() as usize >= q {
                        let second = bits(free).into_iter().take(q).collect();
                        let w = Witness::Unlinked { first: bits(set), second };
                        return Ok(fails(w, Method::Exhaustive, delta));
                    }
                }
            }
            Ok(verdict(Outcome::Holds, Method::Exhaustive, delta))
        }
        GoodMode::Sampled { k, seed } => {
            let k = k.unwrap_or(10 * n);
            let method = Method::Sampled { k };
            let mut rng = seed::stream_rng(seed, 0);
            if limit >= 1 {
                for _ in 0..k {
                    let size = rng.gen_range(1..=limit.min(n));
                    let set = sorted_sample(&mut rng, n, size);
                    if violates_small_set_expansion(g, &set) {
                        return Ok(fails(Witness::SmallSet { set }, method, delta));
                    }
                }
            }
            if s <= n {
                for _ in 0..k {
                    let set = sorted_sample(&mut rng, n, s);
                    let reach = reach(g, &set);
                    let free: Vec<usize> = (0..n).filter(|&v| !reach[v]).collect();
                    if free.len() >= q {
                        let second = free[..q].to_vec();
                        return Ok(fails(Witness::Unlinked { first: set, second }, method, delta));
                    }
                }
            }
            Ok(verdict(Outcome::Holds, method, delta))
        }
    }
}

pub fn check_delta_excellent(g: &Graph, delta: f64, mode: ExcellentMode) -> Result<ExpansionVerdict> {
    check_delta(delta)?;
    let n = g.n();
    let s = sizes::delta_set(delta, n);
    match mode {
        ExcellentMode::Exhaustive => {
            let masks = neighbor_masks(g)?;
            let full = full_mask(n);
            if 2 * s <= n {
                for set in SubsetMasks::new(n, s) {
                    let free = full & !set & !union(&masks, set);
                    if free.count_ones() as usize >= s {
                        let second = bits(free).into_iter().take(s).collect();
                        let w = Witness::Unlinked { first: bits(set), second };
                        return Ok(fails(w, Method::Exhaustive, delta));
                    }
                }
            }
            Ok(verdict(Outcome::Holds, Method::Exhaustive, delta))
        }
        ExcellentMode::SpectralSufficient { tol } => {
            let d = g.regular_degree().ok_or(Error::NotRegular)?;
            let lambda = spectral::spectral_second_eigenvalue(g, tol)?;
            // Mixing lemma: e(X, Y) >= d s^2 / n - lambda * s for |X| = |Y| = s.
            let threshold = d as f64 * s as f64 / n as f64;
            let outcome = if lambda + tol < threshold { Outcome::Holds } else { Outcome::Inconclusive };
            Ok(verdict(outcome, Method::SpectralSufficient { lambda, threshold }, delta))
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(Error::param(format!("delta must lie in (0, 1/2), got {delta}")))
    }
}

fn verdict(outcome: Outcome, method: Method, delta: f64) -> ExpansionVerdict {
    ExpansionVerdict { outcome, method, delta }
}

fn fails(w: Witness, method: Method, delta: f64) -> ExpansionVerdict {
    verdict(Outcome::Fails(w), method, delta)
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

fn reach(g: &Graph, set: &[usize]) -> Vec<bool> {
    let mut r = vec![false; g.n()];
    for &u in set {
        for &v in g.neighbors(u) {
            r[v] = true;
        }
    }
    r
}

fn unlinked(g: &Graph, x: &[usize], in_y: &[bool]) -> bool {
    x.iter().all(|&u| g.neighbors(u).iter().all(|&v| !in_y[v]))
}

fn sorted_sample<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut v = index::sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

fn neighbor_masks(g: &Graph) -> Result<Vec<u32>> {
    if g.n() > EXHAUSTIVE_MAX_N {
        return Err(Error::TooLarge(format!(
            "exhaustive expansion check needs n <= {EXHAUSTIVE_MAX_N}, got {}",
            g.n()
        )));
    }
    Ok((0..g.n()).map(|u| g.neighbors(u).iter().fold(0u32, |m, &v| m | 1 << v)).collect())
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn union(masks: &[u32], set: u32) -> u32 {
    let mut acc = 0;
    let mut rest = set;
    while rest != 0 {
        acc |= masks[rest.trailing_zeros() as usize];
        rest &= rest - 1;
    }
    acc
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All `n`-bit masks with `k` set bits, in increasing numeric order.
pub(crate) struct SubsetMasks {
    next: Option<u32>,
    limit: u32,
}

impl SubsetMasks {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        assert!(n < 32, "bitmask enumeration needs n < 32");
        let next = (k <= n).then(|| if k == 0 { 0 } else { (1u32 << k) - 1 });
        SubsetMasks { next, limit: 1u32 << n }
    }
}

impl Iterator for SubsetMasks {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt < self.limit && r != 0).then_some(nxt)
        };
        Some(cur)
    }
}
