//! Simple connected undirected graphs, the generators used by the
//! experiments, and the plain-text edge-list format.
//!
//! Adjacency is stored in compressed sparse row form with sorted neighbor
//! lists, which gives every directed edge `(u, v)` a dense index used by the
//! query protocol and the accusation graph.

mod expansion;
mod spectral;

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

pub use expansion::{
    check_delta_excellent, check_delta_good, violates_excellent, violates_small_set_expansion,
    ExcellentMode, ExpansionVerdict, GoodMode, Method, Outcome, Witness,
};
pub use spectral::{second_largest_eigenvalue, spectral_second_eigenvalue, POWER_ITERATION_CAP};

/// Retry cap for the random regular generator.
pub const REGULAR_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    d_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGraph {
    Complete,
    Cycle,
}

impl Graph {
    /// Builds a graph from an undirected edge list, rejecting self-loops,
    /// duplicate edges, out-of-range ids and disconnected results.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("need at least 2 vertices, got {n}")));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge at {u}")));
            }
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let d_max = adj.iter().map(Vec::len).max().unwrap_or(0);
        let g = Graph { n, offsets, neighbors, d_max };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Number of directed edges, `2|E|`.
    pub fn directed_edge_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.directed_index(u, v).is_some()
    }

    /// Dense index in `0..2|E|` of the directed edge `u -> v`.
    pub fn directed_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.neighbors(u).binary_search(&v).ok().map(|i| self.offsets[u] + i)
    }

    /// The directed edge with the given dense index.
    pub fn directed_edge(&self, index: usize) -> (usize, usize) {
        let u = self.offsets.partition_point(|&o| o <= index) - 1;
        (u, self.neighbors[index])
    }

    /// All directed edges `(u, v)` in index order (by `u`, then `v`).
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Undirected edges with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.directed_edges().filter(|&(u, v)| u < v).collect()
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (0..self.n).all(|u| self.degree(u) == d).then_some(d)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Re-checks simplicity, symmetry, connectivity and the cached maximum degree.
    pub fn validate(&self) -> Result<()> {
        for u in 0..self.n {
            let nb = self.neighbors(u);
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!("neighbors of {u} not strictly sorted")));
            }
            for &v in nb {
                if v == u {
                    return Err(Error::InvalidGraph(format!("self-loop at {u}")));
                }
                if !self.neighbors(v).binary_search(&u).is_ok() {
                    return Err(Error::InvalidGraph(format!("asymmetric edge ({u}, {v})")));
                }
            }
        }
        let d = (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0);
        if d != self.d_max {
            return Err(Error::InvalidGraph("cached maximum degree is stale".into()));
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(())
    }

    /// Serializes as `n m` followed by one `u v` line per edge with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut out = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let (n, m) = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let (u, v) = parse_pair(line, l)?;
            if u >= v {
                return Err(Error::parse(line, format!("expected u < v, got {u} {v}")));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::parse(hline, format!("header says {m} edges, found {}", edges.len())));
        }
        Graph::from_edges(n, &edges)
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut it = text.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::parse(line, "expected two integers"))?
            .parse()
            .map_err(|e| Error::parse(line, format!("{e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::parse(line, "trailing tokens"));
    }
    Ok((a, b))
}

/// The complete graph or the cycle on `n >= 3` vertices.
pub fn gen_named(kind: NamedGraph, n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::param(format!("named graphs need n >= 3, got {n}")));
    }
    let edges: Vec<_> = match kind {
        NamedGraph::Complete => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        NamedGraph::Cycle => (0..n).map(|u| (u.min((u + 1) % n), u.max((u + 1) % n))).collect(),
    };
    Graph::from_edges(n, &edges)
}

/// Random `d`-regular simple connected graph from the pairing model.
///
/// Points (`d` per vertex) are matched one pair at a time; a pair that would
/// create a loop or a repeated edge is rejected and redrawn. When no valid
/// pair remains, or the finished graph is disconnected, the whole attempt is
/// discarded. Gives up after [`REGULAR_ATTEMPTS`] attempts.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n * d % 2 == 1 {
        return Err(Error::Parity { n, d });
    }
    if d >= n {
        return Err(Error::param(format!("degree {d} must be below n = {n}")));
    }
    if d < 3 {
        return Err(Error::param(format!("degree {d} < 3")));
    }
    let mut rng = seed::stream_rng(seed, 0);
    // Dense degrees: pair the sparse complement instead.
    let dense = 2 * d > n - 1;
    let k = if dense { n - 1 - d } else { d };
    for _ in 0..REGULAR_ATTEMPTS {
        let Some(edges) = (if k == 0 { Some(Vec::new()) } else { try_pairing(n, k, &mut rng) }) else {
            continue;
        };
        let edges = if dense { complement_edges(n, &edges) } else { edges };
        if let Ok(g) = Graph::from_edges(n, &edges) {
            return Ok(g);
        }
    }
    Err(Error::RejectionBudget { n, d, attempts: REGULAR_ATTEMPTS })
}

fn complement_edges(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let present: std::collections::HashSet<(usize, usize)> =
        edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|e| !present.contains(e))
        .collect()
}

fn try_pairing<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
    let mut adj = vec![Vec::with_capacity(d); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    let ok = |adj: &[Vec<usize>], a: usize, b: usize| a != b && !adj[a].contains(&b);
    while !points.is_empty() {
        let len = points.len();
        let mut chosen = None;
        for _ in 0..4 * len {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            if i != j && ok(&adj, points[i], points[j]) {
                chosen = Some((i, j));
                break;
            }
        }
        if chosen.is_none() {
            // Too many rejections: enumerate what is left.
            let valid: Vec<(usize, usize)> = (0..len)
                .flat_map(|i| (i + 1..len).map(move |j| (i, j)))
                .filter(|&(i, j)| ok(&adj, points[i], points[j]))
                .collect();
            if valid.is_empty() {
                return None;
            }
            chosen = Some(valid[rng.gen_range(0..valid.len())]);
        }
        let (i, j) = chosen.unwrap();
        let (a, b) = (points[i], points[j]);
        adj[a].push(b);
        adj[b].push(a);
        edges.push((a.min(b), a.max(b)));
        let (hi, lo) = (i.max(j), i.min(j));
        points.swap_remove(hi);
        points.swap_remove(lo);
    }
    Some(edges)
}
