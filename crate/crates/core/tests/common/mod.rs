#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use noisycd::adversary::AdversaryStrategy;
use noisycd::game::{Answer, Game, GameConfig, Transcript};
use noisycd::graph::{gen_named, gen_random_regular, Graph, NamedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Posterior over size-`t` truthful sets, recomputed record by record from
/// the generative model: a truthful asker is right w.p. `1 − ε`, a
/// symmetric-noise corrupt asker is wrong w.p. `1 − ε`.
pub fn brute_force_posterior(transcript: &Transcript, t: usize, eps: f64) -> HashMap<u64, f64> {
    let n = transcript.n;
    let mut weights = HashMap::new();
    let mut total = 0.0;
    for mask in 0u64..1 << n {
        if mask.count_ones() as usize != t {
            continue;
        }
        let mut w = 1.0;
        for r in &transcript.records {
            let asker_truthful = mask >> r.asker & 1 == 1;
            let subject_truthful = mask >> r.subject & 1 == 1;
            let correct = (r.answer == Answer::SaysTruthful) == subject_truthful;
            let p_correct = if asker_truthful { 1.0 - eps } else { eps };
            w *= if correct { p_correct } else { 1.0 - p_correct };
        }
        total += w;
        weights.insert(mask, w);
    }
    for w in weights.values_mut() {
        *w /= total;
    }
    weights
}

pub fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &v| m | 1 << v)
}

/// A small random connected graph on `n` vertices.
pub fn small_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    match rng.gen_range(0..3) {
        0 if n >= 4 && n.is_multiple_of(2) => gen_random_regular(n, 3, rng.gen()).unwrap(),
        1 => gen_named(NamedGraph::Complete, n).unwrap(),
        _ => gen_named(NamedGraph::Cycle, n).unwrap(),
    }
}

/// A symmetric-noise game on a random small graph with `queries` uniformly
/// chosen directed-edge queries.
pub fn random_game(n: usize, t: usize, eps: f64, queries: usize, seed: u64) -> Game {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Arc::new(small_graph(n, &mut rng));
    let m = g.directed_edge_count();
    let mut game = Game::new(GameConfig::new(g.clone(), t, eps, AdversaryStrategy::SymmetricNoise, rng.gen())).unwrap();
    for _ in 0..queries {
        let (u, v) = g.directed_edge(rng.gen_range(0..m));
        game.query(u, v).unwrap();
    }
    game
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
