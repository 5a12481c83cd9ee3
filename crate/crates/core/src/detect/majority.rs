use super::AccusationGraph;
use crate::game::{Answer, Label, Labeling};

/// Labels `u` truthful unless strictly more neighbors call it corrupt than
/// call it truthful.
pub fn neighbor_majority(acc: &AccusationGraph) -> Labeling {
    let g = acc.graph();
    let labels = (0..g.n())
        .map(|u| {
            let (mut yes, mut no) = (0usize, 0usize);
            for &v in g.neighbors(u) {
                match acc.verdict(v, u) {
                    Some(Answer::SaysTruthful) => yes += 1,
                    Some(Answer::SaysCorrupt) => no += 1,
                    None => {}
                }
            }
            if yes >= no {
                Label::Truthful
            } else {
                Label::Corrupt
            }
        })
        .collect();
    Labeling(labels)
}
