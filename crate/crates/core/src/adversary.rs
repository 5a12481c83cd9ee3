//! Strategies for corrupt askers.
//!
//! Strategies are stateless: an answer depends only on the ground truth, the
//! graph, the query and the per-query random draw.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{truthful_response, Answer, GroundTruth, Label};
use crate::graph::Graph;

/// The two uniform variates drawn from a query's random substream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    /// Uniform in `[0, 1)`; the query is informative when below `1 − 2ε`.
    pub informative: f64,
    /// Fair coin used by the noise branch.
    pub coin: bool,
}

impl Draw {
    pub fn coin_answer(self) -> Answer {
        if self.coin {
            Answer::SaysTruthful
        } else {
            Answer::SaysCorrupt
        }
    }
}

/// Everything a full-information adversary may look at for one query.
#[derive(Debug, Clone, Copy)]
pub struct QueryContext<'a> {
    pub graph: &'a Graph,
    pub truth: &'a GroundTruth,
    pub epsilon: f64,
    pub asker: usize,
    pub subject: usize,
    pub round: u32,
}

/// The labeling a framing coalition pretends is true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FakeLabeling {
    /// An explicit truthful set.
    Truthful(Vec<usize>),
    /// The complement of the real truthful set.
    Complement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AdversaryStrategy {
    /// Mirror image of a truthful vertex: lies with probability `1 − 2ε`,
    /// fair coin with probability `2ε`, so each answer is wrong w.p. `1 − ε`.
    SymmetricNoise,
    /// Always reports the negation of the subject's true label.
    AlwaysLie,
    /// Answers as a noiseless truthful vertex would if `fake` were the truth.
    FramePartition { fake: FakeLabeling },
}

impl AdversaryStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            AdversaryStrategy::SymmetricNoise => "symmetric-noise",
            AdversaryStrategy::AlwaysLie => "always-lie",
            AdversaryStrategy::FramePartition { .. } => "frame-partition",
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if let AdversaryStrategy::FramePartition { fake: FakeLabeling::Truthful(set) } = self {
            if let Some(&v) = set.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange(v));
            }
        }
        Ok(())
    }

    /// Answer and coin tag for a query whose asker is corrupt.
    pub fn respond(&self, ctx: &QueryContext<'_>, draw: Draw) -> Result<(Answer, bool)> {
        if ctx.truth.label(ctx.asker).is_truthful() {
            return Err(Error::param(format!("adversary asked to answer for truthful vertex {}", ctx.asker)));
        }
        let subject = ctx.truth.label(ctx.subject);
        Ok(match self {
            AdversaryStrategy::SymmetricNoise => {
                let (answer, coin) = truthful_response(ctx.epsilon, subject, draw);
                if coin {
                    (answer, true)
                } else {
                    (answer.negate(), false)
                }
            }
            AdversaryStrategy::AlwaysLie => (Answer::about(subject).negate(), false),
            AdversaryStrategy::FramePartition { fake } => {
                let label = match fake {
                    FakeLabeling::Truthful(set) => {
                        if set.contains(&ctx.subject) {
                            Label::Truthful
                        } else {
                            Label::Corrupt
                        }
                    }
                    FakeLabeling::Complement => subject.flip(),
                };
                (Answer::about(label), false)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Game, GameConfig, Labeling};
    use crate::graph::{gen_named, NamedGraph};
    use std::sync::Arc;

    fn game(labels: &[Label], eps: f64, adv: AdversaryStrategy, seed: u64) -> Game {
        let g = Arc::new(gen_named(NamedGraph::Complete, labels.len()).unwrap());
        Game::with_truth(
            GameConfig::new(g, 0, eps, adv, seed),
            GroundTruth::from_labels(Labeling(labels.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn always_lie_negates() {
        use Label::*;
        let mut g = game(&[Corrupt, Truthful, Corrupt], 0.3, AdversaryStrategy::AlwaysLie, 1);
        for _ in 0..20 {
            assert_eq!(g.query(0, 1).unwrap(), Answer::SaysCorrupt);
            assert_eq!(g.query(0, 2).unwrap(), Answer::SaysTruthful);
        }
        assert!(g.records().iter().all(|r| !r.coin));
    }

    #[test]
    fn symmetric_noise_rates() {
        use Label::*;
        let mut g = game(&[Corrupt, Truthful, Truthful], 0.2, AdversaryStrategy::SymmetricNoise, 2);
        let reps = 100_000;
        let mut wrong = 0;
        for _ in 0..reps {
            wrong += (g.query(0, 1).unwrap() == Answer::SaysCorrupt) as usize;
        }
        let coins = g.records().iter().filter(|r| r.coin).count();
        let wrong = wrong as f64 / reps as f64;
        let coins = coins as f64 / reps as f64;
        assert!((wrong - 0.8).abs() < 0.01, "{wrong}");
        assert!((coins - 0.4).abs() < 0.01, "{coins}");
    }

    #[test]
    fn framing_the_truth_is_noiseless_truthful() {
        use Label::*;
        let labels = [Corrupt, Truthful, Corrupt, Truthful];
        let frame = AdversaryStrategy::FramePartition { fake: FakeLabeling::Truthful(vec![1, 3]) };
        let mut g = game(&labels, 0.25, frame, 4);
        for (s, &label) in labels.iter().enumerate().skip(1) {
            for _ in 0..10 {
                assert_eq!(g.query(0, s).unwrap(), Answer::about(label));
            }
        }
        let mut c = game(&labels, 0.25, AdversaryStrategy::FramePartition { fake: FakeLabeling::Complement }, 4);
        assert_eq!(c.query(0, 1).unwrap(), Answer::SaysCorrupt);
        assert_eq!(c.query(2, 0).unwrap(), Answer::SaysTruthful);
    }

    #[test]
    fn deterministic_strategies_repeat() {
        use Label::*;
        let labels = [Corrupt, Truthful, Corrupt];
        let truth = GroundTruth::from_labels(Labeling(labels.to_vec()));
        let g = gen_named(NamedGraph::Complete, 3).unwrap();
        let ctx = QueryContext { graph: &g, truth: &truth, epsilon: 0.3, asker: 0, subject: 2, round: 0 };
        for adv in [AdversaryStrategy::AlwaysLie, AdversaryStrategy::FramePartition { fake: FakeLabeling::Complement }] {
            let a = adv.respond(&ctx, Draw { informative: 0.1, coin: true }).unwrap();
            let b = adv.respond(&ctx, Draw { informative: 0.9, coin: false }).unwrap();
            assert_eq!(a, b);
        }
        let bad = QueryContext { asker: 1, ..ctx };
        assert!(AdversaryStrategy::AlwaysLie.respond(&bad, Draw { informative: 0.0, coin: false }).is_err());
    }

    #[test]
    fn out_of_range_frame_is_invalid() {
        let adv = AdversaryStrategy::FramePartition { fake: FakeLabeling::Truthful(vec![9]) };
        assert!(adv.validate(5).is_err());
    }
}
