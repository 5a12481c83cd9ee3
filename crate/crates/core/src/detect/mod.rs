//! Player-side algorithms.
//!
//! * [`amplify`] repeats every directed-edge query and keeps the majority,
//!   producing an [`AccusationGraph`].
//! * [`robust_majority_partition`] searches for two disjoint equal halves
//!   with few accusations between them.
//! * [`neighbor_majority`] labels each vertex by the verdicts of its neighbors.
//! * [`exact_bayes_posterior`] and [`max_consistency_labeling`] are
//!   brute-force oracles for small instances.

mod accusation;
mod majority;
mod partition;
mod posterior;

pub use accusation::{amplify, choose_repeats, hoeffding_bound, robust_target_error, AccusationGraph, AmplifyPlan};
pub use majority::neighbor_majority;
pub use partition::{
    count_cross_accusations, robust_majority_partition, verify_ground_truth_split, PartitionCandidate, SearchMode,
    GroundTruthSplit, EXHAUSTIVE_PARTITION_MAX_N,
};
pub use posterior::{
    exact_bayes_posterior, max_consistency_labeling, violations, CoinView, Posterior, SupportEntry, DECISION_WORK_CAP,
    ENUMERATION_CAP,
};
