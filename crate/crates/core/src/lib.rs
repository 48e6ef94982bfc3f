//! Recommendation-aware user group formation.
//!
//! Users are split into at most `ℓ` groups; every group receives the `k`
//! items it scores highest under least-misery (LM, the lowest member
//! rating) or aggregate-voting (AV, the sum of member ratings) semantics,
//! and its satisfaction is the top, k-th, summed or position-weighted score
//! of that list. The objective is the total satisfaction over groups.
//!
//! ```
//! use groupforge::{fixtures, grd_form_groups, AlgorithmConfig, Aggregation, Semantics};
//!
//! let ratings = fixtures::ex1();
//! let config = AlgorithmConfig::new(Semantics::Lm, Aggregation::Min, 1, 3);
//! let outcome = grd_form_groups(&ratings, &config).unwrap();
//! assert_eq!(outcome.objective(), 11.0);
//! ```

pub mod analysis;
pub mod baseline;
mod config;
mod error;
pub mod exact;
pub mod fixtures;
pub mod greedy;
pub mod io;
mod matrix;
mod outcome;
mod partition;
mod scoring;

pub use analysis::{
    absolute_error, average_group_satisfaction, check_modularity_violation, group_size_summary, ModularityReport,
    SizeSummary,
};
pub use baseline::{baseline_form_groups, cluster_users, kendall_tau_distance, DistanceMatrix};
pub use config::AlgorithmConfig;
pub use error::{Error, Result};
pub use exact::{exact_optimum, export_ip_model, ExactOptions, IpModel};
pub use greedy::{grd_form_groups, greedy_key, GreedyKey, PreparedRatings};
pub use matrix::{RatingMatrix, RatingScale};
pub use outcome::{instance_fingerprint, partition_objective, GroupResult, GroupingOutcome};
pub use partition::{apply_move, Move, MoveTarget, Partition};
pub use scoring::{
    group_satisfaction, group_top_k, item_group_score, rank_order, Aggregation, PositionWeights, Semantics, TopKList,
};
