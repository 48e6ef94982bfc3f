use crate::error::{Error, Result};
use crate::scoring::{Aggregation, Semantics};

/// Parameters shared by every group-formation algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmConfig {
    pub semantics: Semantics,
    pub aggregation: Aggregation,
    /// Length of each group's recommended list.
    pub k: usize,
    /// Upper bound ℓ on the number of groups.
    pub max_groups: usize,
    /// Only the clustering baseline is randomized.
    pub seed: u64,
}

impl AlgorithmConfig {
    pub fn new(semantics: Semantics, aggregation: Aggregation, k: usize, max_groups: usize) -> Self {
        Self { semantics, aggregation, k, max_groups, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.max_groups == 0 {
            return Err(Error::Config("the number of groups must be at least 1".into()));
        }
        self.aggregation.validate(self.k)
    }
}
