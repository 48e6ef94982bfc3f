use crate::error::{Error, Result};
use crate::matrix::RatingMatrix;
use crate::partition::Partition;
use crate::scoring::{group_satisfaction, group_top_k, Aggregation, PositionWeights, Semantics, TopKList};

/// One formed group with its recommended list.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupResult {
    pub members: Vec<usize>,
    pub top_k: TopKList,
    pub satisfaction: f64,
    /// Selection-queue priority for groups emitted by the greedy selection
    /// step; `None` for everything else.
    pub priority: Option<f64>,
}

/// A grouping together with every group's list and the total objective.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupingOutcome {
    n_users: usize,
    groups: Vec<GroupResult>,
    objective: f64,
    fingerprint: u64,
}

impl GroupingOutcome {
    pub(crate) fn new(n_users: usize, groups: Vec<GroupResult>, fingerprint: u64) -> Self {
        let objective = groups.iter().map(|g| g.satisfaction).sum();
        Self { n_users, groups, objective, fingerprint }
    }

    pub fn groups(&self) -> &[GroupResult] {
        &self.groups
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    /// Identity of the (instance, k, semantics, aggregation) this was scored on.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn partition(&self) -> Partition {
        Partition::new(self.n_users, self.groups.iter().map(|g| g.members.clone()).collect())
            .expect("outcome groups form a partition")
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.members.len()).collect()
    }
}

pub fn instance_fingerprint(matrix: &RatingMatrix, k: usize, semantics: Semantics, aggregation: &Aggregation) -> u64 {
    use std::hash::{DefaultHasher, Hash, Hasher};
    let mut h = DefaultHasher::new();
    matrix.content_hash().hash(&mut h);
    k.min(matrix.n_items()).hash(&mut h);
    semantics.hash(&mut h);
    aggregation.name().hash(&mut h);
    if let Aggregation::WeightedSum(PositionWeights::Explicit(w)) = aggregation {
        w.iter().for_each(|x| x.to_bits().hash(&mut h));
    }
    h.finish()
}

pub(crate) fn validate_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::Config("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub(crate) fn score_group(
    matrix: &RatingMatrix,
    members: Vec<usize>,
    k: usize,
    semantics: Semantics,
    aggregation: &Aggregation,
) -> Result<GroupResult> {
    let top_k = group_top_k(matrix, &members, k, semantics)?;
    let satisfaction = group_satisfaction(&top_k, aggregation)?;
    Ok(GroupResult { members, top_k, satisfaction, priority: None })
}

/// Scores every block of `partition`; the objective is the sum of the
/// blocks' satisfactions.
pub fn partition_objective(
    matrix: &RatingMatrix,
    partition: &Partition,
    k: usize,
    semantics: Semantics,
    aggregation: &Aggregation,
) -> Result<GroupingOutcome> {
    validate_k(k)?;
    aggregation.validate(k)?;
    if partition.n_users() != matrix.n_users() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} users but the matrix has {}",
            partition.n_users(),
            matrix.n_users()
        )));
    }
    let groups = partition
        .blocks()
        .iter()
        .map(|b| score_group(matrix, b.clone(), k, semantics, aggregation))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupingOutcome::new(matrix.n_users(), groups, instance_fingerprint(matrix, k, semantics, aggregation)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn part(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn ex1_greedy_grouping_scores_eleven() {
        let p = part(6, &[&[2, 3], &[1, 5], &[0, 4]]);
        let out = partition_objective(&fixtures::ex1(), &p, 1, Semantics::Lm, &Aggregation::Min).unwrap();
        assert_eq!(out.objective(), 11.0);
        let sats: Vec<f64> = out.groups().iter().map(|g| g.satisfaction).collect();
        assert_eq!(sats, vec![5.0, 5.0, 1.0]);
    }

    #[test]
    fn ex2_optimal_grouping_scores_fourteen() {
        let p = part(6, &[&[0, 2, 3], &[1, 4, 5]]);
        let out = partition_objective(&fixtures::ex2(), &p, 2, Semantics::Av, &Aggregation::Min).unwrap();
        assert_eq!(out.objective(), 14.0);
        assert_eq!(out.groups()[1].top_k.items(), &[1, 2]);
    }

    #[test]
    fn proof1_singletons_score_twelve() {
        let out = partition_objective(&fixtures::proof1(), &Partition::singletons(3), 1, Semantics::Av, &Aggregation::Min)
            .unwrap();
        assert_eq!(out.objective(), 12.0);
    }

    #[test]
    fn block_order_does_not_matter() {
        let ex1 = fixtures::ex1();
        let a = part(6, &[&[0, 2, 3], &[1, 5], &[4]]);
        let b = part(6, &[&[4], &[5, 1], &[3, 0, 2]]);
        for agg in [Aggregation::Min, Aggregation::Sum, Aggregation::Max] {
            for s in [Semantics::Lm, Semantics::Av] {
                let oa = partition_objective(&ex1, &a, 2, s, &agg).unwrap();
                let ob = partition_objective(&ex1, &b, 2, s, &agg).unwrap();
                assert_eq!(oa.objective(), ob.objective());
                assert_eq!(oa.fingerprint(), ob.fingerprint());
            }
        }
    }

    #[test]
    fn mismatched_partition_is_rejected() {
        let err = partition_objective(&fixtures::ex1(), &Partition::singletons(4), 1, Semantics::Lm, &Aggregation::Min);
        assert!(matches!(err, Err(Error::InvalidPartition(_))));
    }
}
