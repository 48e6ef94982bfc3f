use crate::config::AlgorithmConfig;
use crate::error::{Error, Result};
use crate::matrix::RatingMatrix;
use crate::outcome::{partition_objective, GroupingOutcome};
use crate::partition::Partition;
use crate::scoring::{Aggregation, Semantics};

use super::enumerate::PartitionIterator;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExactOptions {
    /// Maximum number of complete partitions to score.
    pub node_limit: Option<u64>,
    /// Depth-first search with a bound on unfinished groupings. Only used
    /// under LM, where adding a member never raises a group's satisfaction.
    /// The optimum and its tie-break are the same as without pruning.
    pub prune: bool,
}

/// Best grouping by exhaustive enumeration. Among equally good groupings
/// the first one in restricted-growth order wins.
pub fn exact_optimum(matrix: &RatingMatrix, config: &AlgorithmConfig, options: ExactOptions) -> Result<GroupingOutcome> {
    config.validate()?;
    let mut scorer = BlockScorer::new(matrix, config);
    let best = if options.prune && config.semantics == Semantics::Lm {
        search_pruned(&mut scorer, options.node_limit)
    } else {
        search_all(&mut scorer, options.node_limit)
    };
    match best {
        Ok(labels) => finish(matrix, config, &labels),
        Err(Exhausted { best, limit }) => Err(Error::BudgetExceeded {
            limit,
            best: best.map(|labels| finish(matrix, config, &labels)).transpose()?.map(Box::new),
        }),
    }
}

fn finish(matrix: &RatingMatrix, config: &AlgorithmConfig, labels: &[usize]) -> Result<GroupingOutcome> {
    let partition = Partition::from_assignment(labels)?;
    partition_objective(matrix, &partition, config.k, config.semantics, &config.aggregation)
}

struct Exhausted {
    best: Option<Vec<usize>>,
    limit: u64,
}

/// Scores groups from per-block item accumulators.
struct BlockScorer<'a> {
    matrix: &'a RatingMatrix,
    semantics: Semantics,
    aggregation: &'a Aggregation,
    k: usize,
    max_groups: usize,
    acc: Vec<f64>,
    buf: Vec<f64>,
}

impl<'a> BlockScorer<'a> {
    fn new(matrix: &'a RatingMatrix, config: &'a AlgorithmConfig) -> Self {
        let m = matrix.n_items();
        Self {
            matrix,
            semantics: config.semantics,
            aggregation: &config.aggregation,
            k: config.k.min(m),
            max_groups: config.max_groups,
            acc: vec![0.0; config.max_groups * m],
            buf: Vec::with_capacity(m),
        }
    }

    fn identity(&self) -> f64 {
        match self.semantics {
            Semantics::Lm => f64::INFINITY,
            Semantics::Av => 0.0,
        }
    }

    fn reset(&mut self, blocks: usize) {
        let id = self.identity();
        let m = self.matrix.n_items();
        self.acc[..blocks * m].fill(id);
    }

    fn add(&mut self, block: usize, user: usize) {
        let m = self.matrix.n_items();
        let acc = &mut self.acc[block * m..(block + 1) * m];
        let row = self.matrix.row(user);
        match self.semantics {
            Semantics::Lm => acc.iter_mut().zip(row).for_each(|(a, &r)| *a = a.min(r)),
            Semantics::Av => acc.iter_mut().zip(row).for_each(|(a, &r)| *a += r),
        }
    }

    fn satisfaction(&mut self, block: usize) -> f64 {
        let m = self.matrix.n_items();
        self.buf.clear();
        self.buf.extend_from_slice(&self.acc[block * m..(block + 1) * m]);
        self.buf.sort_unstable_by(|a, b| b.total_cmp(a));
        self.aggregation.apply(&self.buf[..self.k]).expect("aggregation validated")
    }

    fn objective(&mut self, labels: &[usize]) -> f64 {
        let blocks = labels.iter().max().map_or(0, |b| b + 1);
        self.reset(blocks);
        for (u, &b) in labels.iter().enumerate() {
            self.add(b, u);
        }
        (0..blocks).map(|b| self.satisfaction(b)).sum()
    }

    /// Upper bound on one group's satisfaction.
    fn group_bound(&self) -> f64 {
        let r_max = self.matrix.scale().r_max();
        match self.aggregation {
            Aggregation::Max | Aggregation::Min => r_max,
            Aggregation::Sum => self.k as f64 * r_max,
            Aggregation::WeightedSum(w) => (0..self.k).map(|j| w.weight(j).unwrap_or(0.0)).sum::<f64>() * r_max,
        }
    }
}

fn search_all(scorer: &mut BlockScorer<'_>, node_limit: Option<u64>) -> Result<Vec<usize>, Exhausted> {
    let n = scorer.matrix.n_users();
    let mut iter = PartitionIterator::new(n, scorer.max_groups);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluated = 0u64;
    while iter.advance() {
        if let Some(limit) = node_limit {
            if evaluated >= limit {
                return Err(Exhausted { best: best.map(|b| b.1), limit });
            }
        }
        evaluated += 1;
        let obj = scorer.objective(iter.labels());
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, iter.labels().to_vec()));
        }
    }
    Ok(best.expect("at least one partition").1)
}

struct Dfs<'s, 'a> {
    scorer: &'s mut BlockScorer<'a>,
    labels: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    evaluated: u64,
    node_limit: Option<u64>,
    group_bound: f64,
}

impl Dfs<'_, '_> {
    /// Partial LM accumulators for the first `assigned` users, rebuilt from scratch.
    fn partial_bound(&mut self, assigned: usize, blocks: usize) -> f64 {
        self.scorer.reset(blocks);
        for u in 0..assigned {
            self.scorer.add(self.labels[u], u);
        }
        let current: f64 = (0..blocks).map(|b| self.scorer.satisfaction(b)).sum();
        let remaining = self.labels.len() - assigned;
        let fresh = (self.scorer.max_groups - blocks).min(remaining);
        current + fresh as f64 * self.group_bound
    }

    fn visit(&mut self, next: usize, blocks: usize) -> Result<(), u64> {
        let n = self.labels.len();
        if next == n {
            if let Some(limit) = self.node_limit {
                if self.evaluated >= limit {
                    return Err(limit);
                }
            }
            self.evaluated += 1;
            let obj = self.scorer.objective(&self.labels);
            if self.best.as_ref().is_none_or(|(b, _)| obj > *b) {
                self.best = Some((obj, self.labels.clone()));
            }
            return Ok(());
        }
        if let Some((best, _)) = self.best {
            if self.partial_bound(next, blocks) <= best {
                return Ok(());
            }
        }
        let options = if next == 0 { 1 } else { (blocks + 1).min(self.scorer.max_groups) };
        for b in 0..options {
            self.labels[next] = b;
            self.visit(next + 1, blocks.max(b + 1))?;
        }
        Ok(())
    }
}

fn search_pruned(scorer: &mut BlockScorer<'_>, node_limit: Option<u64>) -> Result<Vec<usize>, Exhausted> {
    let n = scorer.matrix.n_users();
    let group_bound = scorer.group_bound();
    let mut dfs = Dfs { scorer, labels: vec![0; n], best: None, evaluated: 0, node_limit, group_bound };
    match dfs.visit(0, 0) {
        Ok(()) => Ok(dfs.best.expect("at least one partition").1),
        Err(limit) => Err(Exhausted { best: dfs.best.map(|b| b.1), limit }),
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cfg(semantics: Semantics, aggregation: Aggregation, k: usize, groups: usize) -> AlgorithmConfig {
        AlgorithmConfig::new(semantics, aggregation, k, groups)
    }

    #[test]
    fn ex1_lm_k1_optimum() {
        let out = exact_optimum(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 1, 3), ExactOptions::default())
            .unwrap();
        assert_eq!(out.objective(), 12.0);
        let blocks: Vec<Vec<usize>> = out.groups().iter().map(|g| g.members.clone()).collect();
        assert_eq!(blocks, vec![vec![0, 2, 3], vec![1, 5], vec![4]]);
    }

    #[test]
    fn ex2_av_min_optimum() {
        // {u1,u3,u4},{u2,u5,u6} scores 14 but is not optimal: several
        // groupings reach 16, the first in enumeration order being
        // {u1,u2,u3,u5},{u4,u6} with item sums (7,12,11) and (5,7,2).
        let out = exact_optimum(&fixtures::ex2(), &cfg(Semantics::Av, Aggregation::Min, 2, 2), ExactOptions::default())
            .unwrap();
        assert_eq!(out.objective(), 16.0);
        let blocks: Vec<Vec<usize>> = out.groups().iter().map(|g| g.members.clone()).collect();
        assert_eq!(blocks, vec![vec![0, 1, 2, 4], vec![3, 5]]);
    }

    #[test]
    fn ex5_lm_sum_optimum() {
        let out = exact_optimum(&fixtures::ex5(), &cfg(Semantics::Lm, Aggregation::Sum, 2, 3), ExactOptions::default())
            .unwrap();
        assert_eq!(out.objective(), 21.0);
    }

    #[test]
    fn pruning_keeps_the_same_answer() {
        for (m, k, l) in [(fixtures::ex1(), 1, 3), (fixtures::ex1(), 2, 3), (fixtures::ex5(), 2, 3), (fixtures::ex2(), 2, 2)]
        {
            for agg in [Aggregation::Min, Aggregation::Max, Aggregation::Sum] {
                let c = cfg(Semantics::Lm, agg, k, l);
                let plain = exact_optimum(&m, &c, ExactOptions::default()).unwrap();
                let pruned = exact_optimum(&m, &c, ExactOptions { prune: true, ..Default::default() }).unwrap();
                assert_eq!(plain, pruned);
            }
        }
    }

    #[test]
    fn node_limit_reports_best_so_far() {
        let c = cfg(Semantics::Lm, Aggregation::Min, 1, 3);
        let err = exact_optimum(&fixtures::ex1(), &c, ExactOptions { node_limit: Some(10), prune: false }).unwrap_err();
        match err {
            Error::BudgetExceeded { limit, best } => {
                assert_eq!(limit, 10);
                let best = best.expect("some partitions were scored");
                assert!(best.objective() <= 12.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        // A limit equal to the full count is enough.
        assert!(exact_optimum(&fixtures::ex1(), &c, ExactOptions { node_limit: Some(122), prune: false }).is_ok());
        assert!(exact_optimum(&fixtures::ex1(), &c, ExactOptions { node_limit: Some(121), prune: false }).is_err());
    }
}
