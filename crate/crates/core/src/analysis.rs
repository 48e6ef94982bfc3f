//! Evaluation metrics and the partition-function modularity checker.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::enumerate_partitions;
use crate::matrix::RatingMatrix;
use crate::outcome::{partition_objective, GroupingOutcome};
use crate::partition::{apply_move, Move, MoveTarget, Partition};
use crate::scoring::{Aggregation, Semantics};

/// Mean over groups of `Σ_j mean_{u ∈ g} sc(u, i^j)`, where `i^j` is the
/// group's j-th recommended item.
pub fn average_group_satisfaction(matrix: &RatingMatrix, outcome: &GroupingOutcome) -> Result<f64> {
    if outcome.n_users() != matrix.n_users() {
        return Err(Error::Config("outcome does not belong to this matrix".into()));
    }
    if outcome.groups().is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for group in outcome.groups() {
        let size = group.members.len() as f64;
        for &item in group.top_k.items() {
            matrix.check_item(item)?;
            total += group.members.iter().map(|&u| matrix.score(u, item)).sum::<f64>() / size;
        }
    }
    Ok(total / outcome.groups().len() as f64)
}

/// Five-point summary of group sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear interpolation at rank `q · (len - 1)` of sorted `values`.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

pub fn size_summary(sizes: &[usize]) -> Result<SizeSummary> {
    if sizes.is_empty() {
        return Err(Error::Degenerate("no groups to summarize".into()));
    }
    let mut sorted: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(SizeSummary {
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

pub fn group_size_summary(outcome: &GroupingOutcome) -> Result<SizeSummary> {
    size_summary(&outcome.sizes())
}

/// `optimal.objective - approx.objective`; both must come from the same
/// instance and configuration.
pub fn absolute_error(approx: &GroupingOutcome, optimal: &GroupingOutcome) -> Result<f64> {
    if approx.fingerprint() != optimal.fingerprint() {
        return Err(Error::Config("outcomes were computed on different instances or configurations".into()));
    }
    Ok(optimal.objective() - approx.objective())
}

/// Objectives before and after one move applied to two partitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularityReport {
    pub obj_p1: f64,
    pub obj_p2: f64,
    pub obj_p1_moved: f64,
    pub obj_p2_moved: f64,
    /// `Obj(P1) - Obj(P1;μ) > Obj(P2) - Obj(P2;μ)`
    pub submodularity_violated: bool,
    /// `Obj(P1;μ) - Obj(P1) > Obj(P2;μ) - Obj(P2)`
    pub supermodularity_violated: bool,
}

impl ModularityReport {
    pub fn quadruple(&self) -> (f64, f64, f64, f64) {
        (self.obj_p1, self.obj_p2, self.obj_p1_moved, self.obj_p2_moved)
    }
}

fn moved(p: &Partition, mv: Move) -> Result<Partition> {
    apply_move(p, mv).map_err(|e| match e {
        Error::NotFound { .. } => Error::InvalidMove(format!("{mv:?} does not apply: {e}")),
        other => other,
    })
}

pub fn check_modularity_violation(
    matrix: &RatingMatrix,
    k: usize,
    p1: &Partition,
    p2: &Partition,
    mv: Move,
    semantics: Semantics,
    aggregation: &Aggregation,
) -> Result<ModularityReport> {
    let obj = |p: &Partition| partition_objective(matrix, p, k, semantics, aggregation).map(|o| o.objective());
    let (p1_moved, p2_moved) = (moved(p1, mv)?, moved(p2, mv)?);
    let (obj_p1, obj_p2) = (obj(p1)?, obj(p2)?);
    let (obj_p1_moved, obj_p2_moved) = (obj(&p1_moved)?, obj(&p2_moved)?);
    Ok(ModularityReport {
        obj_p1,
        obj_p2,
        obj_p1_moved,
        obj_p2_moved,
        submodularity_violated: obj_p1 - obj_p1_moved > obj_p2 - obj_p2_moved,
        supermodularity_violated: obj_p1_moved - obj_p1 > obj_p2_moved - obj_p2,
    })
}

/// One checked `(P1, P2, μ)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularityWitness {
    pub p1: Partition,
    pub p2: Partition,
    pub mv: Move,
    pub report: ModularityReport,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModularitySweep {
    pub checked: usize,
    pub submodularity_violations: usize,
    pub supermodularity_violations: usize,
    pub first_submodularity: Option<ModularityWitness>,
    pub first_supermodularity: Option<ModularityWitness>,
}

/// Largest instance the sweep accepts.
pub const SWEEP_MAX_USERS: usize = 5;

fn refines(fine: &Partition, coarse: &Partition) -> bool {
    fine.blocks().iter().all(|b| {
        let host = coarse.block_of(b[0]);
        b.iter().all(|&u| coarse.block_of(u) == host)
    })
}

/// Checks every pair `P1 ≤ P2` (P1 refines P2) against every single-user
/// move, on instances with at most five users.
pub fn modularity_sweep(
    matrix: &RatingMatrix,
    k: usize,
    semantics: Semantics,
    aggregation: &Aggregation,
) -> Result<ModularitySweep> {
    let n = matrix.n_users();
    if n > SWEEP_MAX_USERS {
        return Err(Error::Config(format!("modularity sweep supports at most {SWEEP_MAX_USERS} users, got {n}")));
    }
    let partitions: Vec<Partition> =
        enumerate_partitions(n, n).map(|a| Partition::from_assignment(&a)).collect::<Result<_>>()?;
    let objectives: Vec<f64> = partitions
        .iter()
        .map(|p| partition_objective(matrix, p, k, semantics, aggregation).map(|o| o.objective()))
        .collect::<Result<_>>()?;
    let lookup = |p: &Partition| {
        let idx = partitions.iter().position(|q| q.same_grouping(p)).expect("enumeration is complete");
        objectives[idx]
    };

    let mut moves = Vec::new();
    for user in 0..n {
        moves.push(Move::detach(user));
        moves.extend((0..n).filter(|&h| h != user).map(|h| Move::join(user, h)));
    }

    let mut sweep = ModularitySweep::default();
    for (i1, p1) in partitions.iter().enumerate() {
        for (i2, p2) in partitions.iter().enumerate() {
            if !refines(p1, p2) {
                continue;
            }
            for &mv in &moves {
                let (m1, m2) = (apply_move(p1, mv)?, apply_move(p2, mv)?);
                let (o1, o2, o1m, o2m) = (objectives[i1], objectives[i2], lookup(&m1), lookup(&m2));
                let report = ModularityReport {
                    obj_p1: o1,
                    obj_p2: o2,
                    obj_p1_moved: o1m,
                    obj_p2_moved: o2m,
                    submodularity_violated: o1 - o1m > o2 - o2m,
                    supermodularity_violated: o1m - o1 > o2m - o2,
                };
                sweep.checked += 1;
                let witness = || ModularityWitness { p1: p1.clone(), p2: p2.clone(), mv, report };
                if report.submodularity_violated {
                    sweep.submodularity_violations += 1;
                    sweep.first_submodularity.get_or_insert_with(witness);
                }
                if report.supermodularity_violated {
                    sweep.supermodularity_violations += 1;
                    sweep.first_supermodularity.get_or_insert_with(witness);
                }
            }
        }
    }
    Ok(sweep)
}

/// The move and partitions used with the `proof1` and `proof2` fixtures.
pub fn fixture_modularity_case(name: &str) -> Option<(Partition, Partition, Move)> {
    match name {
        "proof1" => Some((
            Partition::singletons(3),
            Partition::new(3, vec![vec![0, 2], vec![1]]).ok()?,
            Move { user: 1, target: MoveTarget::BlockOf(0) },
        )),
        "proof2" => Some((
            Partition::singletons(3),
            Partition::new(3, vec![vec![0, 1], vec![2]]).ok()?,
            Move { user: 2, target: MoveTarget::BlockOf(0) },
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AlgorithmConfig;
    use crate::exact::{exact_optimum, ExactOptions};
    use crate::fixtures;
    use crate::greedy::grd_form_groups;

    #[test]
    fn ex2_average_satisfaction() {
        let ex2 = fixtures::ex2();
        let p = Partition::new(6, vec![vec![2, 3], vec![0, 1, 4, 5]]).unwrap();
        let out = partition_objective(&ex2, &p, 2, Semantics::Av, &Aggregation::Min).unwrap();
        assert_eq!(average_group_satisfaction(&ex2, &out).unwrap(), 6.0);
    }

    #[test]
    fn single_user_average_is_list_sum() {
        let ex1 = fixtures::ex1();
        let out = partition_objective(&ex1, &Partition::new(6, vec![(0..6).collect()]).unwrap(), 3, Semantics::Lm, &Aggregation::Sum)
            .unwrap();
        // mean over all six users of every item, summed over all three items
        let expected: f64 = (0..3).map(|i| (0..6).map(|u| ex1.score(u, i)).sum::<f64>() / 6.0).sum();
        assert!((average_group_satisfaction(&ex1, &out).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn size_quantiles() {
        let s = size_summary(&[1, 2, 3, 4, 10]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 2.0, 3.0, 4.0, 10.0));
        let s = size_summary(&[2, 2, 2]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (2.0, 2.0, 2.0, 2.0, 2.0));
        let s = size_summary(&[4, 1]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (1.75, 2.5, 3.25));
        assert!(size_summary(&[]).is_err());
    }

    #[test]
    fn ex1_error_is_one() {
        let ex1 = fixtures::ex1();
        let cfg = AlgorithmConfig::new(Semantics::Lm, Aggregation::Min, 1, 3);
        let grd = grd_form_groups(&ex1, &cfg).unwrap();
        let opt = exact_optimum(&ex1, &cfg, ExactOptions::default()).unwrap();
        assert_eq!(absolute_error(&grd, &opt).unwrap(), 1.0);
        assert_eq!(absolute_error(&opt, &opt).unwrap(), 0.0);
        let other = grd_form_groups(&ex1, &AlgorithmConfig::new(Semantics::Lm, Aggregation::Min, 2, 3)).unwrap();
        assert!(absolute_error(&other, &opt).is_err());
    }

    #[test]
    fn proof_fixtures() {
        let (p1, p2, mv) = fixture_modularity_case("proof1").unwrap();
        let r = check_modularity_violation(&fixtures::proof1(), 1, &p1, &p2, mv, Semantics::Av, &Aggregation::Min).unwrap();
        assert_eq!(r.quadruple(), (12.0, 10.0, 11.0, 10.0));
        assert!(r.submodularity_violated);

        let (p1, p2, mv) = fixture_modularity_case("proof2").unwrap();
        let r = check_modularity_violation(&fixtures::proof2(), 1, &p1, &p2, mv, Semantics::Av, &Aggregation::Min).unwrap();
        assert_eq!(r.quadruple(), (13.0, 13.0, 12.0, 11.0));
        assert!(r.supermodularity_violated);
    }

    #[test]
    fn no_op_move_violates_nothing() {
        let p = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let r = check_modularity_violation(&fixtures::proof1(), 1, &p, &p, Move::join(0, 1), Semantics::Av, &Aggregation::Sum)
            .unwrap();
        assert!(!r.submodularity_violated && !r.supermodularity_violated);
    }

    #[test]
    fn unknown_user_is_an_invalid_move() {
        let p = Partition::singletons(3);
        let err = check_modularity_violation(&fixtures::proof1(), 1, &p, &p, Move::join(7, 0), Semantics::Av, &Aggregation::Min)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidMove(_)));
    }

    #[test]
    fn sweep_finds_both_violations() {
        let s1 = modularity_sweep(&fixtures::proof1(), 1, Semantics::Av, &Aggregation::Min).unwrap();
        assert!(s1.submodularity_violations > 0);
        let s2 = modularity_sweep(&fixtures::proof2(), 1, Semantics::Av, &Aggregation::Min).unwrap();
        assert!(s2.supermodularity_violations > 0);
        assert!(modularity_sweep(&fixtures::ex1(), 1, Semantics::Av, &Aggregation::Min).is_err());
    }
}
