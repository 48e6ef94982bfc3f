//! Greedy group formation (GRD-LM-*, GRD-AV-*).
//!
//! Three steps:
//!
//! 1. Bucket users by [`GreedyKey`]: users sharing a personal top-k sequence
//!    (and, under LM, the scores the aggregation looks at) form an
//!    intermediate group whose satisfaction is known without rescoring.
//! 2. Pop the `ℓ - 1` best intermediate groups from a [`SelectionQueue`].
//! 3. Put every remaining user into the `ℓ`-th group and score it exactly
//!    over all items.
//!
//! When fewer than `ℓ` intermediate groups exist, step 2 drains the queue
//! and step 3 has nobody left. The missing groups are then filled by
//! peeling members off the best splittable selected group: a subset of a
//! same-key group keeps the key, so under LM every peeled-off user brings a
//! full copy of that group's score.

mod key;
mod prepared;
mod queue;

use std::hash::{BuildHasher, Hasher, RandomState};

use hashbrown::HashTable;

pub use key::{greedy_key, GreedyKey};
pub use prepared::PreparedRatings;
pub use queue::SelectionQueue;

use crate::config::AlgorithmConfig;
use crate::error::{Error, Result};
use crate::matrix::RatingMatrix;
use crate::outcome::{instance_fingerprint, GroupResult, GroupingOutcome};
use crate::scoring::{group_satisfaction, rank_order, Semantics, TopKList};

/// Users bucketed under one key.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediateGroup {
    pub key: GreedyKey,
    /// Ascending user ids.
    pub members: Vec<usize>,
    /// Value the group enters the selection queue with; equals the group's
    /// satisfaction with its own list.
    pub priority: f64,
    /// Under AV, per-position sums of the members' sequence scores.
    position_sums: Vec<f64>,
}

/// Result of the bucketing step.
#[derive(Debug, Clone)]
pub struct IntermediateGroups {
    /// In order of first member.
    pub groups: Vec<IntermediateGroup>,
    /// Positions in `groups`, hashed by key.
    index: HashTable<usize>,
    hasher: RandomState,
}

impl IntermediateGroups {
    pub fn queue(&self) -> SelectionQueue<'_> {
        SelectionQueue::new(&self.groups)
    }

    pub fn get(&self, key: &GreedyKey) -> Option<&IntermediateGroup> {
        let hash = self.hasher.hash_one(key);
        self.index.find(hash, |&g| self.groups[g].key == *key).map(|&g| &self.groups[g])
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Buckets all users of a prepared instance by their greedy key.
pub fn build_intermediate_groups_prepared(
    prepared: &PreparedRatings<'_>,
    config: &AlgorithmConfig,
) -> Result<IntermediateGroups> {
    config.validate()?;
    let matrix = prepared.matrix();
    let k = config.k.min(matrix.n_items());
    if prepared.depth() < k {
        return Err(Error::Config(format!("preference lists hold {} items but k = {k}", prepared.depth())));
    }

    let av = config.semantics == Semantics::Av;
    let range = key::signature_range(config.semantics, &config.aggregation, k);
    let hasher = RandomState::new();
    let mut groups: Vec<IntermediateGroup> = Vec::new();
    let mut index: HashTable<usize> = HashTable::with_capacity(matrix.n_users().min(1 << 20));
    for u in 0..matrix.n_users() {
        let items = &prepared.personal_list(u)[..k];
        let scores = &prepared.personal_scores(u)[..k];
        let signature = &scores[range.clone()];
        let hash = {
            let mut h = hasher.build_hasher();
            key::hash_parts(items, signature, &mut h);
            h.finish()
        };
        match index.find(hash, |&g| groups[g].key.matches(items, signature)) {
            Some(&g) => {
                let group = &mut groups[g];
                group.members.push(u);
                if av {
                    group.position_sums.iter_mut().zip(scores).for_each(|(s, r)| *s += r);
                }
            }
            None => {
                let key = GreedyKey::from_personal(items, scores, config.semantics, &config.aggregation);
                // Under LM every member has the same scores, so the first
                // one fixes the priority.
                let (priority, position_sums) =
                    if av { (0.0, scores.to_vec()) } else { (config.aggregation.apply(scores)?, Vec::new()) };
                index.insert_unique(hash, groups.len(), |&g| hasher.hash_one(&groups[g].key));
                groups.push(IntermediateGroup { key, members: vec![u], priority, position_sums });
            }
        }
    }
    if av {
        for group in &mut groups {
            group.priority = config.aggregation.apply(&group.position_sums)?;
        }
    }
    Ok(IntermediateGroups { groups, index, hasher })
}

/// Buckets all users of `matrix` by their greedy key.
pub fn build_intermediate_groups(matrix: &RatingMatrix, config: &AlgorithmConfig) -> Result<IntermediateGroups> {
    config.validate()?;
    let prepared = PreparedRatings::new(matrix, config.k)?;
    build_intermediate_groups_prepared(&prepared, config)
}

/// Greedy group formation on raw ratings; ranks the preference lists first.
pub fn grd_form_groups(matrix: &RatingMatrix, config: &AlgorithmConfig) -> Result<GroupingOutcome> {
    config.validate()?;
    let prepared = PreparedRatings::new(matrix, config.k)?;
    grd_form_groups_prepared(&prepared, config)
}

/// Greedy group formation on ranked preference lists.
pub fn grd_form_groups_prepared(prepared: &PreparedRatings<'_>, config: &AlgorithmConfig) -> Result<GroupingOutcome> {
    config.validate()?;
    let matrix = prepared.matrix();
    let n = matrix.n_users();
    let fingerprint = instance_fingerprint(matrix, config.k, config.semantics, &config.aggregation);

    if config.max_groups == 1 {
        let top_k = prepared.complement_top_k(&[], config.k, config.semantics);
        let satisfaction = group_satisfaction(&top_k, &config.aggregation)?;
        let everyone = GroupResult { members: (0..n).collect(), top_k, satisfaction, priority: None };
        return Ok(GroupingOutcome::new(n, vec![everyone], fingerprint));
    }

    let buckets = build_intermediate_groups_prepared(prepared, config)?;
    let mut queue = buckets.queue();
    let mut selected: Vec<(Vec<usize>, f64)> = Vec::with_capacity(config.max_groups);
    while selected.len() + 1 < config.max_groups {
        match queue.pop() {
            Some((_, group)) => selected.push((group.members.clone(), group.priority)),
            None => break,
        }
    }

    let mut taken: Vec<usize> = selected.iter().flat_map(|(m, _)| m.iter().copied()).collect();
    taken.sort_unstable();

    let mut groups = Vec::with_capacity(config.max_groups);
    for (members, priority) in &selected {
        let mut scored = score_shared_key(prepared, members.clone(), config)?;
        scored.priority = Some(*priority);
        groups.push(scored);
    }

    if taken.len() < n {
        let top_k = prepared.complement_top_k(&taken, config.k, config.semantics);
        let satisfaction = group_satisfaction(&top_k, &config.aggregation)?;
        let members = prepared::complement(n, &taken);
        groups.push(GroupResult { members, top_k, satisfaction, priority: None });
    } else {
        fill_by_splitting(prepared, config, &mut groups)?;
    }

    Ok(GroupingOutcome::new(n, groups, fingerprint))
}

/// Scores a group whose members share one greedy key.
///
/// For every member each shared item outranks every other item (by score,
/// or by id on a tie), so both the minimum and the sum over members keep the
/// shared items on top. The group's list is those items re-ranked, which
/// costs `O(|g| k)` instead of a pass over all items.
fn score_shared_key(prepared: &PreparedRatings<'_>, members: Vec<usize>, config: &AlgorithmConfig) -> Result<GroupResult> {
    let matrix = prepared.matrix();
    let k = config.k.min(matrix.n_items());
    let mut ranked: Vec<(usize, f64)> = prepared.personal_list(members[0])[..k]
        .iter()
        .map(|&i| {
            let i = i as usize;
            let ratings = members.iter().map(|&u| matrix.score(u, i));
            let score = match config.semantics {
                Semantics::Lm => ratings.fold(f64::INFINITY, f64::min),
                Semantics::Av => ratings.sum(),
            };
            (i, score)
        })
        .collect();
    ranked.sort_unstable_by(|a, b| rank_order(a.1, a.0, b.1, b.0));
    let top_k = TopKList::new(ranked.iter().map(|r| r.0).collect(), ranked.iter().map(|r| r.1).collect())?;
    let satisfaction = group_satisfaction(&top_k, &config.aggregation)?;
    Ok(GroupResult { members, top_k, satisfaction, priority: None })
}

/// Splits selected groups until `ℓ` groups exist or all are singletons.
fn fill_by_splitting(
    prepared: &PreparedRatings<'_>,
    config: &AlgorithmConfig,
    groups: &mut Vec<GroupResult>,
) -> Result<()> {
    let matrix = prepared.matrix();
    let k = config.k.min(matrix.n_items());
    while groups.len() < config.max_groups {
        let Some(pos) = groups.iter().position(|g| g.members.len() > 1) else {
            break;
        };
        let user = groups[pos].members.pop().expect("group has two members");
        let rest = std::mem::take(&mut groups[pos].members);
        for (members, slot) in [(rest, Some(pos)), (vec![user], None)] {
            let position_sums: Vec<f64> = {
                let items = &prepared.personal_list(members[0])[..k];
                items
                    .iter()
                    .map(|&i| match config.semantics {
                        Semantics::Lm => matrix.score(members[0], i as usize),
                        Semantics::Av => members.iter().map(|&u| matrix.score(u, i as usize)).sum(),
                    })
                    .collect()
            };
            let priority = config.aggregation.apply(&position_sums)?;
            let mut scored = score_shared_key(prepared, members, config)?;
            scored.priority = Some(priority);
            match slot {
                Some(p) => groups[p] = scored,
                None => groups.push(scored),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::matrix::RatingScale;
    use crate::scoring::Aggregation;

    fn cfg(semantics: Semantics, aggregation: Aggregation, k: usize, groups: usize) -> AlgorithmConfig {
        AlgorithmConfig::new(semantics, aggregation, k, groups)
    }

    fn members(out: &GroupingOutcome) -> Vec<Vec<usize>> {
        out.groups().iter().map(|g| g.members.clone()).collect()
    }

    #[test]
    fn ex1_k1_buckets() {
        let b = build_intermediate_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 1, 3)).unwrap();
        let got: Vec<(Vec<usize>, f64)> = b.groups.iter().map(|g| (g.members.clone(), g.priority)).collect();
        assert_eq!(got, vec![(vec![0], 4.0), (vec![1, 5], 5.0), (vec![2, 3], 5.0), (vec![4], 3.0)]);
        let key = greedy_key(&fixtures::ex1(), 2, 1, Semantics::Lm, &Aggregation::Min).unwrap();
        assert_eq!(b.get(&key).unwrap().members, vec![2, 3]);
    }

    #[test]
    fn ex1_k2_buckets() {
        let b = build_intermediate_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 2, 3)).unwrap();
        let sizes: Vec<usize> = b.groups.iter().map(|g| g.members.len()).collect();
        assert_eq!(b.len(), 5);
        assert_eq!(sizes, vec![1, 1, 2, 1, 1]);
        assert_eq!(b.groups[2].members, vec![2, 3]);
    }

    #[test]
    fn ex2_av_buckets() {
        let b = build_intermediate_groups(&fixtures::ex2(), &cfg(Semantics::Av, Aggregation::Min, 2, 2)).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.groups[2].members, vec![2, 3]);
        assert_eq!(b.groups[2].priority, 4.0);
        let b = build_intermediate_groups(&fixtures::ex2(), &cfg(Semantics::Av, Aggregation::Sum, 2, 2)).unwrap();
        assert_eq!(b.groups[2].priority, 14.0);
    }

    #[test]
    fn queue_breaks_ties_by_size_then_key() {
        let b = build_intermediate_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 1, 3)).unwrap();
        let mut q = b.queue();
        let order: Vec<Vec<usize>> = std::iter::from_fn(|| q.pop().map(|(_, g)| g.members.clone())).collect();
        assert_eq!(order, vec![vec![2, 3], vec![1, 5], vec![0], vec![4]]);
    }

    #[test]
    fn ex1_lm_k1() {
        let out = grd_form_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 1, 3)).unwrap();
        assert_eq!(members(&out), vec![vec![2, 3], vec![1, 5], vec![0, 4]]);
        assert_eq!(out.objective(), 11.0);
    }

    #[test]
    fn ex1_lm_min_k2() {
        let out = grd_form_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 2, 3)).unwrap();
        assert_eq!(members(&out), vec![vec![0], vec![1], vec![2, 3, 4, 5]]);
        assert_eq!(out.objective(), 7.0);
    }

    #[test]
    fn ex1_lm_sum_k2() {
        let out = grd_form_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Sum, 2, 3)).unwrap();
        assert_eq!(members(&out), vec![vec![1], vec![2, 3], vec![0, 4, 5]]);
        assert_eq!(out.objective(), 17.0);
    }

    #[test]
    fn ex2_av() {
        let out = grd_form_groups(&fixtures::ex2(), &cfg(Semantics::Av, Aggregation::Min, 2, 2)).unwrap();
        assert_eq!(members(&out), vec![vec![2, 3], vec![0, 1, 4, 5]]);
        assert_eq!(out.groups()[1].top_k.items(), &[2, 1]);
        assert_eq!(out.objective(), 13.0);
        let out = grd_form_groups(&fixtures::ex2(), &cfg(Semantics::Av, Aggregation::Sum, 2, 2)).unwrap();
        assert_eq!(out.objective(), 34.0);
    }

    #[test]
    fn ex5_lm_sum() {
        let out = grd_form_groups(&fixtures::ex5(), &cfg(Semantics::Lm, Aggregation::Sum, 2, 3)).unwrap();
        assert_eq!(members(&out), vec![vec![1], vec![2, 3], vec![0, 4, 5]]);
        assert_eq!(out.objective(), 20.0);
    }

    #[test]
    fn single_group_takes_everyone() {
        let out = grd_form_groups(&fixtures::ex1(), &cfg(Semantics::Av, Aggregation::Sum, 2, 1)).unwrap();
        assert_eq!(members(&out), vec![(0..6).collect::<Vec<_>>()]);
        assert_eq!(out.groups()[0].priority, None);
    }

    #[test]
    fn zero_groups_is_a_config_error() {
        let err = grd_form_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 1, 0));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn identical_users_are_split_to_fill_all_groups() {
        // Everyone shares the key <i1:5>; popping the single bucket leaves
        // nobody for the last group.
        let m = RatingMatrix::from_rows(&[[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]], RatingScale::five_star()).unwrap();
        let out = grd_form_groups(&m, &cfg(Semantics::Lm, Aggregation::Min, 1, 3)).unwrap();
        assert_eq!(out.groups().len(), 3);
        assert_eq!(out.objective(), 15.0);
        for g in out.groups() {
            assert_eq!(g.priority, Some(g.satisfaction));
        }
        let two = grd_form_groups(&m, &cfg(Semantics::Lm, Aggregation::Min, 1, 2)).unwrap();
        assert_eq!(two.objective(), 10.0);
        assert_eq!(members(&two), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn more_groups_than_users() {
        let out = grd_form_groups(&fixtures::ex3(), &cfg(Semantics::Av, Aggregation::Min, 1, 5)).unwrap();
        assert_eq!(out.groups().len(), 2);
        assert!(out.partition().len() <= 5);
    }

    #[test]
    fn k_larger_than_m_is_truncated() {
        let out = grd_form_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Sum, 7, 3)).unwrap();
        assert!(out.groups().iter().all(|g| g.top_k.len() == 3));
    }

    #[test]
    fn selected_groups_score_their_priority() {
        for agg in [Aggregation::Min, Aggregation::Max, Aggregation::Sum, "wsum".parse().unwrap()] {
            for s in [Semantics::Lm, Semantics::Av] {
                for k in 1..=3 {
                    let out = grd_form_groups(&fixtures::ex1(), &cfg(s, agg.clone(), k, 3)).unwrap();
                    for g in out.groups() {
                        if let Some(p) = g.priority {
                            assert_eq!(p, g.satisfaction, "{s} {agg} k={k}");
                        }
                    }
                }
            }
        }
    }
}
