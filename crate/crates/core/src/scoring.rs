//! Group item scores, top-k lists and list-level satisfaction.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RatingMatrix;

/// How the members' ratings of one item combine into a group score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// Least misery: the lowest member rating.
    Lm,
    /// Aggregate voting: the sum of member ratings.
    Av,
}

impl Semantics {
    pub fn as_str(&self) -> &'static str {
        match self {
            Semantics::Lm => "lm",
            Semantics::Av => "av",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lm" | "least-misery" => Ok(Semantics::Lm),
            "av" | "aggregate-voting" => Ok(Semantics::Av),
            other => Err(Error::Config(format!("unknown semantics {other:?}"))),
        }
    }
}

/// Position weights for weighted-sum aggregation.
#[derive(Debug, Clone, PartialEq)]
pub enum PositionWeights {
    /// `w_j = 1 / j`
    Reciprocal,
    /// `w_j = 1 / log2(j + 1)`
    Logarithmic,
    /// Caller supplied, strictly positive and non-increasing.
    Explicit(Vec<f64>),
}

impl PositionWeights {
    pub fn explicit(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("weight list is empty".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Config("weights must be finite and strictly positive".into()));
        }
        if weights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Config("weights must be non-increasing".into()));
        }
        Ok(PositionWeights::Explicit(weights))
    }

    /// Weight of the 0-based position `pos`.
    pub fn weight(&self, pos: usize) -> Result<f64> {
        let j = (pos + 1) as f64;
        match self {
            PositionWeights::Reciprocal => Ok(1.0 / j),
            PositionWeights::Logarithmic => Ok(1.0 / (j + 1.0).log2()),
            PositionWeights::Explicit(w) => w.get(pos).copied().ok_or_else(|| {
                Error::Config(format!("{} weights given but the list has at least {} positions", w.len(), pos + 1))
            }),
        }
    }
}

/// Condenses a group's top-k list into a single satisfaction value.
#[derive(Debug, Clone, PartialEq)]
pub enum Aggregation {
    /// Score of the top item.
    Max,
    /// Score of the k-th (bottom) item.
    Min,
    /// Sum over the list.
    Sum,
    /// Position-weighted sum over the list.
    WeightedSum(PositionWeights),
}

impl Aggregation {
    pub fn name(&self) -> &'static str {
        match self {
            Aggregation::Max => "max",
            Aggregation::Min => "min",
            Aggregation::Sum => "sum",
            Aggregation::WeightedSum(PositionWeights::Logarithmic) => "wsum-log",
            Aggregation::WeightedSum(PositionWeights::Explicit(_)) => "wsum-explicit",
            Aggregation::WeightedSum(PositionWeights::Reciprocal) => "wsum",
        }
    }

    /// Checks that the aggregation can score lists of length `k`.
    pub fn validate(&self, k: usize) -> Result<()> {
        if let Aggregation::WeightedSum(PositionWeights::Explicit(w)) = self {
            if w.len() != k {
                return Err(Error::Config(format!("{} weights given for k = {k}", w.len())));
            }
        }
        Ok(())
    }

    /// Aggregates an already sorted (non-increasing) score list.
    pub(crate) fn apply(&self, scores: &[f64]) -> Result<f64> {
        let (first, last) = match (scores.first(), scores.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(Error::InvalidGroup("cannot aggregate an empty list".into())),
        };
        match self {
            Aggregation::Max => Ok(first),
            Aggregation::Min => Ok(last),
            Aggregation::Sum => Ok(scores.iter().sum()),
            Aggregation::WeightedSum(weights) => {
                let mut total = 0.0;
                for (pos, s) in scores.iter().enumerate() {
                    total += weights.weight(pos)? * s;
                }
                Ok(total)
            }
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Aggregation::Max),
            "min" => Ok(Aggregation::Min),
            "sum" => Ok(Aggregation::Sum),
            "wsum" | "wsum-reciprocal" => Ok(Aggregation::WeightedSum(PositionWeights::Reciprocal)),
            "wsum-log" => Ok(Aggregation::WeightedSum(PositionWeights::Logarithmic)),
            other => Err(Error::Config(format!("unknown aggregation {other:?}"))),
        }
    }
}

/// Items recommended to one group, best first, with their group scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKList {
    items: Vec<usize>,
    scores: Vec<f64>,
}

impl TopKList {
    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Picks the `k` best entries of a full score vector indexed by item.
    pub(crate) fn from_item_scores(scores: &[f64], k: usize) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        let k = k.min(scores.len());
        let cmp = |a: &usize, b: &usize| rank_order(scores[*a], *a, scores[*b], *b);
        if k < order.len() {
            order.select_nth_unstable_by(k, cmp);
            order.truncate(k);
        }
        order.sort_unstable_by(cmp);
        let scores = order.iter().map(|&i| scores[i]).collect();
        TopKList { items: order, scores }
    }

    /// A list from explicit items and scores; scores must be non-increasing.
    pub fn new(items: Vec<usize>, scores: Vec<f64>) -> Result<Self> {
        if items.len() != scores.len() || items.is_empty() {
            return Err(Error::Config(format!("{} items with {} scores", items.len(), scores.len())));
        }
        if scores.windows(2).any(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o.is_lt())) {
            return Err(Error::Config("list scores must be non-increasing".into()));
        }
        Ok(TopKList { items, scores })
    }
}

/// Ranking order shared by personal and group lists: higher score first,
/// equal scores by ascending item id.
#[inline]
pub fn rank_order(score_a: f64, item_a: usize, score_b: f64, item_b: usize) -> Ordering {
    score_b.total_cmp(&score_a).then(item_a.cmp(&item_b))
}

fn check_group(matrix: &RatingMatrix, group: &[usize]) -> Result<()> {
    if group.is_empty() {
        return Err(Error::InvalidGroup("group has no members".into()));
    }
    group.iter().try_for_each(|&u| matrix.check_user(u))
}

/// `sc(g, i)`: minimum (LM) or sum (AV) of the members' ratings of `item`.
pub fn item_group_score(matrix: &RatingMatrix, group: &[usize], item: usize, semantics: Semantics) -> Result<f64> {
    check_group(matrix, group)?;
    matrix.check_item(item)?;
    let ratings = group.iter().map(|&u| matrix.score(u, item));
    Ok(match semantics {
        Semantics::Lm => ratings.fold(f64::INFINITY, f64::min),
        Semantics::Av => ratings.sum(),
    })
}

/// Group scores of every item, indexed by item.
pub(crate) fn all_item_scores(matrix: &RatingMatrix, group: &[usize], semantics: Semantics) -> Vec<f64> {
    let m = matrix.n_items();
    let (init, fold): (f64, fn(f64, f64) -> f64) = match semantics {
        Semantics::Lm => (f64::INFINITY, f64::min),
        Semantics::Av => (0.0, |a, b| a + b),
    };
    let mut acc = vec![init; m];
    for &u in group {
        for (a, &r) in acc.iter_mut().zip(matrix.row(u)) {
            *a = fold(*a, r);
        }
    }
    acc
}

/// The group's recommended list: the `min(k, m)` items with the highest
/// group score, ties broken by ascending item id.
pub fn group_top_k(matrix: &RatingMatrix, group: &[usize], k: usize, semantics: Semantics) -> Result<TopKList> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    check_group(matrix, group)?;
    Ok(TopKList::from_item_scores(&all_item_scores(matrix, group, semantics), k))
}

/// Satisfaction `g^s` of a group with its list.
pub fn group_satisfaction(list: &TopKList, aggregation: &Aggregation) -> Result<f64> {
    aggregation.apply(list.scores())
}
