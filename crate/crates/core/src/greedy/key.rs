use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::ops::Range;

use crate::error::Result;
use crate::matrix::RatingMatrix;
use crate::scoring::{Aggregation, Semantics, TopKList};

/// Bucketing key of one user: the personal top-k item sequence plus the
/// scores the active semantics and aggregation need to match on.
///
/// | semantics | aggregation   | signature                         |
/// |-----------|---------------|-----------------------------------|
/// | LM        | Min           | `[sc(u, i^k)]`                    |
/// | LM        | Max           | `[sc(u, i^1)]`                    |
/// | LM        | Sum, weighted | `[sc(u, i^1), ..., sc(u, i^k)]`   |
/// | AV        | any           | `[]`                              |
#[derive(Debug, Clone)]
pub struct GreedyKey {
    sequence: Vec<u32>,
    signature: Vec<f64>,
}

impl GreedyKey {
    /// Builds the key from a user's personal list (items best first).
    pub(crate) fn from_personal(items: &[u32], scores: &[f64], semantics: Semantics, aggregation: &Aggregation) -> Self {
        let range = signature_range(semantics, aggregation, scores.len());
        Self { sequence: items.to_vec(), signature: scores[range].to_vec() }
    }

    /// Whether this is the key of `items` with signature `signature`.
    pub(crate) fn matches(&self, items: &[u32], signature: &[f64]) -> bool {
        self.sequence == items
            && self.signature.len() == signature.len()
            && self.signature.iter().zip(signature).all(|(a, b)| canonical_bits(*a) == canonical_bits(*b))
    }

    pub fn sequence(&self) -> impl Iterator<Item = usize> + '_ {
        self.sequence.iter().map(|&i| i as usize)
    }

    pub fn signature(&self) -> &[f64] {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

// Scores compare by bit pattern (with -0.0 folded into 0.0), which keeps
// Eq, Hash and Ord mutually consistent.
fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

/// Positions of a personal list's scores that go into the signature.
pub(crate) fn signature_range(semantics: Semantics, aggregation: &Aggregation, k: usize) -> Range<usize> {
    match (semantics, aggregation) {
        (Semantics::Av, _) => 0..0,
        (Semantics::Lm, Aggregation::Min) => k.saturating_sub(1)..k,
        (Semantics::Lm, Aggregation::Max) => 0..k.min(1),
        (Semantics::Lm, Aggregation::Sum | Aggregation::WeightedSum(_)) => 0..k,
    }
}

/// Hashes a key given by its parts; agrees with `Hash for GreedyKey`.
pub(crate) fn hash_parts<H: Hasher>(items: &[u32], signature: &[f64], state: &mut H) {
    items.hash(state);
    signature.len().hash(state);
    for s in signature {
        canonical_bits(*s).hash(state);
    }
}

impl PartialEq for GreedyKey {
    fn eq(&self, other: &Self) -> bool {
        self.matches(&other.sequence, &other.signature)
    }
}

impl Eq for GreedyKey {}

impl Hash for GreedyKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        hash_parts(&self.sequence, &self.signature, state);
    }
}

/// Lexicographic on the item sequence first, then on the signature.
impl Ord for GreedyKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sequence.cmp(&other.sequence).then_with(|| {
            for (a, b) in self.signature.iter().zip(&other.signature) {
                let o = if a == b { Ordering::Equal } else { a.total_cmp(b) };
                if o != Ordering::Equal {
                    return o;
                }
            }
            self.signature.len().cmp(&other.signature.len())
        })
    }
}

impl PartialOrd for GreedyKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The key `user` is bucketed under for lists of length `k`.
pub fn greedy_key(
    matrix: &RatingMatrix,
    user: usize,
    k: usize,
    semantics: Semantics,
    aggregation: &Aggregation,
) -> Result<GreedyKey> {
    matrix.check_user(user)?;
    crate::outcome::validate_k(k)?;
    let personal = TopKList::from_item_scores(matrix.row(user), k);
    let items: Vec<u32> = personal.items().iter().map(|&i| i as u32).collect();
    Ok(GreedyKey::from_personal(&items, personal.scores(), semantics, aggregation))
}
