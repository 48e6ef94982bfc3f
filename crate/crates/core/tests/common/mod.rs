//! Test-only reference implementations, written from the definitions and
//! sharing no code with the library.

#![allow(dead_code)]

use groupforge::{Aggregation, PositionWeights, RatingMatrix, RatingScale, Semantics};

pub fn rows_of(matrix: &RatingMatrix) -> Vec<Vec<f64>> {
    (0..matrix.n_users()).map(|u| matrix.row(u).to_vec()).collect()
}

pub fn matrix(rows: &[Vec<f64>]) -> RatingMatrix {
    RatingMatrix::from_rows(rows, RatingScale::five_star()).unwrap()
}

/// Group score of every item.
pub fn item_scores(rows: &[Vec<f64>], members: &[usize], semantics: Semantics) -> Vec<f64> {
    let m = rows[0].len();
    (0..m)
        .map(|i| {
            let column = members.iter().map(|&u| rows[u][i]);
            match semantics {
                Semantics::Lm => column.fold(f64::INFINITY, f64::min),
                Semantics::Av => column.sum(),
            }
        })
        .collect()
}

/// Items sorted by score descending then id ascending, truncated to k.
pub fn top_k(scores: &[f64], k: usize) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    // insertion sort, to stay independent of the library's comparator
    for a in 1..all.len() {
        let mut b = a;
        while b > 0 && (all[b].1 > all[b - 1].1 || (all[b].1 == all[b - 1].1 && all[b].0 < all[b - 1].0)) {
            all.swap(b, b - 1);
            b -= 1;
        }
    }
    all.truncate(k.min(scores.len()));
    all
}

pub fn satisfaction(list: &[(usize, f64)], aggregation: &Aggregation) -> f64 {
    match aggregation {
        Aggregation::Max => list[0].1,
        Aggregation::Min => list[list.len() - 1].1,
        Aggregation::Sum => list.iter().map(|p| p.1).sum(),
        Aggregation::WeightedSum(PositionWeights::Reciprocal) => {
            list.iter().enumerate().map(|(j, p)| p.1 / (j + 1) as f64).sum()
        }
        Aggregation::WeightedSum(PositionWeights::Logarithmic) => {
            list.iter().enumerate().map(|(j, p)| p.1 / ((j + 2) as f64).log2()).sum()
        }
        Aggregation::WeightedSum(PositionWeights::Explicit(w)) => list.iter().zip(w).map(|(p, w)| p.1 * w).sum(),
    }
}

pub fn objective(rows: &[Vec<f64>], blocks: &[Vec<usize>], k: usize, semantics: Semantics, aggregation: &Aggregation) -> f64 {
    blocks.iter().map(|b| satisfaction(&top_k(&item_scores(rows, b, semantics), k), aggregation)).sum()
}

/// Every labeling of users by `0..groups`, turned into its non-empty blocks.
pub fn all_groupings(n: usize, groups: usize) -> Vec<Vec<Vec<usize>>> {
    let total = groups.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let mut blocks = vec![Vec::new(); groups];
        for u in 0..n {
            blocks[c % groups].push(u);
            c /= groups;
        }
        blocks.retain(|b: &Vec<usize>| !b.is_empty());
        out.push(blocks);
    }
    out
}

/// Best objective over every way to place users into at most `groups` groups.
pub fn optimum(rows: &[Vec<f64>], groups: usize, k: usize, semantics: Semantics, aggregation: &Aggregation) -> f64 {
    all_groupings(rows.len(), groups)
        .iter()
        .map(|b| objective(rows, b, k, semantics, aggregation))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Deterministic instance stream from a seed (splitmix64).
pub struct Instances {
    state: u64,
}

impl Instances {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn rows(&mut self, n: usize, m: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..m).map(|_| self.range(1, 5) as f64).collect()).collect()
    }
}
