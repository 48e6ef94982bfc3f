//! Per-user preference lists and per-item column statistics.
//!
//! The greedy algorithms consume users' ranked preference lists rather than
//! raw rows. Building them is one `O(nm)` pass; afterwards group formation
//! touches only the first `k` entries of each list plus a few rows.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::RatingMatrix;
use crate::scoring::{rank_order, Semantics, TopKList};

#[derive(Debug, Clone)]
pub struct PreparedRatings<'a> {
    matrix: &'a RatingMatrix,
    depth: usize,
    /// `n × depth` item ids, each user's best items first.
    lists: Vec<u32>,
    /// Scores matching `lists`, so bucketing never touches full rows.
    list_scores: Vec<f64>,
    col_min: Vec<f64>,
    col_min_count: Vec<u32>,
    col_sum: Vec<f64>,
    /// All ratings are integers small enough for exact float sums.
    integral: bool,
}

impl<'a> PreparedRatings<'a> {
    /// Ranks every user's items, keeping the best `depth` of them.
    pub fn new(matrix: &'a RatingMatrix, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("preference list depth must be at least 1".into()));
        }
        let m = matrix.n_items();
        if m > u32::MAX as usize {
            return Err(Error::InvalidMatrix(format!("{m} items exceed the supported maximum")));
        }
        let depth = depth.min(m);
        let mut lists = vec![0u32; matrix.n_users() * depth];
        lists.par_chunks_mut(depth).enumerate().for_each_init(
            || Vec::with_capacity(m),
            |order: &mut Vec<u32>, (u, out)| {
                let row = matrix.row(u);
                order.clear();
                order.extend(0..m as u32);
                let cmp = |a: &u32, b: &u32| rank_order(row[*a as usize], *a as usize, row[*b as usize], *b as usize);
                if depth < m {
                    order.select_nth_unstable_by(depth, cmp);
                }
                let head = &mut order[..depth];
                head.sort_unstable_by(cmp);
                out.copy_from_slice(head);
            },
        );
        let list_scores: Vec<f64> =
            lists.iter().enumerate().map(|(pos, &i)| matrix.score(pos / depth, i as usize)).collect();

        let mut col_min = vec![f64::INFINITY; m];
        let mut col_min_count = vec![0u32; m];
        let mut col_sum = vec![0.0; m];
        let mut integral = true;
        for row in matrix.rows() {
            for (i, &r) in row.iter().enumerate() {
                if r < col_min[i] {
                    col_min[i] = r;
                    col_min_count[i] = 1;
                } else if r == col_min[i] {
                    col_min_count[i] += 1;
                }
                col_sum[i] += r;
                integral &= r.fract() == 0.0;
            }
        }
        let max_sum = matrix.scale().r_max() * matrix.n_users() as f64;
        integral &= max_sum < (1u64 << 52) as f64;

        Ok(Self { matrix, depth, lists, list_scores, col_min, col_min_count, col_sum, integral })
    }

    pub fn matrix(&self) -> &'a RatingMatrix {
        self.matrix
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The user's best `depth` items, best first.
    pub fn personal_list(&self, user: usize) -> &[u32] {
        &self.lists[user * self.depth..(user + 1) * self.depth]
    }

    /// Scores of [`personal_list`](Self::personal_list), best first.
    pub fn personal_scores(&self, user: usize) -> &[f64] {
        &self.list_scores[user * self.depth..(user + 1) * self.depth]
    }

    /// Group scores of every item for all users except `excluded`.
    ///
    /// `excluded` must be sorted, duplicate free and leave at least one
    /// user. When it is small the scores are derived from the column
    /// statistics instead of rescanning the remaining rows; both routes are
    /// exact.
    pub(crate) fn complement_scores(&self, excluded: &[usize], semantics: Semantics) -> Vec<f64> {
        let n = self.matrix.n_users();
        debug_assert!(excluded.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(excluded.len() < n);
        let remaining = n - excluded.len();
        let use_stats = excluded.len() < remaining && (semantics == Semantics::Lm || self.integral);
        if !use_stats {
            let members: Vec<usize> = complement(n, excluded);
            return crate::scoring::all_item_scores(self.matrix, &members, semantics);
        }
        match semantics {
            Semantics::Av => {
                let mut sums = self.col_sum.clone();
                for &u in excluded {
                    for (s, r) in sums.iter_mut().zip(self.matrix.row(u)) {
                        *s -= r;
                    }
                }
                sums
            }
            Semantics::Lm => {
                let mut removed = vec![0u32; self.col_min.len()];
                for &u in excluded {
                    for ((c, r), min) in removed.iter_mut().zip(self.matrix.row(u)).zip(&self.col_min) {
                        *c += u32::from(r == min);
                    }
                }
                let mut mins = self.col_min.clone();
                for (i, min) in mins.iter_mut().enumerate() {
                    if removed[i] == self.col_min_count[i] {
                        // Every holder of the column minimum left; rescan.
                        let mut skip = excluded.iter().peekable();
                        *min = f64::INFINITY;
                        for u in 0..n {
                            if skip.peek() == Some(&&u) {
                                skip.next();
                                continue;
                            }
                            *min = min.min(self.matrix.score(u, i));
                        }
                    }
                }
                mins
            }
        }
    }

    pub(crate) fn complement_top_k(&self, excluded: &[usize], k: usize, semantics: Semantics) -> TopKList {
        TopKList::from_item_scores(&self.complement_scores(excluded, semantics), k)
    }
}

pub(crate) fn complement(n: usize, excluded: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - excluded.len());
    let mut skip = excluded.iter().peekable();
    for u in 0..n {
        if skip.peek() == Some(&&u) {
            skip.next();
        } else {
            out.push(u);
        }
    }
    out
}
