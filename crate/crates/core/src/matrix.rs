//! Dense user × item preference scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed range `[r_min, r_max]` of admissible ratings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingScale {
    r_min: f64,
    r_max: f64,
}

impl RatingScale {
    pub fn new(r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) {
            return Err(Error::Config(format!("rating scale [{r_min}, {r_max}] is not finite")));
        }
        if r_min < 0.0 {
            return Err(Error::Config(format!("rating scale lower bound {r_min} is negative")));
        }
        if r_min > r_max {
            return Err(Error::Config(format!("rating scale [{r_min}, {r_max}] is empty")));
        }
        Ok(Self { r_min, r_max })
    }

    /// The 1..5 star scale used by MovieLens and Yahoo! Music.
    pub fn five_star() -> Self {
        Self { r_min: 1.0, r_max: 5.0 }
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.r_min && value <= self.r_max
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.r_min, self.r_max)
    }
}

impl Default for RatingScale {
    fn default() -> Self {
        Self::five_star()
    }
}

/// A complete `n × m` table of scores `sc(u, i)`, stored row-major.
///
/// Users and items are addressed by dense indices `0..n` and `0..m`. The
/// optional labels carry the identifiers the data was loaded with and are
/// only used for display and reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    n: usize,
    m: usize,
    ratings: Vec<f64>,
    scale: RatingScale,
    user_labels: Vec<String>,
    item_labels: Vec<String>,
    content_hash: u64,
}

impl RatingMatrix {
    /// Builds a matrix from a row-major score buffer of length `n * m`.
    pub fn from_row_major(n: usize, m: usize, ratings: Vec<f64>, scale: RatingScale) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidMatrix(format!("need at least one user and one item, got {n}×{m}")));
        }
        if ratings.len() != n * m {
            return Err(Error::InvalidMatrix(format!(
                "expected {} ratings for a {n}×{m} matrix, got {}",
                n * m,
                ratings.len()
            )));
        }
        if let Some(pos) = ratings.iter().position(|&r| !scale.contains(r)) {
            return Err(Error::InvalidMatrix(format!(
                "rating {} of user {} on item {} is outside [{}, {}]",
                ratings[pos],
                pos / m,
                pos % m,
                scale.r_min(),
                scale.r_max()
            )));
        }
        let content_hash = hash_content(n, m, &ratings, scale);
        Ok(Self {
            n,
            m,
            ratings,
            scale,
            user_labels: (1..=n).map(|u| format!("u{u}")).collect(),
            item_labels: (1..=m).map(|i| format!("i{i}")).collect(),
            content_hash,
        })
    }

    /// Builds a matrix from one row of scores per user.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], scale: RatingScale) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != m) {
            return Err(Error::InvalidMatrix(format!(
                "row {bad} has {} ratings, expected {m}",
                rows[bad].as_ref().len()
            )));
        }
        let ratings = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_row_major(n, m, ratings, scale)
    }

    pub fn with_labels(mut self, user_labels: Vec<String>, item_labels: Vec<String>) -> Result<Self> {
        if user_labels.len() != self.n || item_labels.len() != self.m {
            return Err(Error::InvalidMatrix(format!(
                "got {} user and {} item labels for a {}×{} matrix",
                user_labels.len(),
                item_labels.len(),
                self.n,
                self.m
            )));
        }
        self.user_labels = user_labels;
        self.item_labels = item_labels;
        Ok(self)
    }

    pub fn n_users(&self) -> usize {
        self.n
    }

    pub fn n_items(&self) -> usize {
        self.m
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    /// `sc(u, i)`; panics when either index is out of range.
    #[inline]
    pub fn score(&self, user: usize, item: usize) -> f64 {
        assert!(item < self.m, "item {item} out of range");
        self.ratings[user * self.m + item]
    }

    #[inline]
    pub fn row(&self, user: usize) -> &[f64] {
        &self.ratings[user * self.m..(user + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.ratings.chunks_exact(self.m)
    }

    pub fn user_label(&self, user: usize) -> &str {
        &self.user_labels[user]
    }

    pub fn item_label(&self, item: usize) -> &str {
        &self.item_labels[item]
    }

    pub fn user_labels(&self) -> &[String] {
        &self.user_labels
    }

    pub fn item_labels(&self) -> &[String] {
        &self.item_labels
    }

    /// Dense index of the user carrying `label`.
    pub fn user_index(&self, label: &str) -> Option<usize> {
        self.user_labels.iter().position(|l| l == label)
    }

    pub(crate) fn check_user(&self, user: usize) -> Result<()> {
        if user < self.n {
            Ok(())
        } else {
            Err(Error::user_not_found(user))
        }
    }

    pub(crate) fn check_item(&self, item: usize) -> Result<()> {
        if item < self.m {
            Ok(())
        } else {
            Err(Error::item_not_found(item))
        }
    }

    /// Content hash used to tell instances apart; stable within a build.
    /// Computed once on construction.
    pub fn content_hash(&self) -> u64 {
        self.content_hash
    }
}

fn hash_content(n: usize, m: usize, ratings: &[f64], scale: RatingScale) -> u64 {
    use std::hash::{DefaultHasher, Hash, Hasher};
    let mut h = DefaultHasher::new();
    n.hash(&mut h);
    m.hash(&mut h);
    scale.r_min.to_bits().hash(&mut h);
    scale.r_max.to_bits().hash(&mut h);
    for r in ratings {
        h.write_u64(r.to_bits());
    }
    h.finish()
}
