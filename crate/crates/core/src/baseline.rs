//! Clustering baseline: Kendall-tau distances between users' item rankings,
//! k-medoids over those distances, then exact scoring of every cluster.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::AlgorithmConfig;
use crate::error::{Error, Result};
use crate::matrix::RatingMatrix;
use crate::outcome::{partition_objective, GroupingOutcome};
use crate::partition::Partition;

pub const DEFAULT_MAX_ITERS: usize = 100;

/// Symmetric `n × n` distances in `[0, 1]` with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!("expected {} distances, got {}", n * n, entries.len())));
        }
        for u in 0..n {
            if entries[u * n + u] != 0.0 {
                return Err(Error::InvalidMatrix(format!("distance of user {u} to itself is not zero")));
            }
            for v in 0..n {
                let d = entries[u * n + v];
                if !(0.0..=1.0).contains(&d) || d != entries[v * n + u] {
                    return Err(Error::InvalidMatrix(format!("bad distance between users {u} and {v}")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.entries[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.entries[u * self.n..(u + 1) * self.n]
    }
}

/// Sorts `values` and returns the number of strict inversions.
fn count_inversions(values: &mut [f64], scratch: &mut Vec<f64>) -> u64 {
    let len = values.len();
    if len < 2 {
        return 0;
    }
    let mid = len / 2;
    let mut count = count_inversions(&mut values[..mid], scratch) + count_inversions(&mut values[mid..], scratch);
    scratch.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < len {
        if values[j] < values[i] {
            count += (mid - i) as u64;
            scratch.push(values[j]);
            j += 1;
        } else {
            scratch.push(values[i]);
            i += 1;
        }
    }
    scratch.extend_from_slice(&values[i..mid]);
    scratch.extend_from_slice(&values[j..]);
    values.copy_from_slice(scratch);
    count
}

fn discordant_pairs(a: &[f64], b: &[f64], pairs: &mut Vec<(f64, f64)>, seq: &mut Vec<f64>, scratch: &mut Vec<f64>) -> u64 {
    // After sorting by (a, b), a pair is discordant exactly when the later
    // element has the strictly smaller b.
    pairs.clear();
    pairs.extend(a.iter().copied().zip(b.iter().copied()));
    pairs.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    seq.clear();
    seq.extend(pairs.iter().map(|p| p.1));
    count_inversions(seq, scratch)
}

fn pair_count(m: usize) -> f64 {
    (m * (m - 1) / 2) as f64
}

/// Fraction of item pairs the two users order in opposite directions.
/// Pairs tied for either user do not count.
pub fn kendall_tau_distance(matrix: &RatingMatrix, u: usize, v: usize) -> Result<f64> {
    matrix.check_user(u)?;
    matrix.check_user(v)?;
    let m = matrix.n_items();
    if m < 2 {
        return Err(Error::Degenerate("Kendall-tau distance needs at least two items".into()));
    }
    let d = discordant_pairs(matrix.row(u), matrix.row(v), &mut Vec::new(), &mut Vec::new(), &mut Vec::new());
    Ok(d as f64 / pair_count(m))
}

/// All pairwise Kendall-tau distances. Rows are computed in parallel.
pub fn distance_matrix(matrix: &RatingMatrix) -> Result<DistanceMatrix> {
    let (n, m) = (matrix.n_users(), matrix.n_items());
    if m < 2 {
        return Err(Error::Degenerate("Kendall-tau distance needs at least two items".into()));
    }
    let total = pair_count(m);
    let mut entries = vec![0.0; n * n];
    entries.par_chunks_mut(n).enumerate().for_each_init(
        || (Vec::new(), Vec::new(), Vec::new()),
        |(pairs, seq, scratch), (u, row)| {
            for (v, d) in row.iter_mut().enumerate().skip(u + 1) {
                *d = discordant_pairs(matrix.row(u), matrix.row(v), pairs, seq, scratch) as f64 / total;
            }
        },
    );
    for u in 0..n {
        for v in 0..u {
            entries[u * n + v] = entries[v * n + u];
        }
    }
    Ok(DistanceMatrix { n, entries })
}

/// Index into `medoids` of the nearest one; ties go to the lowest user id.
fn nearest(distances: &DistanceMatrix, user: usize, medoids: &[usize]) -> usize {
    let mut best = 0;
    for (idx, &med) in medoids.iter().enumerate().skip(1) {
        if distances.get(user, med) < distances.get(user, medoids[best]) {
            best = idx;
        }
    }
    best
}

fn assign(distances: &DistanceMatrix, medoids: &[usize]) -> Vec<Vec<usize>> {
    let mut clusters = vec![Vec::new(); medoids.len()];
    for user in 0..distances.n() {
        clusters[nearest(distances, user, medoids)].push(user);
    }
    clusters
}

fn best_medoid(distances: &DistanceMatrix, members: &[usize]) -> usize {
    let cost = |c: usize| members.iter().map(|&v| distances.get(c, v)).sum::<f64>();
    let mut best = members[0];
    let mut best_cost = cost(best);
    for &c in &members[1..] {
        let value = cost(c);
        if value < best_cost {
            best = c;
            best_cost = value;
        }
    }
    best
}

/// k-medoids with seeded initial medoids. Alternates assignment and medoid
/// update until the medoid set stops changing or `max_iters` rounds ran.
/// Clusters that lose every member are dropped.
pub fn cluster_users(distances: &DistanceMatrix, groups: usize, max_iters: usize, seed: u64) -> Result<Partition> {
    let n = distances.n();
    if groups == 0 || groups > n {
        return Err(Error::Config(format!("cannot cluster {n} users into {groups} groups")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = rand::seq::index::sample(&mut rng, n, groups).into_vec();
    medoids.sort_unstable();

    for _ in 0..max_iters {
        let clusters = assign(distances, &medoids);
        let mut next: Vec<usize> =
            clusters.iter().filter(|c| !c.is_empty()).map(|c| best_medoid(distances, c)).collect();
        next.sort_unstable();
        if next == medoids {
            break;
        }
        medoids = next;
    }
    let blocks = assign(distances, &medoids).into_iter().filter(|c| !c.is_empty()).collect();
    Partition::new(n, blocks)
}

/// Clusters users by Kendall-tau distance into at most `max_groups` groups
/// and scores the clusters. Uses `config.seed` for the initial medoids.
pub fn baseline_form_groups(matrix: &RatingMatrix, config: &AlgorithmConfig) -> Result<GroupingOutcome> {
    config.validate()?;
    let n = matrix.n_users();
    let partition = if config.max_groups == 1 {
        Partition::new(n, vec![(0..n).collect()])?
    } else {
        let distances = distance_matrix(matrix)?;
        cluster_users(&distances, config.max_groups, DEFAULT_MAX_ITERS, config.seed)?
    };
    partition_objective(matrix, &partition, config.k, config.semantics, &config.aggregation)
}
