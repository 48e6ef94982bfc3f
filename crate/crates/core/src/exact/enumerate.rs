/// Iterates the set partitions of `0..n` into at most `max_blocks` blocks as
/// restricted growth strings: `a[0] = 0` and `a[i] <= 1 + max(a[..i])`, with
/// every label below `max_blocks`. Strings come out in lexicographic order.
#[derive(Debug, Clone)]
pub struct PartitionIterator {
    labels: Vec<usize>,
    /// `prefix_max[i] = max(labels[..=i])`
    prefix_max: Vec<usize>,
    max_blocks: usize,
    started: bool,
    done: bool,
}

impl PartitionIterator {
    pub fn new(n: usize, max_blocks: usize) -> Self {
        Self {
            labels: vec![0; n],
            prefix_max: vec![0; n],
            max_blocks,
            started: false,
            done: n == 0 || max_blocks == 0,
        }
    }

    /// The current string; valid after `advance` returned `true`.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Steps to the next string without allocating. Returns `false` once
    /// the enumeration is exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let n = self.labels.len();
        for i in (1..n).rev() {
            let bound = (self.prefix_max[i - 1] + 1).min(self.max_blocks - 1);
            if self.labels[i] < bound {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        self.done = true;
        false
    }
}

impl Iterator for PartitionIterator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().then(|| self.labels.clone())
    }
}

/// Every partition of `n` users into at most `max_blocks` groups.
pub fn enumerate_partitions(n: usize, max_blocks: usize) -> PartitionIterator {
    PartitionIterator::new(n, max_blocks)
}

/// Stirling number of the second kind `S(n, k)`, saturating at `u128::MAX`.
pub fn stirling2(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    // row[j] = S(i, j)
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = (j as u128).saturating_mul(row[j]).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// `Σ_{j=1..max_blocks} S(n, j)`, saturating.
pub fn partition_count(n: usize, max_blocks: usize) -> u128 {
    (1..=max_blocks.min(n)).fold(0u128, |acc, j| acc.saturating_add(stirling2(n, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_partitions(3, 3).count(), 5);
        assert_eq!(enumerate_partitions(4, 2).count(), 8);
        assert_eq!(enumerate_partitions(5, 1).count(), 1);
        assert_eq!(enumerate_partitions(0, 3).count(), 0);
        assert_eq!(enumerate_partitions(1, 4).collect::<Vec<_>>(), vec![vec![0]]);
    }

    #[test]
    fn order_is_lexicographic() {
        let all: Vec<Vec<usize>> = enumerate_partitions(3, 3).collect();
        assert_eq!(all, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(0, 0), 1);
        assert_eq!(stirling2(4, 2), 7);
        assert_eq!(stirling2(10, 3), 9330);
        assert_eq!(stirling2(3, 5), 0);
        assert_eq!(partition_count(3, 3), 5);
        assert_eq!(partition_count(4, 2), 8);
        // Bell(10)
        assert_eq!(partition_count(10, 10), 115_975);
        assert!(partition_count(200, 10) > 10_000_000);
    }

    #[test]
    fn no_duplicates_up_to_seven() {
        for n in 1..=7 {
            for l in 1..=n {
                let all: Vec<Vec<usize>> = enumerate_partitions(n, l).collect();
                let unique: HashSet<&Vec<usize>> = all.iter().collect();
                assert_eq!(unique.len(), all.len());
                assert_eq!(all.len() as u128, partition_count(n, l), "n={n} l={l}");
                assert!(all.iter().all(|a| a.iter().all(|&b| b < l)));
            }
        }
    }
}
