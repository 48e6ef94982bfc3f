use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::IntermediateGroup;

/// Max-heap over intermediate groups.
///
/// Higher priority pops first; equal priorities pop the larger group first,
/// then the lexicographically smaller key.
#[derive(Debug)]
pub struct SelectionQueue<'a> {
    heap: BinaryHeap<Entry<'a>>,
}

#[derive(Debug)]
struct Entry<'a> {
    index: usize,
    group: &'a IntermediateGroup,
}

impl Ord for Entry<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.group
            .priority
            .total_cmp(&other.group.priority)
            .then(self.group.members.len().cmp(&other.group.members.len()))
            .then_with(|| other.group.key.cmp(&self.group.key))
    }
}

impl PartialOrd for Entry<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Entry<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry<'_> {}

impl<'a> SelectionQueue<'a> {
    pub fn new(groups: &'a [IntermediateGroup]) -> Self {
        let heap = groups.iter().enumerate().map(|(index, group)| Entry { index, group }).collect();
        Self { heap }
    }

    /// Removes the best group, returning its index and the group.
    pub fn pop(&mut self) -> Option<(usize, &'a IntermediateGroup)> {
        self.heap.pop().map(|e| (e.index, e.group))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
