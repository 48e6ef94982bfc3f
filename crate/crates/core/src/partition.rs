use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A disjoint cover of the users `0..n` by non-empty blocks.
///
/// Members are kept sorted inside each block; block order is whatever the
/// producer chose and carries no meaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for (b, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            block.sort_unstable();
            for &u in block.iter() {
                match seen.get_mut(u) {
                    None => return Err(Error::InvalidPartition(format!("user {u} is not among the {n} users"))),
                    Some(true) => return Err(Error::InvalidPartition(format!("user {u} appears in two blocks"))),
                    Some(s) => *s = true,
                }
            }
        }
        if let Some(u) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("user {u} is not covered")));
        }
        Ok(Self { n, blocks })
    }

    /// Builds the partition encoded by a block label per user.
    pub fn from_assignment(assignment: &[usize]) -> Result<Self> {
        let n_blocks = assignment.iter().max().map_or(0, |b| b + 1);
        let mut blocks = vec![Vec::new(); n_blocks];
        for (u, &b) in assignment.iter().enumerate() {
            blocks[b].push(u);
        }
        blocks.retain(|b| !b.is_empty());
        Self::new(assignment.len(), blocks)
    }

    pub fn singletons(n: usize) -> Self {
        Self { n, blocks: (0..n).map(|u| vec![u]).collect() }
    }

    pub fn n_users(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, user: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&user).is_ok())
    }

    /// Blocks sorted by smallest member; equal groupings compare equal.
    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let mut blocks = self.blocks.clone();
        blocks.sort_unstable_by_key(|b| b[0]);
        blocks
    }

    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.n == other.n && self.canonical() == other.canonical()
    }
}

/// Where a moved user ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveTarget {
    /// The block that currently holds this user.
    BlockOf(usize),
    /// A fresh singleton block.
    NewBlock,
}

/// Relocation of one user, `P;μ` in partition-function terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub user: usize,
    pub target: MoveTarget,
}

impl Move {
    pub fn join(user: usize, host: usize) -> Self {
        Self { user, target: MoveTarget::BlockOf(host) }
    }

    pub fn detach(user: usize) -> Self {
        Self { user, target: MoveTarget::NewBlock }
    }
}

/// Returns `partition` with `mv` applied. A block emptied by the move is
/// dropped; moving a user into its own block changes nothing.
pub fn apply_move(partition: &Partition, mv: Move) -> Result<Partition> {
    let from = partition.block_of(mv.user).ok_or(Error::user_not_found(mv.user))?;
    let to = match mv.target {
        MoveTarget::BlockOf(host) => Some(partition.block_of(host).ok_or(Error::user_not_found(host))?),
        MoveTarget::NewBlock => None,
    };
    if to == Some(from) || (to.is_none() && partition.blocks[from].len() == 1) {
        return Ok(partition.clone());
    }

    let mut blocks = partition.blocks.clone();
    blocks[from].retain(|&u| u != mv.user);
    match to {
        Some(to) => {
            let block = &mut blocks[to];
            let pos = block.binary_search(&mv.user).unwrap_err();
            block.insert(pos, mv.user);
        }
        None => blocks.push(vec![mv.user]),
    }
    if blocks[from].is_empty() {
        blocks.remove(from);
    }
    Ok(Partition { n: partition.n, blocks })
}
