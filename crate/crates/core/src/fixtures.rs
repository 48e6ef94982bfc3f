//! Small worked instances, embedded so tests and the CLI need no files.
//!
//! Rows are users `u1, u2, ...`; columns are items `i1, i2, ...`; all use the
//! 1..5 scale.

use crate::matrix::{RatingMatrix, RatingScale};

pub const NAMES: &[&str] = &["ex1", "ex2", "ex3", "ex4", "ex5", "proof1", "proof2"];

fn build<const M: usize>(rows: &[[f64; M]]) -> RatingMatrix {
    RatingMatrix::from_rows(rows, RatingScale::five_star()).expect("fixture is valid")
}

/// Six users, three items, up to three groups.
pub fn ex1() -> RatingMatrix {
    build(&[
        [1.0, 4.0, 3.0],
        [2.0, 3.0, 5.0],
        [2.0, 5.0, 1.0],
        [2.0, 5.0, 1.0],
        [3.0, 1.0, 1.0],
        [1.0, 2.0, 5.0],
    ])
}

/// Same shape as [`ex1`], different ratings; used with two groups.
pub fn ex2() -> RatingMatrix {
    build(&[
        [3.0, 1.0, 4.0],
        [1.0, 4.0, 3.0],
        [2.0, 5.0, 1.0],
        [2.0, 5.0, 1.0],
        [1.0, 2.0, 3.0],
        [3.0, 2.0, 1.0],
    ])
}

/// Two users whose shared personal bottom item ends up on top of the group list.
pub fn ex3() -> RatingMatrix {
    build(&[[5.0, 4.0, 1.0], [1.0, 4.0, 5.0]])
}

/// Four users, two items: grouping against personal order can pay off under AV.
pub fn ex4() -> RatingMatrix {
    build(&[[5.0, 4.0], [4.0, 5.0], [4.0, 5.0], [3.0, 2.0]])
}

/// Instance on which the LM sum greedy is one point short of optimal.
pub fn ex5() -> RatingMatrix {
    build(&[
        [1.0, 4.0, 3.0],
        [2.0, 3.0, 5.0],
        [2.0, 5.0, 1.0],
        [2.0, 5.0, 1.0],
        [2.0, 4.0, 3.0],
        [1.0, 2.0, 5.0],
    ])
}

/// Counterexample to submodularity of the AV objective.
pub fn proof1() -> RatingMatrix {
    build(&[[4.0, 2.0], [2.0, 3.0], [1.0, 5.0]])
}

/// Counterexample to supermodularity of the AV objective.
pub fn proof2() -> RatingMatrix {
    build(&[[2.0, 3.0], [3.0, 5.0], [5.0, 3.0]])
}

pub fn by_name(name: &str) -> Option<RatingMatrix> {
    Some(match name {
        "ex1" => ex1(),
        "ex2" => ex2(),
        "ex3" => ex3(),
        "ex4" => ex4(),
        "ex5" => ex5(),
        "proof1" => proof1(),
        "proof2" => proof2(),
        _ => return None,
    })
}
