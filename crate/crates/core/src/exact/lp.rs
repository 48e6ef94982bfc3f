//! Integer program for Min aggregation, written in LP text format.
//!
//! Variables, with `g` a group slot, `i` a user and `j` an item:
//!
//! - `u_i_g` binary: user `i` belongs to group `g`
//! - `y_j_g` binary: item `j` is the k-th item of group `g`
//! - `w_j_g` binary: item `j` is one of the `k - 1` items above it
//! - `a_g` binary: group `g` is non-empty
//! - `s_j_g` continuous: group score of item `j`
//! - `z_g` continuous: satisfaction of group `g`
//!
//! The objective is `Σ_g z_g`. The selected `k` items bound `z_g` from
//! above (`z_g ≤ s_j_g + M(1 - y_j_g)` and the same for `w`), and every
//! unselected item must score at most `z_g`, so `z_g` is the score of the
//! group's k-th item. Under LM, `s_j_g ≤ sc(i, j) + r_max(1 - u_i_g)` for
//! every user, so `s_j_g` can reach the member minimum and no more. Under
//! AV, `s_j_g = Σ_i sc(i, j) u_i_g` is already linear. `z_g ≤ M a_g` with
//! `a_g ≤ Σ_i u_i_g` keeps empty slots at zero, which makes "at most ℓ
//! groups" exact.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::matrix::RatingMatrix;
use crate::scoring::{Aggregation, Semantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableBound {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// A linear program with a maximization objective.
#[derive(Debug, Clone, PartialEq)]
pub struct IpModel {
    /// Free-form header lines, written as comments.
    pub header: Vec<String>,
    pub objective: Vec<(f64, String)>,
    pub constraints: Vec<LinearConstraint>,
    pub bounds: Vec<VariableBound>,
    pub binaries: Vec<String>,
}

/// Variable and constraint counts of the exported model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IpSize {
    pub assignment_vars: usize,
    pub y_vars: usize,
    pub w_vars: usize,
    pub aux_binaries: usize,
    pub continuous_vars: usize,
    pub constraints: usize,
}

impl IpSize {
    /// Closed-form sizes for `n` users, `m` items and `groups` slots.
    pub fn expected(n: usize, m: usize, groups: usize, semantics: Semantics) -> Self {
        let linking = match semantics {
            Semantics::Lm => n * m * groups,
            Semantics::Av => m * groups,
        };
        Self {
            assignment_vars: n * groups,
            y_vars: m * groups,
            w_vars: m * groups,
            aux_binaries: groups,
            continuous_vars: m * groups + groups,
            constraints: n + 4 * groups + 4 * m * groups + linking,
        }
    }

    pub fn binaries(&self) -> usize {
        self.assignment_vars + self.y_vars + self.w_vars + self.aux_binaries
    }
}

fn u(i: usize, g: usize) -> String {
    format!("u_{}_{}", i + 1, g + 1)
}
fn y(j: usize, g: usize) -> String {
    format!("y_{}_{}", j + 1, g + 1)
}
fn w(j: usize, g: usize) -> String {
    format!("w_{}_{}", j + 1, g + 1)
}
fn s(j: usize, g: usize) -> String {
    format!("s_{}_{}", j + 1, g + 1)
}
fn z(g: usize) -> String {
    format!("z_{}", g + 1)
}
fn a(g: usize) -> String {
    format!("a_{}", g + 1)
}

/// Builds the integer program for grouping `matrix` into at most `groups`
/// groups with top-`k` lists under Min aggregation.
pub fn export_ip_model(
    matrix: &RatingMatrix,
    k: usize,
    groups: usize,
    semantics: Semantics,
    aggregation: &Aggregation,
) -> Result<IpModel> {
    if *aggregation != Aggregation::Min {
        return Err(Error::Config(format!("integer program export supports min aggregation only, got {aggregation}")));
    }
    if k == 0 || groups == 0 {
        return Err(Error::Config("k and the number of groups must be at least 1".into()));
    }
    let (n, m) = (matrix.n_users(), matrix.n_items());
    let k = k.min(m);
    let r_max = matrix.scale().r_max();
    let big_m = match semantics {
        Semantics::Lm => r_max,
        Semantics::Av => n as f64 * r_max,
    };

    let header = vec![
        format!("group formation, {semantics} semantics, min aggregation"),
        format!("n = {n} users, m = {m} items, at most {groups} groups, k = {k}, M = {big_m}"),
        "u_i_g: user i in group g; y_j_g: item j is the k-th item of g; w_j_g: item j ranks above it".into(),
        "s_j_g: group score of item j; z_g: satisfaction of g; a_g: group g is non-empty".into(),
        "z_g <= s_j_g + M (1 - y_j_g) and z_g <= s_j_g + M (1 - w_j_g) over the k selected items".into(),
        "s_j_g <= z_g + M (y_j_g + w_j_g) makes every unselected item score at most z_g".into(),
        match semantics {
            Semantics::Lm => "LM: s_j_g <= sc(i,j) + r_max (1 - u_i_g) for every user i".into(),
            Semantics::Av => "AV: s_j_g = sum_i sc(i,j) u_i_g".into(),
        },
        "a_g <= sum_i u_i_g and z_g <= M a_g keep empty groups at zero".into(),
    ];

    let objective = (0..groups).map(|g| (1.0, z(g))).collect();
    let mut constraints = Vec::new();
    let mut push = |name: String, terms: Vec<(f64, String)>, relation, rhs| {
        constraints.push(LinearConstraint { name, terms, relation, rhs });
    };

    for i in 0..n {
        push(format!("assign_{}", i + 1), (0..groups).map(|g| (1.0, u(i, g))).collect(), Relation::Eq, 1.0);
    }
    for g in 0..groups {
        let gl = g + 1;
        push(format!("kth_{gl}"), (0..m).map(|j| (1.0, y(j, g))).collect(), Relation::Eq, 1.0);
        push(format!("above_{gl}"), (0..m).map(|j| (1.0, w(j, g))).collect(), Relation::Eq, (k - 1) as f64);
        let mut active = vec![(1.0, a(g))];
        active.extend((0..n).map(|i| (-1.0, u(i, g))));
        push(format!("active_{gl}"), active, Relation::Le, 0.0);
        push(format!("empty_{gl}"), vec![(1.0, z(g)), (-big_m, a(g))], Relation::Le, 0.0);

        for j in 0..m {
            let tag = format!("{}_{gl}", j + 1);
            push(format!("pick_{tag}"), vec![(1.0, y(j, g)), (1.0, w(j, g))], Relation::Le, 1.0);
            push(format!("zy_{tag}"), vec![(1.0, z(g)), (-1.0, s(j, g)), (big_m, y(j, g))], Relation::Le, big_m);
            push(format!("zw_{tag}"), vec![(1.0, z(g)), (-1.0, s(j, g)), (big_m, w(j, g))], Relation::Le, big_m);
            push(
                format!("rest_{tag}"),
                vec![(1.0, s(j, g)), (-1.0, z(g)), (-big_m, w(j, g)), (-big_m, y(j, g))],
                Relation::Le,
                0.0,
            );
            match semantics {
                Semantics::Lm => {
                    for i in 0..n {
                        push(
                            format!("lm_{}_{tag}", i + 1),
                            vec![(1.0, s(j, g)), (r_max, u(i, g))],
                            Relation::Le,
                            matrix.score(i, j) + r_max,
                        );
                    }
                }
                Semantics::Av => {
                    let mut terms = vec![(1.0, s(j, g))];
                    terms.extend((0..n).filter(|&i| matrix.score(i, j) != 0.0).map(|i| (-matrix.score(i, j), u(i, g))));
                    push(format!("av_{tag}"), terms, Relation::Eq, 0.0);
                }
            }
        }
    }

    let mut bounds = Vec::new();
    for g in 0..groups {
        for j in 0..m {
            bounds.push(VariableBound { name: s(j, g), lower: 0.0, upper: big_m });
        }
        bounds.push(VariableBound { name: z(g), lower: 0.0, upper: big_m });
    }

    let mut binaries = Vec::new();
    for g in 0..groups {
        binaries.extend((0..n).map(|i| u(i, g)));
    }
    for g in 0..groups {
        binaries.extend((0..m).map(|j| y(j, g)));
    }
    for g in 0..groups {
        binaries.extend((0..m).map(|j| w(j, g)));
    }
    binaries.extend((0..groups).map(a));

    Ok(IpModel { header, objective, constraints, bounds, binaries })
}

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[(f64, String)]) {
    for (idx, (coef, var)) in terms.iter().enumerate() {
        if idx > 0 && idx % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let mag = coef.abs();
        if *coef < 0.0 {
            out.push_str(" -");
        } else if idx > 0 {
            out.push_str(" +");
        }
        if mag == 1.0 {
            let _ = write!(out, " {var}");
        } else {
            let _ = write!(out, " {mag} {var}");
        }
    }
}

impl IpModel {
    pub fn size(&self) -> IpSize {
        let count = |prefix: &str| self.binaries.iter().filter(|b| b.starts_with(prefix)).count();
        IpSize {
            assignment_vars: count("u_"),
            y_vars: count("y_"),
            w_vars: count("w_"),
            aux_binaries: count("a_"),
            continuous_vars: self.bounds.len(),
            constraints: self.constraints.len(),
        }
    }

    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            let _ = writeln!(out, "\\ {line}");
        }
        out.push_str("Maximize\n obj:");
        write_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            write_terms(&mut out, &c.terms);
            let _ = writeln!(out, " {} {}", c.relation, c.rhs);
        }
        out.push_str("Bounds\n");
        for b in &self.bounds {
            let _ = writeln!(out, " {} <= {} <= {}", b.lower, b.name, b.upper);
        }
        out.push_str("Binaries\n");
        for chunk in self.binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
        out.push_str("End\n");
        out
    }
}
