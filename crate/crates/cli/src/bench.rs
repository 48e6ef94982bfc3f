//! Parameter sweeps over synthetic instances.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use groupforge::exact::partition_count;
use groupforge::io::{generate_synthetic, Distribution};
use groupforge::{
    average_group_satisfaction, baseline_form_groups, exact_optimum, grd_form_groups, AlgorithmConfig, Aggregation,
    ExactOptions, GroupingOutcome, RatingMatrix, RatingScale, Semantics,
};
use rayon::prelude::*;

use crate::CliError;

/// Largest enumeration the exact oracle runs without `--force`.
pub const EXACT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    Users,
    Items,
    Groups,
    K,
}

impl Parameter {
    pub fn name(&self) -> &'static str {
        match self {
            Parameter::Users => "users",
            Parameter::Items => "items",
            Parameter::Groups => "groups",
            Parameter::K => "k",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Grd,
    Baseline,
    Exact,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Grd => "grd",
            Algorithm::Baseline => "baseline",
            Algorithm::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "grd" | "greedy" => Some(Algorithm::Grd),
            "baseline" => Some(Algorithm::Baseline),
            "exact" => Some(Algorithm::Exact),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub vary: Parameter,
    pub values: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub users: usize,
    pub items: usize,
    pub k: usize,
    pub groups: usize,
    pub semantics: Semantics,
    pub aggregation: Aggregation,
    pub scale: RatingScale,
    pub seed: u64,
    /// Record wall-clock times; off gives reproducible output.
    pub timing: bool,
    /// Worker threads; `None` uses `GROUPFORGE_THREADS` or all cores.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub parameter: &'static str,
    pub value: usize,
    pub algorithm: &'static str,
    pub trial: usize,
    pub seed: u64,
    pub objective: f64,
    pub avg_satisfaction: f64,
    pub runtime_ms: Option<f64>,
}

struct Point {
    value: usize,
    users: usize,
    items: usize,
    k: usize,
    groups: usize,
}

fn point(config: &BenchConfig, value: usize) -> Point {
    let mut p = Point { value, users: config.users, items: config.items, k: config.k, groups: config.groups };
    match config.vary {
        Parameter::Users => p.users = value,
        Parameter::Items => p.items = value,
        Parameter::Groups => p.groups = value,
        Parameter::K => p.k = value,
    }
    p
}

fn trial_seed(base: u64, value_index: usize, trial: usize) -> u64 {
    base.wrapping_add((value_index as u64) << 32).wrapping_add(trial as u64)
}

/// Thread count from `GROUPFORGE_THREADS`, if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    std::env::var("GROUPFORGE_THREADS").ok()?.trim().parse().ok().filter(|&t| t > 0)
}

fn run_one(
    algorithm: Algorithm,
    matrix: &RatingMatrix,
    config: &AlgorithmConfig,
) -> Result<(GroupingOutcome, f64), CliError> {
    let start = Instant::now();
    let outcome = match algorithm {
        Algorithm::Grd => grd_form_groups(matrix, config)?,
        Algorithm::Baseline => baseline_form_groups(matrix, config)?,
        Algorithm::Exact => exact_optimum(matrix, config, ExactOptions::default())?,
    };
    Ok((outcome, start.elapsed().as_secs_f64() * 1e3))
}

/// Runs every algorithm on every (value, trial) instance. Rows come back
/// ordered by value, then algorithm, then trial.
pub fn bench_sweep(config: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    if config.values.is_empty() || config.trials == 0 || config.algorithms.is_empty() {
        return Err(CliError::Usage("bench needs at least one value, trial and algorithm".into()));
    }
    if config.algorithms.contains(&Algorithm::Exact) {
        for &v in &config.values {
            let p = point(config, v);
            let count = partition_count(p.users, p.groups);
            if count > EXACT_BUDGET {
                return Err(CliError::Refused(format!(
                    "exact enumeration for {} users into at most {} groups needs {count} partitions, above the budget of {EXACT_BUDGET}",
                    p.users, p.groups
                )));
            }
        }
    }

    let mut jobs = Vec::new();
    for (vi, &value) in config.values.iter().enumerate() {
        for trial in 0..config.trials {
            jobs.push((vi, value, trial));
        }
    }
    let threads = config.threads.or_else(env_threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;

    let per_job: Vec<Result<Vec<BenchRow>, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(vi, value, trial)| {
                let p = point(config, value);
                let seed = trial_seed(config.seed, vi, trial);
                let matrix = generate_synthetic(p.users, p.items, config.scale, seed, Distribution::UniformInteger)?;
                let alg_config =
                    AlgorithmConfig::new(config.semantics, config.aggregation.clone(), p.k, p.groups).with_seed(seed);
                let mut rows = Vec::new();
                for &algorithm in &config.algorithms {
                    let (outcome, ms) = run_one(algorithm, &matrix, &alg_config)?;
                    rows.push(BenchRow {
                        parameter: config.vary.name(),
                        value: p.value,
                        algorithm: algorithm.name(),
                        trial,
                        seed,
                        objective: outcome.objective(),
                        avg_satisfaction: average_group_satisfaction(&matrix, &outcome)?,
                        runtime_ms: config.timing.then_some(ms),
                    });
                }
                Ok(rows)
            })
            .collect()
    });

    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    let order: BTreeMap<usize, usize> = config.values.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let alg_index = |name: &str| config.algorithms.iter().position(|a| a.name() == name);
    rows.sort_by_key(|r| (order[&r.value], alg_index(r.algorithm), r.trial));
    Ok(rows)
}

pub const CSV_HEADER: &str = "parameter,value,algorithm,trial,seed,objective,avg_satisfaction,runtime_ms";

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let runtime = r.runtime_ms.map(|ms| format!("{ms:.3}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.parameter, r.value, r.algorithm, r.trial, r.seed, r.objective, r.avg_satisfaction, runtime
        );
    }
    out
}

/// Mean objective, satisfaction and runtime per (value, algorithm).
pub fn summary_table(rows: &[BenchRow]) -> String {
    let mut groups: Vec<(usize, &str, Vec<&BenchRow>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(v, a, _)| *v == r.value && *a == r.algorithm) {
            Some(entry) => entry.2.push(r),
            None => groups.push((r.value, r.algorithm, vec![r])),
        }
    }
    let parameter = rows.first().map_or("value", |r| r.parameter);
    let mut out = format!("{parameter:>10}  {:<9} {:>12} {:>14} {:>12}\n", "algorithm", "objective", "avg_sat", "runtime_ms");
    for (value, algorithm, rs) in groups {
        let mean = |f: &dyn Fn(&BenchRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / rs.len() as f64;
        let runtime = if rs.iter().all(|r| r.runtime_ms.is_some()) {
            format!("{:.3}", mean(&|r| r.runtime_ms.unwrap_or(0.0)))
        } else {
            "-".to_string()
        };
        let _ = writeln!(
            out,
            "{value:>10}  {algorithm:<9} {:>12.3} {:>14.3} {runtime:>12}",
            mean(&|r| r.objective),
            mean(&|r| r.avg_satisfaction)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> BenchConfig {
        BenchConfig {
            vary: Parameter::Users,
            values: vec![20, 40, 80],
            trials: 2,
            algorithms: vec![Algorithm::Grd, Algorithm::Baseline],
            users: 10,
            items: 8,
            k: 2,
            groups: 3,
            semantics: Semantics::Lm,
            aggregation: Aggregation::Min,
            scale: RatingScale::five_star(),
            seed: 5,
            timing: false,
            threads: Some(2),
        }
    }

    #[test]
    fn one_row_per_value_algorithm_and_trial() {
        let rows = bench_sweep(&config()).unwrap();
        assert_eq!(rows.len(), 3 * 2 * 2);
        assert_eq!(rows[0].value, 20);
        assert_eq!(rows[0].algorithm, "grd");
        assert_eq!(rows[2].algorithm, "baseline");
        assert!(rows.iter().all(|r| r.runtime_ms.is_none()));
        let csv = rows_to_csv(&rows);
        assert_eq!(csv.lines().count(), 13);
        assert!(csv.lines().all(|l| l.split(',').count() == 8));
    }

    #[test]
    fn deterministic_without_timing() {
        let a = rows_to_csv(&bench_sweep(&config()).unwrap());
        let mut single = config();
        single.threads = Some(1);
        assert_eq!(a, rows_to_csv(&bench_sweep(&single).unwrap()));
    }

    #[test]
    fn exact_beyond_budget_is_refused() {
        let mut c = config();
        c.values = vec![200];
        c.algorithms = vec![Algorithm::Exact];
        assert!(matches!(bench_sweep(&c), Err(CliError::Refused(_))));
    }

    #[test]
    fn summary_has_a_line_per_value_and_algorithm() {
        let rows = bench_sweep(&config()).unwrap();
        assert_eq!(summary_table(&rows).lines().count(), 1 + 3 * 2);
    }
}
