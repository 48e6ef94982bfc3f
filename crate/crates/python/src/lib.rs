//! Python bindings: `import groupforge`.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use groupforge::io::{generate_synthetic, Distribution, IngestPolicy, MissingPolicy, Report, ReportFormat};
use groupforge::{AlgorithmConfig, Aggregation, ExactOptions, GroupingOutcome, Move, MoveTarget, Partition, RatingScale, Semantics};

fn to_py(e: groupforge::Error) -> PyErr {
    match e {
        groupforge::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        groupforge::Error::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn scale(r_min: f64, r_max: f64) -> PyResult<RatingScale> {
    RatingScale::new(r_min, r_max).map_err(to_py)
}

fn config(semantics: &str, aggregation: &str, k: usize, groups: usize, seed: u64) -> PyResult<AlgorithmConfig> {
    let semantics: Semantics = semantics.parse().map_err(to_py)?;
    let aggregation: Aggregation = aggregation.parse().map_err(to_py)?;
    Ok(AlgorithmConfig::new(semantics, aggregation, k, groups).with_seed(seed))
}

/// A complete user × item score table.
#[pyclass(frozen, module = "groupforge")]
pub struct RatingMatrix {
    inner: groupforge::RatingMatrix,
}

#[pymethods]
impl RatingMatrix {
    #[new]
    #[pyo3(signature = (rows, r_min = 1.0, r_max = 5.0))]
    fn new(rows: Vec<Vec<f64>>, r_min: f64, r_max: f64) -> PyResult<Self> {
        let inner = groupforge::RatingMatrix::from_rows(&rows, scale(r_min, r_max)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// One of the built-in worked examples (`ex1` ... `ex5`, `proof1`, `proof2`).
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        groupforge::fixtures::by_name(name)
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown fixture {name:?}")))
    }

    /// Loads `user_id,item_id,rating` lines.
    #[staticmethod]
    #[pyo3(signature = (path, missing = "error", r_min = 1.0, r_max = 5.0))]
    fn load_csv(path: &str, missing: &str, r_min: f64, r_max: f64) -> PyResult<Self> {
        let policy = IngestPolicy { missing: missing.parse::<MissingPolicy>().map_err(to_py)?, scale: scale(r_min, r_max)? };
        let inner = groupforge::io::load_ratings_csv(path, &policy).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Uniform integer ratings on the scale.
    #[staticmethod]
    #[pyo3(signature = (users, items, seed = 0, r_min = 1.0, r_max = 5.0))]
    fn synthetic(users: usize, items: usize, seed: u64, r_min: f64, r_max: f64) -> PyResult<Self> {
        let inner =
            generate_synthetic(users, items, scale(r_min, r_max)?, seed, Distribution::UniformInteger).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn save_csv(&self, path: &str) -> PyResult<()> {
        groupforge::io::save_ratings_csv(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn n_users(&self) -> usize {
        self.inner.n_users()
    }

    #[getter]
    fn n_items(&self) -> usize {
        self.inner.n_items()
    }

    #[getter]
    fn user_labels(&self) -> Vec<String> {
        self.inner.user_labels().to_vec()
    }

    #[getter]
    fn item_labels(&self) -> Vec<String> {
        self.inner.item_labels().to_vec()
    }

    fn score(&self, user: usize, item: usize) -> PyResult<f64> {
        if user >= self.inner.n_users() || item >= self.inner.n_items() {
            return Err(PyValueError::new_err(format!("({user}, {item}) is outside the matrix")));
        }
        Ok(self.inner.score(user, item))
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().map(<[f64]>::to_vec).collect()
    }

    fn __repr__(&self) -> String {
        format!("RatingMatrix({} users × {} items)", self.inner.n_users(), self.inner.n_items())
    }
}

/// Groups formed by one algorithm run.
#[pyclass(frozen, module = "groupforge")]
pub struct Outcome {
    inner: GroupingOutcome,
    config: AlgorithmConfig,
    algorithm: &'static str,
}

#[pymethods]
impl Outcome {
    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective()
    }

    #[getter]
    fn algorithm(&self) -> &'static str {
        self.algorithm
    }

    /// Member lists, one per group.
    #[getter]
    fn groups(&self) -> Vec<Vec<usize>> {
        self.inner.groups().iter().map(|g| g.members.clone()).collect()
    }

    /// `(items, scores)` of every group's recommended list.
    #[getter]
    fn lists(&self) -> Vec<(Vec<usize>, Vec<f64>)> {
        self.inner.groups().iter().map(|g| (g.top_k.items().to_vec(), g.top_k.scores().to_vec())).collect()
    }

    #[getter]
    fn satisfactions(&self) -> Vec<f64> {
        self.inner.groups().iter().map(|g| g.satisfaction).collect()
    }

    /// Blocks sorted by smallest member, members ascending.
    fn partition(&self) -> Vec<Vec<usize>> {
        self.inner.partition().canonical()
    }

    fn average_satisfaction(&self, matrix: &RatingMatrix) -> PyResult<f64> {
        groupforge::average_group_satisfaction(&matrix.inner, &self.inner).map_err(to_py)
    }

    /// The report as `json` or `csv` text.
    #[pyo3(signature = (matrix, format = "json"))]
    fn report(&self, matrix: &RatingMatrix, format: &str) -> PyResult<String> {
        let format: ReportFormat = format.parse().map_err(to_py)?;
        let report = Report::new(&matrix.inner, &self.inner, &self.config, self.algorithm, None).map_err(to_py)?;
        report.render(format).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Outcome({}, objective={}, groups={:?})", self.algorithm, self.inner.objective(), self.partition())
    }
}

/// Greedy group formation.
#[pyfunction]
#[pyo3(signature = (matrix, k, groups, semantics = "lm", aggregation = "min"))]
fn form_groups(matrix: &RatingMatrix, k: usize, groups: usize, semantics: &str, aggregation: &str) -> PyResult<Outcome> {
    let config = config(semantics, aggregation, k, groups, 0)?;
    let inner = groupforge::grd_form_groups(&matrix.inner, &config).map_err(to_py)?;
    Ok(Outcome { inner, config, algorithm: "grd" })
}

/// Exact optimum by enumeration; `node_limit` caps the groupings scored.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (matrix, k, groups, semantics = "lm", aggregation = "min", node_limit = None, prune = false))]
fn exact_optimum(
    py: Python<'_>,
    matrix: &RatingMatrix,
    k: usize,
    groups: usize,
    semantics: &str,
    aggregation: &str,
    node_limit: Option<u64>,
    prune: bool,
) -> PyResult<Outcome> {
    let config = config(semantics, aggregation, k, groups, 0)?;
    let options = ExactOptions { node_limit, prune };
    let inner = py.detach(|| groupforge::exact_optimum(&matrix.inner, &config, options)).map_err(to_py)?;
    Ok(Outcome { inner, config, algorithm: "exact" })
}

/// Kendall-tau k-medoids clustering baseline.
#[pyfunction]
#[pyo3(signature = (matrix, k, groups, semantics = "lm", aggregation = "min", seed = 0))]
fn baseline(
    matrix: &RatingMatrix,
    k: usize,
    groups: usize,
    semantics: &str,
    aggregation: &str,
    seed: u64,
) -> PyResult<Outcome> {
    let config = config(semantics, aggregation, k, groups, seed)?;
    let inner = groupforge::baseline_form_groups(&matrix.inner, &config).map_err(to_py)?;
    Ok(Outcome { inner, config, algorithm: "baseline" })
}

/// Objective of an explicit grouping.
#[pyfunction]
#[pyo3(signature = (matrix, blocks, k, semantics = "lm", aggregation = "min"))]
fn partition_objective(
    matrix: &RatingMatrix,
    blocks: Vec<Vec<usize>>,
    k: usize,
    semantics: &str,
    aggregation: &str,
) -> PyResult<f64> {
    let config = config(semantics, aggregation, k, blocks.len().max(1), 0)?;
    let partition = Partition::new(matrix.inner.n_users(), blocks).map_err(to_py)?;
    let outcome = groupforge::partition_objective(&matrix.inner, &partition, k, config.semantics, &config.aggregation)
        .map_err(to_py)?;
    Ok(outcome.objective())
}

type ModularityResult = ((f64, f64, f64, f64), bool, bool);

/// Moves `user` into `host`'s block (or a new block when `host` is None)
/// in both partitions and returns
/// `((obj_p1, obj_p2, obj_p1_moved, obj_p2_moved), submodularity_violated, supermodularity_violated)`.
#[pyfunction]
#[pyo3(signature = (matrix, p1, p2, user, host, k = 1, semantics = "av", aggregation = "min"))]
#[allow(clippy::too_many_arguments)]
fn check_modularity(
    matrix: &RatingMatrix,
    p1: Vec<Vec<usize>>,
    p2: Vec<Vec<usize>>,
    user: usize,
    host: Option<usize>,
    k: usize,
    semantics: &str,
    aggregation: &str,
) -> PyResult<ModularityResult> {
    let config = config(semantics, aggregation, k, 1, 0)?;
    let n = matrix.inner.n_users();
    let p1 = Partition::new(n, p1).map_err(to_py)?;
    let p2 = Partition::new(n, p2).map_err(to_py)?;
    let target = host.map_or(MoveTarget::NewBlock, MoveTarget::BlockOf);
    let r = groupforge::check_modularity_violation(
        &matrix.inner,
        k,
        &p1,
        &p2,
        Move { user, target },
        config.semantics,
        &config.aggregation,
    )
    .map_err(to_py)?;
    Ok((r.quadruple(), r.submodularity_violated, r.supermodularity_violated))
}

/// LP-format integer program for the Min aggregation.
#[pyfunction]
#[pyo3(signature = (matrix, k, groups, semantics = "lm"))]
fn export_ip(matrix: &RatingMatrix, k: usize, groups: usize, semantics: &str) -> PyResult<String> {
    let semantics: Semantics = semantics.parse().map_err(to_py)?;
    let model = groupforge::export_ip_model(&matrix.inner, k, groups, semantics, &Aggregation::Min).map_err(to_py)?;
    Ok(model.to_lp_string())
}

/// Kendall-tau distance between two users' item rankings, in [0, 1].
#[pyfunction]
fn kendall_tau_distance(matrix: &RatingMatrix, u: usize, v: usize) -> PyResult<f64> {
    groupforge::kendall_tau_distance(&matrix.inner, u, v).map_err(to_py)
}

/// Recommendation-aware user group formation.
#[pymodule(name = "groupforge")]
fn groupforge_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RatingMatrix>()?;
    m.add_class::<Outcome>()?;
    m.add_function(wrap_pyfunction!(form_groups, m)?)?;
    m.add_function(wrap_pyfunction!(exact_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(baseline, m)?)?;
    m.add_function(wrap_pyfunction!(partition_objective, m)?)?;
    m.add_function(wrap_pyfunction!(check_modularity, m)?)?;
    m.add_function(wrap_pyfunction!(export_ip, m)?)?;
    m.add_function(wrap_pyfunction!(kendall_tau_distance, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
