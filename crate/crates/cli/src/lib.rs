//! Command-line front end for `groupforge`.

pub mod bench;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use groupforge::analysis::{fixture_modularity_case, modularity_sweep};
use groupforge::exact::partition_count;
use groupforge::io::{generate_synthetic, load_ratings_csv, write_ratings_csv, Distribution, IngestPolicy, MissingPolicy, Report, ReportFormat};
use groupforge::{
    baseline_form_groups, check_modularity_violation, exact_optimum, export_ip_model, fixtures, grd_form_groups,
    AlgorithmConfig, Aggregation, ExactOptions, GroupingOutcome, Move, MoveTarget, Partition, RatingMatrix, RatingScale,
    Semantics,
};

use bench::{bench_sweep, rows_to_csv, summary_table, Algorithm, BenchConfig, Parameter, EXACT_BUDGET};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] groupforge::Error),
    #[error("{0}")]
    Usage(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Exit status when the exact search stopped at its node limit.
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "groupforge", version, about = "Form user groups that maximize satisfaction with their top-k recommendations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Greedy group formation
    Form(RunArgs),
    /// Exact optimum by enumerating every grouping
    Exact(ExactArgs),
    /// Kendall-tau k-medoids clustering baseline
    Baseline(RunArgs),
    /// Parameter sweep over synthetic instances
    Bench(BenchArgs),
    /// Check a move against the sub- and supermodularity inequalities
    Modularity(ModularityArgs),
    /// Write the integer program (min aggregation) in LP format
    ExportIp(ExportArgs),
    /// Generate a synthetic ratings CSV
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SemanticsArg {
    Lm,
    Av,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Lm => Semantics::Lm,
            SemanticsArg::Av => Semantics::Av,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggArg {
    Max,
    Min,
    Sum,
    /// Weights 1/j
    Wsum,
    /// Weights 1/log2(j+1)
    WsumLog,
}

impl From<AggArg> for Aggregation {
    fn from(a: AggArg) -> Self {
        use groupforge::PositionWeights;
        match a {
            AggArg::Max => Aggregation::Max,
            AggArg::Min => Aggregation::Min,
            AggArg::Sum => Aggregation::Sum,
            AggArg::Wsum => Aggregation::WeightedSum(PositionWeights::Reciprocal),
            AggArg::WsumLog => Aggregation::WeightedSum(PositionWeights::Logarithmic),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MissingArg {
    Error,
    FillMin,
    FillItemMean,
}

impl From<MissingArg> for MissingPolicy {
    fn from(m: MissingArg) -> Self {
        match m {
            MissingArg::Error => MissingPolicy::Error,
            MissingArg::FillMin => MissingPolicy::FillMin,
            MissingArg::FillItemMean => MissingPolicy::FillItemMean,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VaryArg {
    Users,
    Items,
    Groups,
    K,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Ratings CSV with `user_id,item_id,rating` lines
    #[arg(long, conflicts_with = "fixture")]
    pub ratings: Option<PathBuf>,
    /// Built-in instance: ex1, ex2, ex3, ex4, ex5, proof1, proof2
    #[arg(long)]
    pub fixture: Option<String>,
    /// Handling of absent (user, item) pairs
    #[arg(long, value_enum, default_value = "error")]
    pub missing: MissingArg,
    #[arg(long, default_value_t = 1.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub r_max: f64,
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    #[arg(long, value_enum, default_value = "lm")]
    pub semantics: SemanticsArg,
    #[arg(long = "agg", value_enum, default_value = "min")]
    pub aggregation: AggArg,
    /// Length of each group's recommended list
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Maximum number of groups
    #[arg(long, default_value_t = 2)]
    pub groups: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Include the wall-clock runtime in the report
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Run even when the enumeration exceeds the default budget
    #[arg(long)]
    pub force: bool,
    /// Stop after scoring this many groupings and report the best so far
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Branch and bound (LM only)
    #[arg(long)]
    pub prune: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub vary: VaryArg,
    /// Comma-separated values of the varied parameter
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Comma-separated subset of grd, baseline, exact
    #[arg(long, value_delimiter = ',', default_value = "grd,baseline")]
    pub algos: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub users: usize,
    #[arg(long, default_value_t = 100)]
    pub items: usize,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long, default_value_t = 1.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub r_max: f64,
    /// CSV file for the per-run rows; the summary goes to standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave runtimes empty so the output is reproducible
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct ModularityArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "av")]
    pub semantics: SemanticsArg,
    #[arg(long = "agg", value_enum, default_value = "min")]
    pub aggregation: AggArg,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// First partition, blocks separated by `|`, users by `,` (e.g. `u1|u2|u3`)
    #[arg(long)]
    pub p1: Option<String>,
    /// Second partition, same syntax as --p1
    #[arg(long)]
    pub p2: Option<String>,
    /// `USER:HOST` joins HOST's block, `USER:new` opens a block
    #[arg(long = "move")]
    pub mv: Option<String>,
    /// Try every refinement pair and single-user move (at most 5 users)
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub users: usize,
    #[arg(long)]
    pub items: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub r_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_instance(args: &InstanceArgs) -> Result<RatingMatrix, CliError> {
    match (&args.ratings, &args.fixture) {
        (Some(path), None) => {
            let policy = IngestPolicy { missing: args.missing.into(), scale: RatingScale::new(args.r_min, args.r_max)? };
            Ok(load_ratings_csv(path, &policy)?)
        }
        (None, Some(name)) => fixtures::by_name(name).ok_or_else(|| {
            CliError::Usage(format!("unknown fixture {name:?}; expected one of {}", fixtures::NAMES.join(", ")))
        }),
        (None, None) => Err(CliError::Usage("give either --ratings PATH or --fixture NAME".into())),
        (Some(_), Some(_)) => Err(CliError::Usage("--ratings and --fixture are mutually exclusive".into())),
    }
}

fn algorithm_config(args: &AlgoArgs) -> AlgorithmConfig {
    AlgorithmConfig::new(args.semantics.into(), args.aggregation.into(), args.k, args.groups).with_seed(args.seed)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write { path: p.to_path_buf(), source }),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Write { path: "<stdout>".into(), source }),
    }
}

fn emit_report(
    matrix: &RatingMatrix,
    outcome: &GroupingOutcome,
    config: &AlgorithmConfig,
    algorithm: &str,
    elapsed_ms: f64,
    output: &OutputArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let runtime = output.timing.then_some(elapsed_ms);
    let report = Report::new(matrix, outcome, config, algorithm, runtime)?;
    let text = report.render(output.format.into())?;
    emit(&text, output.out.as_deref(), out)?;
    if let Some(path) = &output.out {
        let _ = writeln!(out, "objective {} over {} groups written to {}", outcome.objective(), outcome.groups().len(), path.display());
    }
    Ok(())
}

fn cmd_form(args: &RunArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let matrix = load_instance(&args.instance)?;
    let config = algorithm_config(&args.algo);
    let start = Instant::now();
    let outcome = grd_form_groups(&matrix, &config)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    emit_report(&matrix, &outcome, &config, "grd", ms, &args.output, out)?;
    Ok(0)
}

fn cmd_baseline(args: &RunArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let matrix = load_instance(&args.instance)?;
    let config = algorithm_config(&args.algo);
    let start = Instant::now();
    let outcome = baseline_form_groups(&matrix, &config)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    emit_report(&matrix, &outcome, &config, "baseline", ms, &args.output, out)?;
    Ok(0)
}

fn cmd_exact(args: &ExactArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let matrix = load_instance(&args.run.instance)?;
    let config = algorithm_config(&args.run.algo);
    let count = partition_count(matrix.n_users(), config.max_groups);
    if count > EXACT_BUDGET && !args.force {
        return Err(CliError::Refused(format!(
            "{} users into at most {} groups is {count} groupings, above the budget of {EXACT_BUDGET}; pass --force (optionally with --node-limit) to run anyway",
            matrix.n_users(),
            config.max_groups
        )));
    }
    let options = ExactOptions { node_limit: args.node_limit, prune: args.prune };
    let start = Instant::now();
    match exact_optimum(&matrix, &config, options) {
        Ok(outcome) => {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            emit_report(&matrix, &outcome, &config, "exact", ms, &args.run.output, out)?;
            Ok(0)
        }
        Err(groupforge::Error::BudgetExceeded { limit, best: Some(best) }) => {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let _ = writeln!(err, "warning: node limit of {limit} reached; reporting the best grouping found so far");
            emit_report(&matrix, &best, &config, "exact-partial", ms, &args.run.output, out)?;
            Ok(EXIT_PARTIAL)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let algorithms = args
        .algos
        .iter()
        .map(|a| Algorithm::parse(a).ok_or_else(|| CliError::Usage(format!("unknown algorithm {a:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let config = BenchConfig {
        vary: match args.vary {
            VaryArg::Users => Parameter::Users,
            VaryArg::Items => Parameter::Items,
            VaryArg::Groups => Parameter::Groups,
            VaryArg::K => Parameter::K,
        },
        values: args.values.clone(),
        trials: args.trials,
        algorithms,
        users: args.users,
        items: args.items,
        k: args.algo.k,
        groups: args.algo.groups,
        semantics: args.algo.semantics.into(),
        aggregation: args.algo.aggregation.into(),
        scale: RatingScale::new(args.r_min, args.r_max)?,
        seed: args.algo.seed,
        timing: !args.no_timing,
        threads: None,
    };
    let rows = bench_sweep(&config)?;
    let csv = rows_to_csv(&rows);
    match &args.out {
        Some(path) => {
            emit(&csv, Some(path), out)?;
            emit(&summary_table(&rows), None, out)?;
        }
        None => emit(&csv, None, out)?,
    }
    Ok(0)
}

fn parse_user(matrix: &RatingMatrix, token: &str) -> Result<usize, CliError> {
    let token = token.trim();
    if let Some(u) = matrix.user_index(token) {
        return Ok(u);
    }
    match token.parse::<usize>() {
        Ok(u) if (1..=matrix.n_users()).contains(&u) => Ok(u - 1),
        _ => Err(CliError::Usage(format!("unknown user {token:?}"))),
    }
}

fn parse_partition(matrix: &RatingMatrix, text: &str) -> Result<Partition, CliError> {
    let blocks = text
        .split('|')
        .map(|block| block.split(',').map(|t| parse_user(matrix, t)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Partition::new(matrix.n_users(), blocks)?)
}

fn parse_move(matrix: &RatingMatrix, text: &str) -> Result<Move, CliError> {
    let (user, target) =
        text.split_once(':').ok_or_else(|| CliError::Usage(format!("move {text:?} is not USER:HOST or USER:new")))?;
    let user = parse_user(matrix, user)?;
    let target = match target.trim() {
        "new" => MoveTarget::NewBlock,
        host => MoveTarget::BlockOf(parse_user(matrix, host)?),
    };
    Ok(Move { user, target })
}

fn fmt_score(x: f64) -> String {
    format!("{x}")
}

fn cmd_modularity(args: &ModularityArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let matrix = load_instance(&args.instance)?;
    let semantics: Semantics = args.semantics.into();
    let aggregation: Aggregation = args.aggregation.into();

    if args.sweep {
        let sweep = modularity_sweep(&matrix, args.k, semantics, &aggregation)?;
        let _ = writeln!(out, "checked {} (P1, P2, move) triples with P1 refining P2", sweep.checked);
        let _ = writeln!(out, "submodularity violations: {}", sweep.submodularity_violations);
        let _ = writeln!(out, "supermodularity violations: {}", sweep.supermodularity_violations);
        return Ok(0);
    }

    let (p1, p2, mv) = match (&args.p1, &args.p2, &args.mv) {
        (Some(a), Some(b), Some(m)) => (parse_partition(&matrix, a)?, parse_partition(&matrix, b)?, parse_move(&matrix, m)?),
        (None, None, None) => {
            let name = args.instance.fixture.as_deref().unwrap_or_default();
            fixture_modularity_case(name).ok_or_else(|| {
                CliError::Usage("give --p1, --p2 and --move, or use --fixture proof1 / proof2, or --sweep".into())
            })?
        }
        _ => return Err(CliError::Usage("--p1, --p2 and --move go together".into())),
    };
    let r = check_modularity_violation(&matrix, args.k, &p1, &p2, mv, semantics, &aggregation)?;
    let _ = writeln!(
        out,
        "({}, {}, {}, {})",
        fmt_score(r.obj_p1),
        fmt_score(r.obj_p2),
        fmt_score(r.obj_p1_moved),
        fmt_score(r.obj_p2_moved)
    );
    let _ = writeln!(out, "Obj(P1) = {}, Obj(P2) = {}, Obj(P1;mu) = {}, Obj(P2;mu) = {}", r.obj_p1, r.obj_p2, r.obj_p1_moved, r.obj_p2_moved);
    let _ = writeln!(out, "{}", if r.submodularity_violated { "submodularity violated" } else { "submodularity inequality holds" });
    let _ = writeln!(out, "{}", if r.supermodularity_violated { "supermodularity violated" } else { "supermodularity inequality holds" });
    if let FormatArg::Csv = args.format {
        let _ = writeln!(out, "obj_p1,obj_p2,obj_p1_moved,obj_p2_moved,submodularity_violated,supermodularity_violated");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.obj_p1, r.obj_p2, r.obj_p1_moved, r.obj_p2_moved, r.submodularity_violated, r.supermodularity_violated
        );
    }
    Ok(0)
}

fn cmd_export(args: &ExportArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let matrix = load_instance(&args.instance)?;
    let model = export_ip_model(&matrix, args.algo.k, args.algo.groups, args.algo.semantics.into(), &args.algo.aggregation.into())?;
    emit(&model.to_lp_string(), args.out.as_deref(), out)?;
    Ok(0)
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let scale = RatingScale::new(args.r_min, args.r_max)?;
    let matrix = generate_synthetic(args.users, args.items, scale, args.seed, Distribution::UniformInteger)?;
    let mut buf = Vec::new();
    write_ratings_csv(&matrix, &mut buf)?;
    emit(&String::from_utf8_lossy(&buf), args.out.as_deref(), out)?;
    Ok(0)
}

/// Runs one parsed command.
pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Form(a) => cmd_form(a, out),
        Command::Exact(a) => cmd_exact(a, out, err),
        Command::Baseline(a) => cmd_baseline(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Modularity(a) => cmd_modularity(a, out),
        Command::ExportIp(a) => cmd_export(a, out),
        Command::Gen(a) => cmd_gen(a, out),
    }
}

/// Parses `argv` (program name first) and runs it, returning the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
