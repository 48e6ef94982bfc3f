//! Rating ingestion, synthetic instances and report serialization.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{average_group_satisfaction, group_size_summary, SizeSummary};
use crate::config::AlgorithmConfig;
use crate::error::{Error, Result};
use crate::matrix::{RatingMatrix, RatingScale};
use crate::outcome::GroupingOutcome;

/// What to do with (user, item) pairs absent from the input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MissingPolicy {
    #[default]
    Error,
    /// Use the scale minimum.
    FillMin,
    /// Use the item's mean observed rating, rounded and clamped to the scale.
    FillItemMean,
}

impl FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "error" => Ok(MissingPolicy::Error),
            "fill-min" => Ok(MissingPolicy::FillMin),
            "fill-item-mean" => Ok(MissingPolicy::FillItemMean),
            other => Err(Error::Config(format!("unknown missing-rating policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IngestPolicy {
    pub missing: MissingPolicy,
    pub scale: RatingScale,
}

const MAX_REPORTED_MISSING: usize = 10;

/// Reads `user_id,item_id,rating` lines. A first line whose rating field is
/// not a number is taken as a header. Ids become dense indices in order of
/// first appearance and are kept as the matrix labels.
pub fn parse_ratings_csv<R: Read>(reader: R, policy: &IngestPolicy) -> Result<RatingMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut users: HashMap<String, usize> = HashMap::new();
    let mut items: HashMap<String, usize> = HashMap::new();
    let mut user_labels = Vec::new();
    let mut item_labels = Vec::new();
    let mut triples: Vec<(usize, usize, f64, usize)> = Vec::new();

    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        let line = rdr.position().line() as usize;
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(line, |p| p.line() as usize);
                return Err(Error::Parse { line, message: e.to_string() });
            }
        }
        let line = record.position().map_or(line, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(Error::Parse { line, message: format!("expected 3 fields, found {}", record.len()) });
        }
        let value = record[2].parse::<f64>();
        if first {
            first = false;
            if value.is_err() {
                continue;
            }
        }
        let value = value.map_err(|_| Error::Parse { line, message: format!("rating {:?} is not a number", &record[2]) })?;
        if !value.is_finite() {
            return Err(Error::Parse { line, message: format!("rating {value} is not finite") });
        }
        if !policy.scale.contains(value) {
            return Err(Error::OutOfRange {
                value,
                min: policy.scale.r_min(),
                max: policy.scale.r_max(),
                line,
            });
        }
        let intern = |map: &mut HashMap<String, usize>, labels: &mut Vec<String>, key: &str| {
            *map.entry(key.to_string()).or_insert_with(|| {
                labels.push(key.to_string());
                labels.len() - 1
            })
        };
        let u = intern(&mut users, &mut user_labels, &record[0]);
        let i = intern(&mut items, &mut item_labels, &record[1]);
        triples.push((u, i, value, line));
    }
    if triples.is_empty() {
        return Err(Error::Parse { line: 1, message: "no ratings found".into() });
    }

    let (n, m) = (user_labels.len(), item_labels.len());
    let mut ratings = vec![f64::NAN; n * m];
    for &(u, i, value, line) in &triples {
        let cell = u * m + i;
        if !ratings[cell].is_nan() {
            return Err(Error::Duplicate { user: user_labels[u].clone(), item: item_labels[i].clone(), line });
        }
        ratings[cell] = value;
    }

    let missing: Vec<usize> = (0..n * m).filter(|&c| ratings[c].is_nan()).collect();
    if !missing.is_empty() {
        match policy.missing {
            MissingPolicy::Error => {
                let examples = missing
                    .iter()
                    .take(MAX_REPORTED_MISSING)
                    .map(|&c| format!("({}, {})", user_labels[c / m], item_labels[c % m]))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(Error::Incomplete { missing: missing.len(), examples });
            }
            MissingPolicy::FillMin => {
                for c in missing {
                    ratings[c] = policy.scale.r_min();
                }
            }
            MissingPolicy::FillItemMean => {
                let mut sum = vec![0.0; m];
                let mut count = vec![0usize; m];
                for &(_, i, value, _) in &triples {
                    sum[i] += value;
                    count[i] += 1;
                }
                for c in missing {
                    let i = c % m;
                    ratings[c] = policy.scale.clamp((sum[i] / count[i] as f64).round());
                }
            }
        }
    }

    RatingMatrix::from_row_major(n, m, ratings, policy.scale)?.with_labels(user_labels, item_labels)
}

pub fn load_ratings_csv(path: impl AsRef<Path>, policy: &IngestPolicy) -> Result<RatingMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_ratings_csv(BufReader::new(file), policy)
}

/// Writes the matrix as `user_id,item_id,rating` lines with a header.
pub fn write_ratings_csv<W: Write>(matrix: &RatingMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(["user_id", "item_id", "rating"]).map_err(ser)?;
    for u in 0..matrix.n_users() {
        for i in 0..matrix.n_items() {
            let rating = matrix.score(u, i).to_string();
            w.write_record([matrix.user_label(u), matrix.item_label(i), rating.as_str()]).map_err(ser)?;
        }
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}

pub fn save_ratings_csv(matrix: &RatingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_ratings_csv(matrix, BufWriter::new(file))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Distribution {
    /// Independent draws from the integers in `[r_min, r_max]`.
    #[default]
    UniformInteger,
}

pub fn generate_synthetic(n: usize, m: usize, scale: RatingScale, seed: u64, distribution: Distribution) -> Result<RatingMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::Config(format!("synthetic instance needs at least one user and item, got {n}×{m}")));
    }
    let (lo, hi) = (scale.r_min().ceil(), scale.r_max().floor());
    if lo > hi {
        return Err(Error::Config(format!("scale [{}, {}] contains no integer", scale.r_min(), scale.r_max())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratings = match distribution {
        Distribution::UniformInteger => {
            let (lo, hi) = (lo as i64, hi as i64);
            (0..n * m).map(|_| rng.random_range(lo..=hi) as f64).collect()
        }
    };
    RatingMatrix::from_row_major(n, m, ratings, scale)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub algorithm: String,
    pub semantics: String,
    pub aggregation: String,
    pub k: usize,
    pub groups: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportGroup {
    /// Dense user indices; see [`Report::users`] for the original ids.
    pub members: Vec<usize>,
    pub items: Vec<usize>,
    pub scores: Vec<f64>,
    pub satisfaction: f64,
}

/// Serialized result of one formation run. Field order is part of the format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ReportConfig,
    /// Original user id of every dense index.
    pub users: Vec<String>,
    /// Original item id of every dense index.
    pub items: Vec<String>,
    pub groups: Vec<ReportGroup>,
    pub objective: f64,
    pub avg_group_satisfaction: f64,
    pub size_summary: SizeSummary,
    /// Wall-clock time of the algorithm; left out unless asked for, so that
    /// reports are reproducible byte for byte.
    pub runtime_ms: Option<f64>,
}

impl Report {
    pub fn new(
        matrix: &RatingMatrix,
        outcome: &GroupingOutcome,
        config: &AlgorithmConfig,
        algorithm: &str,
        runtime_ms: Option<f64>,
    ) -> Result<Self> {
        let groups = outcome
            .groups()
            .iter()
            .map(|g| ReportGroup {
                members: g.members.clone(),
                items: g.top_k.items().to_vec(),
                scores: g.top_k.scores().to_vec(),
                satisfaction: g.satisfaction,
            })
            .collect();
        Ok(Self {
            config: ReportConfig {
                algorithm: algorithm.to_string(),
                semantics: config.semantics.to_string(),
                aggregation: config.aggregation.to_string(),
                k: config.k,
                groups: config.max_groups,
                seed: config.seed,
            },
            users: matrix.user_labels().to_vec(),
            items: matrix.item_labels().to_vec(),
            groups,
            objective: outcome.objective(),
            avg_group_satisfaction: average_group_satisfaction(matrix, outcome)?,
            size_summary: group_size_summary(outcome)?,
            runtime_ms,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// One row per group; ids are the original labels, lists are `;`-joined.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record([
            "algorithm",
            "semantics",
            "aggregation",
            "k",
            "group",
            "size",
            "members",
            "items",
            "scores",
            "satisfaction",
        ])
        .map_err(ser)?;
        let join = |parts: Vec<String>| parts.join(";");
        for (idx, g) in self.groups.iter().enumerate() {
            w.write_record([
                self.config.algorithm.clone(),
                self.config.semantics.clone(),
                self.config.aggregation.clone(),
                self.config.k.to_string(),
                (idx + 1).to_string(),
                g.members.len().to_string(),
                join(g.members.iter().map(|&u| self.users[u].clone()).collect()),
                join(g.items.iter().map(|&i| self.items[i].clone()).collect()),
                join(g.scores.iter().map(f64::to_string).collect()),
                g.satisfaction.to_string(),
            ])
            .map_err(ser)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

pub fn write_outcome(report: &Report, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let text = report.render(format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))
}
