//! Run configuration, manifests and deterministic result documents.
//!
//! Documents contain only inputs and results. Wall time, worker count and
//! timestamps are left out so that re-runs produce identical bytes.

use std::io::Write;
use std::path::PathBuf;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::charsum::SquaresBoundRow;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::sets::{DichotomyRow, SetRecipe, Thresholds};
use crate::stats::{
    compare_to_prediction, ClassifierPath, ExperimentConfig, ExperimentResult, FitReport, Mode, DEFAULT_BUDGET,
    DEFAULT_SAMPLES, EXHAUSTIVE_SHARD, MONTE_CARLO_SHARD,
};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const STATS_CSV_HEADER: [&str; 7] = ["s", "count", "empirical", "predicted", "delta", "sqrtq_delta", "paper_delta"];
pub const SCALING_CSV_HEADER: [&str; 8] =
    ["q", "s", "count", "empirical", "predicted", "delta", "sqrtq_delta", "paper_delta"];
pub const FIT_CSV_HEADER: [&str; 7] =
    ["s", "points", "max_sqrtq_delta", "median_sqrtq_delta", "slope", "intercept", "exact_points"];
pub const DICHOTOMY_CSV_HEADER: [&str; 4] = ["q", "size", "ratio", "class"];
pub const IRREG_CSV_HEADER: [&str; 7] =
    ["q", "irregularity", "bound", "margin", "min_frequency", "frequency_bound", "holds"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u64,
    #[serde(default = "one")]
    pub k: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl OutputConfig {
    pub fn is_empty(&self) -> bool {
        self.json.is_none() && self.csv.is_none()
    }
}

/// One experiment, as read from a config file and echoed in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub n: usize,
    /// One recipe per coefficient, or a single recipe used for all of them.
    pub sets: Vec<SetRecipe>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub force_general_path: bool,
    #[serde(default, skip_serializing_if = "OutputConfig::is_empty")]
    pub output: OutputConfig,
}

fn default_mode() -> Mode {
    Mode::MonteCarlo { samples: DEFAULT_SAMPLES, seed: 0 }
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl RunConfig {
    /// Parses a config document, or a result document whose manifest carries one.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config is not JSON: {e}")))?;
        let inner = match value.get("manifest").and_then(|m| m.get("config")) {
            Some(cfg) => cfg.clone(),
            None => value,
        };
        serde_json::from_value(inner).map_err(|e| Error::InvalidConfig(format!("bad config: {e}")))
    }

    pub fn field_spec(&self) -> Result<FieldSpec> {
        FieldSpec::new(self.field.p, self.field.k)
    }

    pub fn experiment(&self, workers: usize) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig::new(&self.field_spec()?, self.n, &self.sets, self.mode)?
            .with_budget(self.budget)
            .with_general_path(self.force_general_path)
            .with_workers(workers))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    /// Defining polynomial of the field, coefficients low to high.
    pub modulus: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prng: Option<&'static str>,
    pub shard_size: u64,
    pub logical_shards: u64,
    pub classifier: ClassifierPath,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fraction {
    pub numerator: String,
    pub denominator: String,
}

impl From<&BigRational> for Fraction {
    fn from(r: &BigRational) -> Self {
        Fraction { numerator: r.numer().to_string(), denominator: r.denom().to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactRow {
    pub empirical: Fraction,
    pub predicted: Fraction,
    pub delta: Fraction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub s: String,
    pub count: u64,
    pub empirical: String,
    pub predicted: String,
    pub delta: String,
    pub sqrt_q_delta: String,
    #[serde(rename = "paper_scale_delta")]
    pub scaled_delta: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetEntry {
    pub recipe: SetRecipe,
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub tuples: u64,
    pub types: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultDocument {
    pub manifest: RunManifest,
    pub q: u32,
    pub n: usize,
    pub sets: Vec<SetEntry>,
    pub mode: Mode,
    pub rows: Vec<ResultRow>,
    pub totals: Totals,
}

/// Fixed-point decimal with 17 significant digits; `.` separator.
pub fn decimal17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits = mantissa.replace('.', "");
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if exp < 16 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("{digits}{}.0", "0".repeat(exp as usize - 16))
    };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

pub fn result_document(config: &RunConfig, result: &ExperimentResult) -> ResultDocument {
    let seed = match result.mode {
        Mode::MonteCarlo { seed, .. } => Some(seed),
        Mode::Exhaustive => None,
    };
    let shard_size = match result.mode {
        Mode::MonteCarlo { .. } => MONTE_CARLO_SHARD,
        Mode::Exhaustive => EXHAUSTIVE_SHARD,
    };
    let rows = compare_to_prediction(result)
        .into_iter()
        .map(|r| ResultRow {
            s: r.s.to_string(),
            count: r.count,
            empirical: decimal17(r.empirical),
            predicted: decimal17(r.predicted),
            delta: decimal17(r.delta),
            sqrt_q_delta: decimal17(r.sqrt_q_delta),
            scaled_delta: decimal17(r.scaled_delta),
            std_error: r.std_error.map(decimal17),
            exact: r.exact.as_ref().map(|e| ExactRow {
                empirical: (&e.empirical).into(),
                predicted: (&e.predicted).into(),
                delta: (&e.delta).into(),
            }),
        })
        .collect();
    ResultDocument {
        manifest: RunManifest {
            tool: TOOL,
            version: VERSION,
            config: config.clone(),
            modulus: result.modulus.clone(),
            seed,
            prng: result.prng,
            shard_size,
            logical_shards: result.logical_shards,
            classifier: result.path,
        },
        q: result.q,
        n: result.n,
        sets: result.sets.iter().map(|s| SetEntry { recipe: s.recipe.clone(), size: s.size }).collect(),
        mode: result.mode,
        rows,
        totals: Totals { tuples: result.total, types: result.types.len() },
    }
}

pub fn to_json(doc: &ResultDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

fn csv_string<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn stats_csv(doc: &ResultDocument) -> String {
    csv_string(
        STATS_CSV_HEADER,
        doc.rows.iter().map(|r| {
            [
                r.s.clone(),
                r.count.to_string(),
                r.empirical.clone(),
                r.predicted.clone(),
                r.delta.clone(),
                r.sqrt_q_delta.clone(),
                r.scaled_delta.clone(),
            ]
        }),
    )
}

pub fn scaling_csv(docs: &[ResultDocument]) -> String {
    csv_string(
        SCALING_CSV_HEADER,
        docs.iter().flat_map(|d| {
            d.rows.iter().map(move |r| {
                [
                    d.q.to_string(),
                    r.s.clone(),
                    r.count.to_string(),
                    r.empirical.clone(),
                    r.predicted.clone(),
                    r.delta.clone(),
                    r.sqrt_q_delta.clone(),
                    r.scaled_delta.clone(),
                ]
            })
        }),
    )
}

pub fn fit_csv(fits: &[(String, FitReport)]) -> String {
    csv_string(
        FIT_CSV_HEADER,
        fits.iter().map(|(s, f)| {
            [
                s.clone(),
                f.points.len().to_string(),
                decimal17(f.max_sqrt_q_delta),
                decimal17(f.median_sqrt_q_delta),
                f.slope.map_or_else(|| "exact".to_string(), decimal17),
                f.intercept.map_or_else(String::new, decimal17),
                f.exact_points.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" "),
            ]
        }),
    )
}

pub fn dichotomy_csv(rows: &[DichotomyRow]) -> String {
    csv_string(
        DICHOTOMY_CSV_HEADER,
        rows.iter().map(|r| [r.q.to_string(), r.size.to_string(), decimal17(r.ratio), r.class.to_string()]),
    )
}

pub fn irreg_csv(rows: &[SquaresBoundRow]) -> String {
    csv_string(
        IRREG_CSV_HEADER,
        rows.iter().map(|r| {
            [
                r.q.to_string(),
                decimal17(r.irregularity),
                decimal17(r.bound),
                decimal17(r.margin),
                decimal17(r.min_frequency),
                decimal17(r.frequency_bound),
                r.holds.to_string(),
            ]
        }),
    )
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &std::path::Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    f.flush()
}
