//! Experiment driver: generate a scenario, reduce it, run the baselines,
//! compare, plot, and write a JSON summary.
//!
//! A config names one of the built-in experiments and may override the
//! generator, reduction, baseline, comparison and output settings:
//!
//! ```json
//! {
//!   "name": "outlier",
//!   "generator": { "n": 100, "seed": 3 },
//!   "reduce": { "target_count": 10, "seed": 3 },
//!   "baselines": { "kmeans": true, "random": false },
//!   "outputs": { "dir": "out/outlier" }
//! }
//! ```
//!
//! Unknown keys are rejected. Omitted sample and target counts take the
//! experiment's defaults (see [`Experiment::default_sizes`]).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{kmeans_reduce, random_select, DEFAULT_KMEANS_ITERS};
use crate::error::{Error, Result};
use crate::gradient::stationarity_residual;
use crate::io::{write_histogram_csv, write_point_set};
use crate::metrics::{compare, CompareOptions, CompareReport, DEFAULT_BINS, DEFAULT_RANGE};
use crate::mixture::DiracMixture;
use crate::optim::Status;
use crate::reduce::{reduce, ReduceConfig};
use crate::scenario::{generate, Scenario, OUTLIER_LOCATION, ZEBRA_STRIPES};
use crate::svg::{histogram_svg, scatter_svg};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Standard-normal samples reduced to a few points.
    Normal,
    /// Four-mode Gaussian mixture; reports mode allocation counts.
    Gm,
    /// Standard-normal samples compared by marginal histograms.
    Histograms,
    /// Normal samples with one point moved to `[3.5, 3.5]`.
    Outlier,
    /// Normal samples with three vertical stripes removed.
    Zebra,
}

impl Experiment {
    pub const NAMES: [&'static str; 5] = ["normal", "gm", "histograms", "outlier", "zebra"];

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "normal" => Experiment::Normal,
            "gm" => Experiment::Gm,
            "histograms" => Experiment::Histograms,
            "outlier" => Experiment::Outlier,
            "zebra" => Experiment::Zebra,
            other => {
                return Err(Error::Config(format!(
                    "unknown experiment `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn scenario(self) -> Scenario {
        match self {
            Experiment::Normal | Experiment::Histograms => Scenario::Normal,
            Experiment::Gm => Scenario::Gm,
            Experiment::Outlier => Scenario::Outlier,
            Experiment::Zebra => Scenario::Zebra,
        }
    }

    /// Default `(sample count, target count)`.
    pub fn default_sizes(self) -> (usize, usize) {
        match self {
            Experiment::Normal => (2000, 10),
            Experiment::Gm => (4000, 40),
            Experiment::Histograms => (1000, 20),
            Experiment::Outlier => (100, 10),
            Experiment::Zebra => (2500, 25),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n: 0,
            dim: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub kmeans: bool,
    pub random: bool,
    pub kmeans_iters: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            kmeans: true,
            random: false,
            kmeans_iters: DEFAULT_KMEANS_ITERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub bins: usize,
    pub range: (f64, f64),
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            range: DEFAULT_RANGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for every output file; created if missing.
    pub dir: PathBuf,
    pub point_sets: bool,
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            point_sets: true,
            plots: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub generator: GeneratorConfig,
    #[serde(default)]
    pub reduce: ReduceConfig,
    #[serde(default)]
    pub baselines: BaselineConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl ExperimentConfig {
    /// Parses a config and fills omitted sample and target counts with the
    /// experiment defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let name = value
            .get("name")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Config("missing string field `name`".into()))?;
        let (n, l) = Experiment::from_name(name)?.default_sizes();
        if let Some(obj) = value.as_object_mut() {
            for (section, key, default) in [("generator", "n", n), ("reduce", "target_count", l)] {
                let entry = obj
                    .entry(section)
                    .or_insert_with(|| serde_json::json!({}));
                if let Some(inner) = entry.as_object_mut() {
                    inner.entry(key).or_insert_with(|| default.into());
                }
            }
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| e.in_stage(format!("config {}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub target_count: usize,
    pub c_b: f64,
    pub seed: u64,
    pub status: Status,
    pub iterations: usize,
    pub distance: f64,
    /// Max-abs difference between reduced and original means.
    pub mean_deviation: f64,
    pub stationarity_max_abs: f64,
    /// `1e-4 · M · spread`, the bound the residual is checked against.
    pub stationarity_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierSummary {
    pub location: Vec<f64>,
    /// Per method, the smallest distance from a reduced point to the outlier.
    pub min_distance: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub scenario: String,
    pub samples_requested: usize,
    pub original_count: usize,
    pub dim: usize,
    pub generator_seed: u64,
    pub reduction: ReductionSummary,
    pub compare: CompareReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outlier: Option<OutlierSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stripes: Option<Vec<(f64, f64)>>,
    /// Output file names relative to the output directory.
    pub files: Vec<String>,
}

fn min_distance(m: &DiracMixture, target: &[f64]) -> f64 {
    m.points()
        .map(|p| {
            p.iter()
                .zip(target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Runs the experiment and writes its outputs. Errors carry the name of the
/// stage that failed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let experiment = Experiment::from_name(&cfg.name)?;
    let scenario = experiment.scenario();
    let gen = &cfg.generator;
    let original = generate(scenario, gen.n, gen.dim, gen.seed).map_err(|e| e.in_stage("generate"))?;

    let (lcd, trace) = reduce(&original, &cfg.reduce).map_err(|e| e.in_stage("reduce"))?;
    let mut methods = vec![("lcd".to_string(), lcd)];
    let l = cfg.reduce.target_count;
    if cfg.baselines.kmeans {
        let k = kmeans_reduce(&original, l, cfg.reduce.seed, cfg.baselines.kmeans_iters)
            .map_err(|e| e.in_stage("kmeans"))?;
        methods.push(("kmeans".to_string(), k));
    }
    if cfg.baselines.random {
        let r = random_select(&original, l, cfg.reduce.seed).map_err(|e| e.in_stage("random"))?;
        methods.push(("random".to_string(), r));
    }

    let opts = CompareOptions {
        bins: cfg.compare.bins,
        range: cfg.compare.range,
        c_b: cfg.reduce.c_b,
        mode_centers: scenario.mode_centers(),
    };
    let report = compare(&original, &methods, &opts).map_err(|e| e.in_stage("compare"))?;

    let lcd = &methods[0].1;
    let residual = stationarity_residual(lcd, &original)
        .map_err(|e| e.in_stage("stationarity"))?
        .max_abs();
    let reduction = ReductionSummary {
        target_count: l,
        c_b: cfg.reduce.c_b,
        seed: cfg.reduce.seed,
        status: trace.status,
        iterations: trace.iterations(),
        distance: trace.final_report.total,
        mean_deviation: max_abs_diff(&lcd.mean(), &original.mean()),
        stationarity_max_abs: residual,
        stationarity_bound: 1e-4 * original.len() as f64 * original.spread(),
    };
    let outlier = (scenario == Scenario::Outlier).then(|| OutlierSummary {
        location: OUTLIER_LOCATION.to_vec(),
        min_distance: methods
            .iter()
            .map(|(name, m)| (name.clone(), min_distance(m, &OUTLIER_LOCATION)))
            .collect(),
    });

    let out = &cfg.outputs;
    let write_stage = |e: Error| e.in_stage("write outputs");
    fs::create_dir_all(&out.dir).map_err(|e| write_stage(e.into()))?;
    let mut files = Vec::new();
    let mut record = |name: &str| {
        files.push(name.to_string());
        out.dir.join(name)
    };
    if out.point_sets {
        write_point_set(&original, record("original.csv")).map_err(write_stage)?;
        for (name, m) in &methods {
            write_point_set(m, record(&format!("{name}.csv"))).map_err(write_stage)?;
        }
    }
    fs::write(record("trace.json"), to_json_text(&trace)?).map_err(|e| write_stage(e.into()))?;
    write_histogram_csv(&original, &methods, opts.bins, opts.range, record("histograms.csv"))
        .map_err(write_stage)?;
    if out.plots {
        let svg = scatter_svg(&original, &methods).map_err(|e| e.in_stage("plot"))?;
        fs::write(record("scatter.svg"), svg).map_err(|e| write_stage(e.into()))?;
        let svg = histogram_svg(&original, &methods, opts.bins, opts.range)
            .map_err(|e| e.in_stage("plot"))?;
        fs::write(record("histograms.svg"), svg).map_err(|e| write_stage(e.into()))?;
    }
    let summary_path = record("summary.json");

    let summary = ExperimentSummary {
        experiment: cfg.name.clone(),
        scenario: scenario.name().to_string(),
        samples_requested: gen.n,
        original_count: original.len(),
        dim: original.dim(),
        generator_seed: gen.seed,
        reduction,
        compare: report,
        outlier,
        stripes: (scenario == Scenario::Zebra).then(|| ZEBRA_STRIPES.to_vec()),
        files,
    };
    fs::write(summary_path, to_json_text(&summary)?).map_err(|e| write_stage(e.into()))?;
    Ok(summary)
}
