//! Command-line front end. Exit status 0 on success, 1 on usage errors, 2 on
//! data errors (bad files, invalid values, failed runs).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use lcd_reduce::baselines::{kmeans_reduce, random_select, DEFAULT_KMEANS_ITERS};
use lcd_reduce::distance::{distance_approx, distance_exact, DEFAULT_C_B};
use lcd_reduce::experiment::{run_experiment, to_json_text, ExperimentConfig};
use lcd_reduce::gradient::KappaMode;
use lcd_reduce::io::{format_point_set, read_point_set, write_histogram_csv};
use lcd_reduce::metrics::{compare, CompareOptions, DEFAULT_BINS, DEFAULT_RANGE};
use lcd_reduce::reduce::{reduce, ReduceConfig};
use lcd_reduce::scenario::{four_mode_spec, generate, Scenario};
use lcd_reduce::svg::{histogram_svg, scatter_svg};
use lcd_reduce::{DiracMixture, Result};

#[derive(Parser)]
#[command(name = "lcd-reduce", version, about = "Reduce weighted point sets to fewer equally weighted points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples of a test scenario.
    Generate {
        #[arg(value_enum)]
        scenario: ScenarioArg,
        /// Number of samples (before stripe removal for `zebra`).
        #[arg(long)]
        n: usize,
        /// Dimension; only `normal` supports values other than 2.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a point set to L equally weighted points.
    Reduce {
        input: PathBuf,
        #[command(flatten)]
        reduce: ReduceArgs,
        /// Reduced point set; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optimization trace as JSON. Printed to stdout when omitted and
        /// `--out` is given.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Distance between a reduced and an original point set.
    Distance {
        reduced: PathBuf,
        original: PathBuf,
        /// Penalty constant of the large-width distance.
        #[arg(long, conflicts_with = "b_max")]
        cb: Option<f64>,
        /// Use the exact distance with this largest kernel width.
        #[arg(long)]
        b_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce with a baseline method.
    Baseline {
        #[arg(value_enum)]
        method: BaselineArg,
        input: PathBuf,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lloyd iteration cap for k-means.
        #[arg(long, default_value_t = DEFAULT_KMEANS_ITERS)]
        max_iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare reductions with their original.
    Compare {
        original: PathBuf,
        /// Reduced point sets, named by file stem in the report.
        #[arg(required = true)]
        reduced: Vec<PathBuf>,
        #[command(flatten)]
        hist: HistArgs,
        #[arg(long, default_value_t = DEFAULT_C_B)]
        cb: f64,
        /// Count reduced points nearest to each mode of a known scenario.
        #[arg(long, value_enum)]
        modes: Option<ModesArg>,
        /// JSON report; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Marginal histograms of all sets as CSV.
        #[arg(long)]
        hist_csv: Option<PathBuf>,
    },
    /// Draw point sets as SVG.
    Plot {
        #[arg(value_enum)]
        kind: PlotKind,
        original: PathBuf,
        /// Reduced point sets drawn on top; repeatable.
        #[arg(long)]
        reduced: Vec<PathBuf>,
        #[command(flatten)]
        hist: HistArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config.
    Experiment { config: PathBuf },
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long = "L")]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_C_B)]
    cb: f64,
    #[arg(long, value_enum, default_value_t = KappaArg::CbMinusOne)]
    kappa: KappaArg,
    #[arg(long, default_value_t = 1)]
    multistart: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

#[derive(Args)]
struct HistArgs {
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = DEFAULT_RANGE.0, allow_hyphen_values = true)]
    range_min: f64,
    #[arg(long, default_value_t = DEFAULT_RANGE.1, allow_hyphen_values = true)]
    range_max: f64,
}

impl HistArgs {
    fn range(&self) -> (f64, f64) {
        (self.range_min, self.range_max)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Normal,
    Gm,
    Outlier,
    Zebra,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Kmeans,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum KappaArg {
    /// Exact derivative of the distance (`C_b - 1`).
    CbMinusOne,
    /// `C_b`.
    Cb,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModesArg {
    /// The four modes of the `gm` scenario.
    Gm,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    Scatter,
    Histogram,
}

/// Writes to `path`, or stdout when `path` is `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn point_set_bytes(m: &DiracMixture) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    format_point_set(m, &mut buf)?;
    Ok(buf)
}

fn named_sets(paths: &[PathBuf]) -> Result<Vec<(String, DiracMixture)>> {
    paths
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
            Ok((name, read_point_set(p)?))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            scenario,
            n,
            dim,
            seed,
            out,
        } => {
            let scenario = match scenario {
                ScenarioArg::Normal => Scenario::Normal,
                ScenarioArg::Gm => Scenario::Gm,
                ScenarioArg::Outlier => Scenario::Outlier,
                ScenarioArg::Zebra => Scenario::Zebra,
            };
            let m = generate(scenario, n, dim, seed)?;
            emit(out.as_deref(), &point_set_bytes(&m)?)
        }
        Command::Reduce {
            input,
            reduce: args,
            out,
            trace,
        } => {
            let original = read_point_set(&input)?;
            let cfg = ReduceConfig {
                target_count: args.l,
                c_b: args.cb,
                kappa: match args.kappa {
                    KappaArg::CbMinusOne => KappaMode::CbMinusOne,
                    KappaArg::Cb => KappaMode::Cb,
                },
                seed: args.seed,
                multistart: args.multistart,
                max_iters: args.max_iters,
                ..ReduceConfig::default()
            };
            let (reduced, t) = reduce(&original, &cfg)?;
            emit(out.as_deref(), &point_set_bytes(&reduced)?)?;
            let trace_json = to_json_text(&t)?;
            match (trace, &out) {
                (Some(p), _) => emit(Some(&p), trace_json.as_bytes()),
                (None, Some(_)) => emit(None, trace_json.as_bytes()),
                (None, None) => Ok(()),
            }
        }
        Command::Distance {
            reduced,
            original,
            cb,
            b_max,
            out,
        } => {
            let x = read_point_set(&reduced)?;
            let y = read_point_set(&original)?;
            let report = match b_max {
                Some(b) => distance_exact(&x, &y, b)?,
                None => distance_approx(&x, &y, cb.unwrap_or(DEFAULT_C_B))?,
            };
            emit(out.as_deref(), to_json_text(&report)?.as_bytes())
        }
        Command::Baseline {
            method,
            input,
            l,
            seed,
            max_iters,
            out,
        } => {
            let original = read_point_set(&input)?;
            let m = match method {
                BaselineArg::Kmeans => kmeans_reduce(&original, l, seed, max_iters)?,
                BaselineArg::Random => random_select(&original, l, seed)?,
            };
            emit(out.as_deref(), &point_set_bytes(&m)?)
        }
        Command::Compare {
            original,
            reduced,
            hist,
            cb,
            modes,
            out,
            hist_csv,
        } => {
            let y = read_point_set(&original)?;
            let sets = named_sets(&reduced)?;
            let opts = CompareOptions {
                bins: hist.bins,
                range: hist.range(),
                c_b: cb,
                mode_centers: modes.map(|ModesArg::Gm| four_mode_spec().means()),
            };
            let report = compare(&y, &sets, &opts)?;
            emit(out.as_deref(), to_json_text(&report)?.as_bytes())?;
            if let Some(p) = hist_csv {
                write_histogram_csv(&y, &sets, opts.bins, opts.range, p)?;
            }
            Ok(())
        }
        Command::Plot {
            kind,
            original,
            reduced,
            hist,
            out,
        } => {
            let y = read_point_set(&original)?;
            let sets = named_sets(&reduced)?;
            let svg = match kind {
                PlotKind::Scatter => scatter_svg(&y, &sets)?,
                PlotKind::Histogram => histogram_svg(&y, &sets, hist.bins, hist.range())?,
            };
            emit(out.as_deref(), svg.as_bytes())
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::read(&config)?;
            let summary = run_experiment(&cfg)?;
            let mut msg = String::new();
            for f in &summary.files {
                msg.push_str(&format!("wrote {}\n", cfg.outputs.dir.join(f).display()));
            }
            emit(None, msg.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let rendered = e.render().to_string();
            if e.use_stderr() && !rendered.contains("Usage:") && e.kind() != ErrorKind::DisplayHelp {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
