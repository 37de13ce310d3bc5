//! Command-line front end: `analyze` one MPS file or run a `suite`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qipm_bound::classical::ExternalConfig;
use qipm_bound::harness::{analyze_instance, emit_report, instance_seed, run_suite, AnalysisConfig, Format, CONFIG_ENV};

#[derive(Parser)]
#[command(name = "qipm-bound", version, about = "Quantum IPM runtime lower bounds for LP instances")]
struct Cli {
    /// TOML configuration file (default: the file named by QIPM_BOUND_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one instance and print its record as JSON.
    Analyze {
        /// MPS file.
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Analyze every MPS file below a directory and write reports.
    Suite {
        /// Root directory; the first subdirectory of each file names its family.
        dir: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Comma-separated report formats: csv, json, svg.
        #[arg(long, default_value = "csv,json,svg", value_delimiter = ',')]
        formats: Vec<String>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Shortest cycle duration of the grid in seconds (default 1e-15).
        #[arg(long)]
        duration_min: Option<f64>,
        /// Longest cycle duration of the grid in seconds (default 1e-3).
        #[arg(long)]
        duration_max: Option<f64>,
        /// Logarithmically spaced grid points (default 121).
        #[arg(long)]
        duration_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Random seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Target precision (default 0.1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seconds for the iterative smallest-singular-value stage (default 60).
    #[arg(long)]
    sigma_min_timeout: Option<f64>,
    /// Random samples of the fallback estimator (default 10000).
    #[arg(long)]
    sigma_min_samples: Option<usize>,
    /// External solver command; `{mps}` is replaced by the instance path.
    #[arg(long)]
    classical_cmd: Option<String>,
    /// External solver timeout in seconds (default 600).
    #[arg(long)]
    classical_timeout: Option<f64>,
}

impl Common {
    fn apply(&self, cfg: &mut AnalysisConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = self.sigma_min_timeout {
            cfg.sigma_min_timeout_s = v;
        }
        if let Some(v) = self.sigma_min_samples {
            cfg.sigma_min_samples = v;
        }
        if let Some(cmd) = &self.classical_cmd {
            let ext = cfg.external.get_or_insert_with(ExternalConfig::default);
            ext.command_template = cmd.clone();
        }
        if let (Some(t), Some(ext)) = (self.classical_timeout, cfg.external.as_mut()) {
            ext.timeout_s = t;
        }
    }
}

fn load_config(path: Option<&Path>) -> qipm_bound::Result<AnalysisConfig> {
    let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(from_env) {
        Some(p) => AnalysisConfig::load(&p),
        None => Ok(AnalysisConfig::default()),
    }
}

fn run(cli: Cli) -> qipm_bound::Result<bool> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Analyze { file, common } => {
            common.apply(&mut cfg);
            cfg.validate()?;
            let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let seed = instance_seed(cfg.seed, &name);
            let rec = analyze_instance(&file, &name, "misc", &cfg, seed);
            let json = serde_json::to_string_pretty(&rec)
                .map_err(|e| qipm_bound::Error::Config(format!("cannot serialize record: {e}")))?;
            println!("{json}");
            Ok(!rec.errored())
        }
        Command::Suite { dir, out, formats, workers, duration_min, duration_max, duration_points, common } => {
            common.apply(&mut cfg);
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(v) = duration_min {
                cfg.durations.min = v;
            }
            if let Some(v) = duration_max {
                cfg.durations.max = v;
            }
            if let Some(v) = duration_points {
                cfg.durations.points = v;
            }
            let formats = formats.iter().map(|f| f.parse()).collect::<qipm_bound::Result<Vec<Format>>>()?;
            let report = run_suite(&dir, &cfg)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            for path in emit_report(&report, &formats, &out)? {
                eprintln!("wrote {}", path.display());
            }
            let errored = report.errored();
            eprintln!("{} instance(s), {} with errors", report.records.len(), errored);
            Ok(errored == 0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
