//! Command-line front end for the graphon laboratory.
//!
//! Every subcommand reads an optional JSON config (`--config`), applies
//! flag overrides on top, runs the corresponding harness entry point,
//! and writes its report files into `--out-dir`. Exit codes: 0 success,
//! 2 usage or configuration error, 3 input file parse error,
//! 4 numerical or degenerate-input failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use graphonlab::harness::{
    ingest_edgelist, run_bounds, run_cutnorm, run_density, run_estimate, run_sample, run_spectrum,
    run_sweep, write_bounds_outputs, write_cutnorm_outputs, write_density_outputs,
    write_estimate_outputs, write_ingest_outputs, write_sample_outputs, write_spectrum_outputs,
    write_sweep_outputs, BoundsRunConfig, CutNormConfig, DensityConfig, EstimateRequest,
    EstimateSource, IngestConfig, OutputFormat, SampleConfig, SpectrumConfig, SweepConfig,
};
use graphonlab::io::{EdgeListOptions, Indexing};

#[derive(Parser)]
#[command(
    name = "graphonlab",
    version,
    about = "Numerical laboratory for graphons: sampling, spectra, bounds, norms, estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file for the subcommand; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory the report files are written into.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Which report files to write (commands without figures always
    /// write their fixed outputs).
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
    Both,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> OutputFormat {
        match arg {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Svg => OutputFormat::Svg,
            FormatArg::Both => OutputFormat::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw one graph sample and save it as JSON plus a dense matrix.
    Sample {
        /// Number of nodes, overriding the config.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Compute a graphon spectrum, optionally next to one sample's.
    Spectrum {
        /// Sample size for the comparison spectrum.
        #[arg(long)]
        n: Option<usize>,
        /// How many extreme eigenvalue pairs to report.
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Evaluate the three bound families over an n grid (no sampling).
    Bounds {
        /// Lipschitz constant L, overriding the config.
        #[arg(long)]
        lipschitz: Option<f64>,
        /// Piece count K, overriding the config.
        #[arg(long)]
        pieces: Option<usize>,
    },
    /// Run a full convergence sweep: samples, spectra, gaps, bounds.
    Sweep {
        /// Trials per n, overriding the config.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Estimate Lipschitz structure from a sample or a graph file.
    Estimate {
        /// Sample size when the source is a graphon (ignored for files).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Compute the cut norm between two graphons (requires --config).
    Cutnorm {
        /// Heuristic restarts, overriding the config.
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Compute homomorphism densities of the small motifs.
    Density {
        /// Sample size for empirical densities next to the graphon's.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Convert an edge-list file into a dense adjacency matrix.
    Ingest {
        /// Edge-list file; may also come from the config.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Treat node indices as starting from 1.
        #[arg(long)]
        one_indexed: bool,
        /// Do not mirror edges (the file must list both directions).
        #[arg(long)]
        no_symmetrize: bool,
        /// Keep only a seeded uniform node subsample of this size.
        #[arg(long)]
        subsample: Option<usize>,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<graphonlab::Error> for Failure {
    fn from(error: graphonlab::Error) -> Failure {
        use graphonlab::Error;
        let code = match &error {
            Error::Parameter(_) | Error::Validation(_) | Error::RefinementTooLarge { .. } => 2,
            Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 3,
            _ => 4,
        };
        Failure {
            code,
            message: error.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Loads the config file when given, otherwise the type's defaults.
fn load_config_or_default<T: DeserializeOwned + Default>(
    path: &Option<PathBuf>,
) -> Result<T, Failure> {
    match path {
        Some(path) => load_required_config(&Some(path.clone()), ""),
        None => Ok(T::default()),
    }
}

/// Loads a config file that the subcommand cannot do without.
fn load_required_config<T: DeserializeOwned>(
    path: &Option<PathBuf>,
    what: &str,
) -> Result<T, Failure> {
    let path = path.as_ref().ok_or_else(|| {
        Failure::usage(format!("this subcommand requires --config ({what})"))
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::usage(format!("cannot read config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::usage(format!("invalid config {}: {e}", path.display()))
    })
}

fn report_written(paths: &[PathBuf]) {
    for path in paths {
        println!("wrote {}", path.display());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let format = OutputFormat::from(cli.format);
    let out_dir: &Path = &cli.out_dir;
    match &cli.command {
        Command::Sample { n } => {
            let mut config: SampleConfig = load_config_or_default(&cli.config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(n) = n {
                config.n = *n;
            }
            let graph = run_sample(&config)?;
            let written = write_sample_outputs(&graph, out_dir)?;
            report_written(&written);
        }
        Command::Spectrum { n, top_k } => {
            let mut config: SpectrumConfig = load_config_or_default(&cli.config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if n.is_some() {
                config.n = *n;
            }
            if let Some(top_k) = top_k {
                config.top_k = *top_k;
            }
            let outcome = run_spectrum(&config)?;
            let written = write_spectrum_outputs(&outcome, out_dir)?;
            report_written(&written);
        }
        Command::Bounds { lipschitz, pieces } => {
            let mut config: BoundsRunConfig = load_config_or_default(&cli.config)?;
            if let Some(l) = lipschitz {
                config.bounds.l = *l;
            }
            if let Some(k) = pieces {
                config.bounds.k = *k;
            }
            let table = run_bounds(&config)?;
            let written = write_bounds_outputs(&table, &config, out_dir, format)?;
            report_written(&written);
            match table.crossover_n {
                Some(n) => println!("piecewise bound overtakes both others at n = {n}"),
                None => println!("no crossover inside the given n grid"),
            }
        }
        Command::Sweep { trials } => {
            let mut config: SweepConfig = load_config_or_default(&cli.config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(trials) = trials {
                config.trials = *trials;
            }
            let result = run_sweep(&config)?;
            let written = write_sweep_outputs(&result, config.top_k, out_dir, format)?;
            report_written(&written);
            if !result.reference_converged {
                eprintln!(
                    "note: reference spectrum hit the resolution cap before settling"
                );
            }
        }
        Command::Estimate { n } => {
            let mut request: EstimateRequest = load_config_or_default(&cli.config)?;
            if let EstimateSource::Sampled {
                seed: source_seed,
                n: source_n,
                ..
            } = &mut request.source
            {
                if let Some(seed) = cli.seed {
                    *source_seed = seed;
                }
                if let Some(n) = n {
                    *source_n = *n;
                }
            }
            let outcome = run_estimate(&request)?;
            let written = write_estimate_outputs(&outcome, out_dir, format)?;
            report_written(&written);
            println!(
                "global_L = {:.6} over {} pieces",
                outcome.estimate.global_l,
                outcome.estimate.partition_used.len()
            );
        }
        Command::Cutnorm { restarts } => {
            let mut config: CutNormConfig =
                load_required_config(&cli.config, "two graphon specs are needed")?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(restarts) = restarts {
                config.restarts = *restarts;
            }
            let result = run_cutnorm(&config)?;
            let written = write_cutnorm_outputs(&result, &config, out_dir)?;
            report_written(&written);
            println!(
                "cut norm {} {:.12}",
                if result.exact { "=" } else { ">=" },
                result.value
            );
        }
        Command::Density { n } => {
            let mut config: DensityConfig = load_config_or_default(&cli.config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if n.is_some() {
                config.n = *n;
            }
            let rows = run_density(&config)?;
            let written = write_density_outputs(&rows, out_dir)?;
            report_written(&written);
        }
        Command::Ingest {
            input,
            one_indexed,
            no_symmetrize,
            subsample,
        } => {
            let mut config: Option<IngestConfig> = match &cli.config {
                Some(_) => Some(load_required_config(&cli.config, "")?),
                None => None,
            };
            if config.is_none() {
                let path = input.clone().ok_or_else(|| {
                    Failure::usage("ingest needs --input <file> or a config with a path")
                })?;
                config = Some(IngestConfig {
                    path,
                    options: EdgeListOptions::default(),
                });
            }
            let mut config = config.expect("set above");
            if let Some(path) = input {
                config.path = path.clone();
            }
            if *one_indexed {
                config.options.indexing = Indexing::OneBased;
            }
            if *no_symmetrize {
                config.options.symmetrize = false;
            }
            if subsample.is_some() {
                config.options.subsample = *subsample;
            }
            if let Some(seed) = cli.seed {
                config.options.seed = seed;
            }
            let adjacency = ingest_edgelist(&config.path, &config.options)?;
            let written = write_ingest_outputs(&adjacency, out_dir)?;
            report_written(&written);
            println!("ingested {} nodes", adjacency.nrows());
        }
    }
    Ok(())
}
