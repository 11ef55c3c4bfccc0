//! Command-line interface.
//!
//! Exit codes: 0 on normal completion (including runs that stop at their
//! iteration limit), 1 on I/O failure, 2 on usage or configuration errors
//! and 3 when a single `solve` run ends in numerical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, Family, MethodKind, RawConfig};
use crate::experiment::{run_experiment, ExperimentError, ExperimentOutput};
use crate::output::write_outputs;
use crate::presets::{preset_text, PRESETS};

/// Environment variable overriding the output directory of configs.
pub const OUT_DIR_ENV: &str = "GRAAL_BENCH_OUT";
pub const DEFAULT_OUT_DIR: &str = "results";

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "graal-bench", version, about = "Golden Ratio Algorithm experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one method on one problem instance
    Solve(SolveArgs),
    /// Run the seed x method sweep of a config file or preset
    Bench(BenchArgs),
    /// Print problem families, their parameters, methods and presets
    ListProblems,
    /// Check a config without running it
    ValidateConfig(ConfigSource),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ConfigSource {
    /// Config file
    config: Option<PathBuf>,
    /// Shipped preset name
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Output directory (overrides the config and the environment)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    workers: Option<usize>,
    /// Seeds, e.g. `1..5` or `1,3`
    #[arg(long)]
    seeds: Option<String>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    method: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    noise_std: Option<f64>,
    /// LIBSVM data file (logistic)
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    max_seconds: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Fixed stepsize for graal, pgm and fista
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the energy of composite problems
    #[arg(long)]
    energy: bool,
    /// Record wall-clock times (makes outputs nondeterministic)
    #[arg(long)]
    timing: bool,
}

impl SolveArgs {
    fn raw(&self) -> RawConfig {
        let mut raw = RawConfig::default();
        raw.set("experiment.name", format!("{}-{}", self.problem, self.method));
        raw.set("problem.family", &self.problem);
        raw.set("method.names", &self.method);
        raw.set("problem.seeds", self.seed.to_string());
        let mut put = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                raw.set(key, v);
            }
        };
        put("problem.n", self.n.map(|v| v.to_string()));
        put("problem.m", self.m.map(|v| v.to_string()));
        put("problem.scenario", self.scenario.clone());
        put("problem.noise_std", self.noise_std.map(|v| v.to_string()));
        put("problem.data", self.data.as_ref().map(|p| p.display().to_string()));
        put("problem.gamma", self.gamma.map(|v| v.to_string()));
        put("stop.tol", self.tol.map(|v| v.to_string()));
        put("stop.max_iters", self.max_iters.map(|v| v.to_string()));
        put("stop.max_seconds", self.max_seconds.map(|v| v.to_string()));
        put("method.phi", self.phi.map(|v| v.to_string()));
        put("method.lambda_max", self.lambda_max.map(|v| v.to_string()));
        put("method.delta", self.delta.map(|v| v.to_string()));
        put("method.lambda", self.lambda.map(|v| v.to_string()));
        put("output.energy", self.energy.then(|| "true".to_string()));
        put("output.timing", self.timing.then(|| "true".to_string()));
        if self.tol.is_none() && self.max_iters.is_none() && self.max_seconds.is_none() {
            raw.set("stop.tol", "1e-6");
            raw.set("stop.max_iters", "100000");
        }
        raw
    }
}

fn load(source: &ConfigSource) -> Result<RawConfig, String> {
    let text = match (&source.config, &source.preset) {
        (Some(path), _) => fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?,
        (None, Some(name)) => preset_text(name)
            .ok_or_else(|| {
                let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
                format!("unknown preset '{name}' (available: {})", names.join(", "))
            })?
            .to_string(),
        (None, None) => unreachable!("clap requires a source"),
    };
    RawConfig::parse(&text).map_err(|e| e.to_string())
}

fn out_dir(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    config.output.dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn print_summary(output: &ExperimentOutput) {
    println!(
        "{:>6}  {:<16} {:<18} {:>8} {:>10} {:>12}  success",
        "seed", "method", "status", "iters", "fevals", "residual"
    );
    for r in &output.summary {
        let residual = r.final_residual.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>6}  {:<16} {:<18} {:>8} {:>10} {:>12}  {}",
            r.seed, r.method, r.status, r.iterations, r.total_fevals, residual, r.success
        );
    }
    for c in output.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!("seed {} {}: {}", c.seed, c.method.name(), c.error.as_deref().unwrap_or_default());
    }
}

fn execute(config: &ExperimentConfig, out_flag: Option<&Path>) -> Result<ExperimentOutput, u8> {
    let output = match run_experiment(config) {
        Ok(o) => o,
        Err(ExperimentError::Io { path, source }) => {
            eprintln!("error: cannot read {path}: {source}");
            return Err(EXIT_IO);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Err(EXIT_CONFIG);
        }
    };
    let dir = out_dir(out_flag, config);
    match write_outputs(&output, &dir) {
        Ok(paths) => log::info!("wrote {} files to {}", paths.len(), dir.display()),
        Err(e) => {
            eprintln!("error: cannot write to {}: {e}", dir.display());
            return Err(EXIT_IO);
        }
    }
    print_summary(&output);
    Ok(output)
}

fn list_problems() {
    println!("problem families:");
    for f in Family::ALL {
        let methods: Vec<_> = MethodKind::ALL.iter().filter(|m| m.supports(f)).map(|m| m.name()).collect();
        println!("  {}", f.name());
        for (key, help) in f.parameters() {
            println!("      problem.{key:<10} {help}");
        }
        println!("      methods: {}", methods.join(", "));
    }
    println!("presets:");
    for (name, _) in PRESETS {
        println!("  {name}");
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::ListProblems => {
            list_problems();
            EXIT_OK
        }
        Command::ValidateConfig(source) => {
            match load(&source).and_then(|raw| ExperimentConfig::from_raw(&raw).map_err(|e| e.to_string())) {
                Ok(c) => {
                    println!("ok: {} ({} seeds x {} methods)", c.name, c.problem.seeds.len(), c.methods.kinds.len());
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            }
        }
        Command::Bench(args) => {
            let config = load(&args.source).and_then(|mut raw| {
                if let Some(w) = args.workers {
                    raw.set("run.workers", w.to_string());
                }
                if let Some(s) = &args.seeds {
                    raw.set("problem.seeds", s.clone());
                }
                ExperimentConfig::from_raw(&raw).map_err(|e| e.to_string())
            });
            match config {
                Ok(c) => execute(&c, args.out.as_deref()).map_or_else(|code| code, |_| EXIT_OK),
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            }
        }
        Command::Solve(args) => {
            let config = match ExperimentConfig::from_raw(&args.raw()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let output = match execute(&config, args.out.as_deref()) {
                Ok(o) => o,
                Err(code) => return code,
            };
            let cell = &output.cells[0];
            match &cell.trace {
                None => EXIT_CONFIG,
                Some(t) if t.termination == graal::solvers::Termination::NumericalFailure => {
                    if let Some(e) = &t.error {
                        eprintln!("error: {e}");
                    }
                    EXIT_NUMERICAL
                }
                Some(_) => EXIT_OK,
            }
        }
    }
}
