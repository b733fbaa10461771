//! `gridsplit`: bridge detection, N-1 fast screening, synthetic grids and
//! engine benchmarks from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 topology error, 3 numerical error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridsplit_core::bench::{available_cores, run_bench, BenchConfig, DEFAULT_WORKER_SWEEP};
use gridsplit_core::bridges::{detect, parallel_bridges, BridgeError, Engine};
use gridsplit_core::grid::{parse_grid, Adjacency, Grid, DEFAULT_DENSE_CAP};
use gridsplit_core::screening::{fast_screen, ScreeningError};
use gridsplit_core::synth::{generate, SynthSpec};

#[derive(Debug, Parser)]
#[command(name = "gridsplit", version, about = "Grid-splitting detection and DC N-1 fast screening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the branches whose outage splits the grid.
    Detect(DetectArgs),
    /// Rank non-splitting outages by severity index.
    Screen(ScreenArgs),
    /// Time the detection engines across worker counts.
    Bench(BenchArgs),
    /// Write a synthetic grid file.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct WorkerArgs {
    /// Worker threads; defaults to the available cores.
    #[arg(long, env = "GRIDSPLIT_WORKERS", value_parser = positive)]
    workers: Option<usize>,
}

impl WorkerArgs {
    fn get(&self) -> usize {
        self.workers.unwrap_or_else(available_cores)
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100, value_parser = positive)]
    buses: usize,
    #[arg(long, default_value_t = 20)]
    extra_edges: usize,
    #[arg(long, default_value_t = 0.1)]
    parallel_fraction: f64,
    #[arg(long, default_value_t = 0.3)]
    pendant_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SynthArgs {
    fn spec(&self) -> SynthSpec {
        SynthSpec {
            seed: self.seed,
            buses: self.buses,
            extra_edges: self.extra_edges,
            parallel_fraction: self.parallel_fraction,
            pendant_fraction: self.pendant_fraction,
            ..SynthSpec::default()
        }
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "parallel", value_parser = parse_engine)]
    engine: Engine,
    #[command(flatten)]
    workers: WorkerArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ScreenArgs {
    #[arg(long)]
    input: PathBuf,
    /// Branches below this voltage are not screened; 0 kV means unknown and is kept.
    #[arg(long, default_value_t = 35.0)]
    min_kv: f64,
    /// Keep only the N most severe outages.
    #[arg(long)]
    top: Option<usize>,
    #[command(flatten)]
    workers: WorkerArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Grid file; a synthetic grid is generated from the flags below when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    synth: SynthArgs,
    /// Worker counts for the parallel engine.
    #[arg(long, value_delimiter = ',', value_parser = positive)]
    sweep: Vec<usize>,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    reps: usize,
    /// Largest bus count for the dense per-edge baseline.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    synth: SynthArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

impl From<BridgeError> for Failure {
    fn from(e: BridgeError) -> Self {
        let code = match e {
            BridgeError::Disconnected { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ScreeningError> for Failure {
    fn from(e: ScreeningError) -> Self {
        let code = match e {
            ScreeningError::Disconnected { .. } => 2,
            ScreeningError::Singular(_) => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_grid(path: &Path) -> Result<Grid, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_grid(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, body: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, body).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

fn json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    text
}

fn cmd_detect(args: &DetectArgs) -> Result<(), Failure> {
    let grid = read_grid(&args.input)?;
    let adjacency = Adjacency::build(&grid);
    let report = detect(args.engine, &grid, &adjacency, args.workers.get())?;
    let body = match args.out.format {
        Format::Json => json_text(&report.to_json(&grid)),
        Format::Csv => report.to_csv(&grid),
    };
    emit(args.out.output.as_deref(), &body)
}

fn cmd_screen(args: &ScreenArgs) -> Result<(), Failure> {
    if !args.min_kv.is_finite() {
        return Err(Failure::input(format!("--min-kv must be finite, got {}", args.min_kv)));
    }
    let grid = read_grid(&args.input)?;
    let workers = args.workers.get();
    let adjacency = Adjacency::build(&grid);
    let bridges = parallel_bridges(&grid, &adjacency, workers)?;
    let result = fast_screen(&grid, &bridges, args.min_kv, workers)?;
    let body = match args.out.format {
        Format::Json => json_text(&result.to_json(&grid, args.top)),
        Format::Csv => result.to_csv(&grid, args.top),
    };
    emit(args.out.output.as_deref(), &body)
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let grid = match &args.input {
        Some(path) => read_grid(path)?,
        None => generate(&args.synth.spec()).map_err(Failure::input)?,
    };
    let config = BenchConfig {
        worker_counts: if args.sweep.is_empty() {
            DEFAULT_WORKER_SWEEP.to_vec()
        } else {
            args.sweep.clone()
        },
        reps: args.reps,
        dense_cap: args.dense_cap,
    };
    let table = run_bench(&grid, &config)?;
    for notice in &table.notices {
        eprintln!("gridsplit: {notice}");
    }
    let body = match args.out.format {
        Format::Json => json_text(&table.to_json()),
        Format::Csv => table.to_csv(),
    };
    emit(args.out.output.as_deref(), &body)
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let grid = generate(&args.synth.spec()).map_err(Failure::input)?;
    emit(args.output.as_deref(), &grid.to_grid_file())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Detect(args) => cmd_detect(args),
        Command::Screen(args) => cmd_screen(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gridsplit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
