//! `bursty`: solve, simulate, sweep and benchmark from the command line.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
//! Errors are printed to stderr as a single JSON object.

#![allow(clippy::result_large_err)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{MethodChoice, Overrides};
use error::CliError;
use output::OutDir;

#[derive(Parser)]
#[command(name = "bursty", version, about = "Bursty transcription solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint nascent/mature distribution on a grid
    Solve(Common),
    /// Gillespie samples
    Simulate(Common),
    /// Divergence landscape of data over trial parameters
    Sweep(Common),
    /// Exponential-integral accuracy and timing
    BenchExpint(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    /// Laurent and Taylor orders
    #[arg(long, value_name = "NL,NT", value_parser = parse_orders)]
    orders: Option<(u32, u32)>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size
    #[arg(long, value_name = "NxM", value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Benchmark on the 1000x1000 grid
    #[arg(long)]
    full: bool,
    /// Restrict the benchmark to one region (pade1, pade2, pade3, cheb1, cheb2, taylor)
    #[arg(long)]
    region: Option<String>,
    /// Also sweep (N_L, N_T) over {1..7}x{1..7}
    #[arg(long)]
    orders_sweep: bool,
    /// Sample CSV for `sweep`
    #[arg(long)]
    data: Option<PathBuf>,
}

fn parse_pair<T: std::str::FromStr>(s: &str, sep: char) -> Result<(T, T), String> {
    let (a, b) = s.split_once(sep).ok_or_else(|| format!("expected two values separated by '{sep}'"))?;
    let a = a.trim().parse().map_err(|_| format!("bad value {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad value {b:?}"))?;
    Ok((a, b))
}

fn parse_orders(s: &str) -> Result<(u32, u32), String> {
    parse_pair(s, ',')
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    parse_pair(&s.to_ascii_lowercase(), 'x')
}

fn execute(command: &Command) -> Result<(), CliError> {
    let (Command::Solve(common) | Command::Simulate(common) | Command::Sweep(common) | Command::BenchExpint(common)) =
        command;
    let src = match &common.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::io("read config", path, e))?,
        None => String::new(),
    };
    let over = Overrides {
        method: common.method,
        orders: common.orders,
        seed: common.seed,
        grid: common.grid,
        full: common.full,
        region: common.region.clone(),
        orders_sweep: common.orders_sweep,
        data: common.data.clone(),
    };
    let cfg = config::parse(&src, &over)?;
    let out = OutDir::create(&common.out)?;
    match command {
        Command::Solve(_) => commands::cmd_solve(&cfg, &out),
        Command::Simulate(_) => commands::cmd_simulate(&cfg, &out),
        Command::Sweep(_) => commands::cmd_sweep(&cfg, &out),
        Command::BenchExpint(_) => commands::cmd_bench_expint(&cfg, &out),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match bursty::with_pool(|| execute(&cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code
        }
    };
    std::process::exit(code);
}
