use std::path::PathBuf;
use std::process::ExitCode;

use bicmb_sim::probe::probe_single_symbol_errors;
use bicmb_sim::selftest::run_selftest;
use bicmb_sim::{run_ber_sweep, run_complexity_sweep, RunReport, SimConfig, SimError, SimResult};
use clap::{Args, Parser, Subcommand};

/// BER and decoding-complexity simulator for perfect-coded multiple
/// beamforming.
#[derive(Debug, Parser)]
#[command(name = "bicmb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BER sweep over the configured SNR grid.
    Ber(RunArgs),
    /// Real multiplications per bit metric over the SNR grid.
    Complexity(RunArgs),
    /// Smallest subchannel weights over all single-symbol error pairs.
    Probe(ProbeArgs),
    /// Quick invariant checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML or JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON output path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    /// Takes `dim` and `m` from this configuration.
    #[arg(long, required_unless_present = "dim")]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "config")]
    dim: Option<usize>,
    #[arg(long, default_value_t = 4, conflicts_with = "config")]
    m: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn load(args: &RunArgs) -> SimResult<SimConfig> {
    let mut cfg = SimConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn emit(report: &RunReport, args: &RunArgs) -> SimResult<()> {
    print!("{}", report.table());
    println!("wall time {:.2} s", report.wall_time_s);
    if let Some(p) = &args.out {
        report.save_csv(p)?;
    }
    if let Some(p) = &args.json {
        report.save_json(p)?;
    }
    Ok(())
}

fn run(cli: Cli) -> SimResult<()> {
    match cli.command {
        Command::Ber(args) => emit(&run_ber_sweep(&load(&args)?)?, &args),
        Command::Complexity(args) => emit(&run_complexity_sweep(&load(&args)?)?, &args),
        Command::Probe(args) => {
            let (dim, m) = match (&args.config, args.dim) {
                (Some(path), _) => {
                    let cfg = SimConfig::load(path)?;
                    (cfg.dim, cfg.m)
                }
                (None, Some(d)) => (d, args.m),
                (None, None) => return Err(SimError::config("probe needs --config or --dim")),
            };
            let s = probe_single_symbol_errors(dim, m)?;
            println!("D={} M={} pairs={}", s.dim, s.m, s.pairs);
            for (u, r) in s.min_rho.iter().enumerate() {
                println!("  min rho[{u}] = {r:.6}");
            }
            if let Some(p) = &args.json {
                std::fs::write(p, serde_json::to_string_pretty(&s)? + "\n")
                    .map_err(|source| SimError::Io { path: p.display().to_string(), source })?;
            }
            Ok(())
        }
        Command::Selftest { seed } => {
            let outcomes = run_selftest(seed);
            let mut failed = 0;
            for o in &outcomes {
                println!("{} {:<26} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                failed += usize::from(!o.passed);
            }
            if failed > 0 {
                return Err(SimError::SelfTest(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
