use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracsica_cli::commands::thread_cap;
use fracsica_cli::config::parse_value;
use fracsica_cli::{run_analyze, run_simulate, run_sweep, CliError, ConfigError, RunConfig};

#[derive(Parser)]
#[command(
    name = "fracsica",
    version,
    about = "Fractional-order SICA HIV/AIDS model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write the trajectory CSV.
    Simulate(RunArgs),
    /// Report R0, equilibria and disease-free stability for each alpha.
    Analyze(RunArgs),
    /// Compare convergence time across fractional orders.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (`key = value` with [parameters], [initial], [solver], [sweep]).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (default: trajectory.csv, report.txt or sweep.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fractional order override; a comma-separated list replaces the sweep orders.
    #[arg(long)]
    alpha: Option<String>,
    /// Contact rate override.
    #[arg(long)]
    beta: Option<f64>,
    /// Convergence threshold override for sweep.
    #[arg(long)]
    epsilon: Option<f64>,
}

fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            RunConfig::parse(&text).map_err(CliError::Config)?
        }
        None => RunConfig::default(),
    };
    if let Some(list) = &args.alpha {
        let alphas: Result<Vec<f64>, String> = list.split(',').map(parse_value).collect();
        let alphas = alphas.map_err(|e| {
            CliError::Config(vec![ConfigError {
                line: None,
                message: format!("--alpha: {e}"),
            }])
        })?;
        cfg.solver.alpha = alphas[0];
        cfg.alphas = alphas;
    }
    if let Some(beta) = args.beta {
        cfg.parameters.contact_rate = beta;
    }
    if let Some(eps) = args.epsilon {
        cfg.epsilon = eps;
    }
    cfg.output_path = args.out.clone();
    Ok(cfg)
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Simulate(args) => {
            let cfg = load(args)?;
            let path = cfg
                .output_path
                .clone()
                .unwrap_or_else(|| "trajectory.csv".into());
            let mut csv = create(&path)?;
            let stdout = io::stdout();
            run_simulate(&cfg, &mut csv, &mut stdout.lock())?;
            csv.flush()?;
            println!("trajectory written to {}", path.display());
            Ok(0)
        }
        Command::Analyze(args) => {
            let cfg = load(args)?;
            let path = cfg
                .output_path
                .clone()
                .unwrap_or_else(|| "report.txt".into());
            let mut report = Vec::new();
            let mut csv = Vec::new();
            run_analyze(&cfg, &mut report, &mut csv)?;
            io::stdout().write_all(&report)?;
            fs::write(&path, &report)?;
            fs::write(path.with_extension("stability.csv"), &csv)?;
            Ok(0)
        }
        Command::Sweep(args) => {
            let cfg = load(args)?;
            let path = cfg
                .output_path
                .clone()
                .unwrap_or_else(|| "sweep.csv".into());
            let mut csv = Vec::new();
            let outcome = run_sweep(&cfg, thread_cap(), &mut csv)?;
            io::stdout().write_all(&csv)?;
            fs::write(&path, &csv)?;
            if !outcome.all_reached() {
                eprintln!(
                    "error: some orders did not settle within epsilon = {}",
                    cfg.epsilon
                );
            }
            Ok(outcome.exit_code())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config_path = match &cli.command {
        Command::Simulate(a) | Command::Analyze(a) | Command::Sweep(a) => a.config.clone(),
    };
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            match &err {
                CliError::Config(errors) => {
                    let origin = config_path
                        .map(|p| p.display().to_string())
                        .unwrap_or_else(|| "config".into());
                    for e in errors {
                        match e.line {
                            Some(line) => eprintln!("{origin}:{line}: {}", e.message),
                            None => eprintln!("{origin}: {}", e.message),
                        }
                    }
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
