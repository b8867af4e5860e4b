use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pcf_cli::config::{default_theta, Experiment, ExperimentConfig, InitialData};
use pcf_cli::{parse_config, run_experiment, thread_pool, CliError, CliResult, Summary};

#[derive(Parser)]
#[command(name = "pcf", version, about = "Principal chiral field simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity checks on the closed-form solitons.
    SolitonCheck {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// Check the finite-energy soliton (0 < mu < 1) instead of the singular one.
        #[arg(long)]
        finite_energy: bool,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out/soliton-check")]
        out: PathBuf,
    },
    /// Decay study of the windowed energy at speed v.
    Decay {
        #[arg(long, allow_negative_numbers = true)]
        v: f64,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refinement study over `levels` grids.
    Converge {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweep, jobs in parallel (PCF_THREADS caps the threads).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

fn with_out(mut cfg: ExperimentConfig, out: Option<PathBuf>) -> ExperimentConfig {
    if let Some(o) = out {
        cfg.output = o;
    }
    cfg
}

fn soliton_config(mu: f64, finite_energy: bool, lambda: f64, eps: f64, seed: u64, out: PathBuf) -> ExperimentConfig {
    let initial = if finite_energy {
        InitialData::FiniteEnergySoliton {
            lambda,
            epsilon: eps,
            mu,
            theta: default_theta(),
        }
    } else {
        InitialData::SingularSoliton { mu }
    };
    ExperimentConfig {
        experiment: Experiment::SolitonCheck,
        seed,
        output: out,
        grid: Default::default(),
        solver: Default::default(),
        initial,
        diagnostics: Default::default(),
        convergence: Default::default(),
        sweep: None,
    }
}

fn build(cmd: Command) -> CliResult<ExperimentConfig> {
    let cfg = match cmd {
        Command::Run { config, out } => with_out(load(&config)?, out),
        Command::SolitonCheck {
            mu,
            finite_energy,
            lambda,
            eps,
            seed,
            out,
        } => soliton_config(mu, finite_energy, lambda, eps, seed, out),
        Command::Decay { v, config, out } => {
            let mut cfg = with_out(load(&config)?, out);
            cfg.experiment = Experiment::DecayStudy;
            cfg.diagnostics.v = vec![v];
            cfg
        }
        Command::Converge { levels, config, out } => {
            let mut cfg = with_out(load(&config)?, out);
            cfg.experiment = Experiment::Convergence;
            cfg.convergence.levels = levels;
            cfg
        }
        Command::Sweep { config, out } => {
            let mut cfg = with_out(load(&config)?, out);
            cfg.experiment = Experiment::Sweep;
            cfg
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn report(summary: &Summary) {
    for c in &summary.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:<36} {:.6e}  {}", c.name, c.value, c.detail);
    }
    if let Some(run) = &summary.run {
        println!(
            "{}: {} steps to t = {}, min Lambda {:.6e}",
            run.termination, run.steps, run.t_final, run.min_lambda
        );
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = build(cli.command).and_then(|cfg| {
        let out = cfg.output.clone();
        let summary = thread_pool()?.install(|| run_experiment(&cfg));
        if let Ok(s) = pcf_cli::output::read_summary(&out.join("summary.json")) {
            report(&s);
        }
        summary.map(|_| out)
    });
    match result {
        Ok(out) => {
            println!("ok: outputs in {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
