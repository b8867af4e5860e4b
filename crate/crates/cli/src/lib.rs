//! Batch front end for the principal chiral field laboratory: configuration,
//! experiment orchestration and artifact output.

pub mod config;
pub mod converge;
pub mod error;
pub mod output;
pub mod run;
pub mod setup;
pub mod soliton;
pub mod sweep;

pub use config::{emit_config, parse_config, Experiment, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use output::Summary;

use config::ExperimentConfig as Config;

/// Runs the configured experiment inside `cfg.output`.
///
/// `resolved_config.toml` and `summary.json` are always written, also when
/// the experiment fails; the error category then appears as the summary status.
pub fn run_experiment(cfg: &Config) -> CliResult<Summary> {
    cfg.validate()?;
    output::create_dir(&cfg.output)?;
    output::write_text(&cfg.output.join("resolved_config.toml"), &emit_config(cfg)?)?;
    let mut summary = Summary::new(cfg.experiment.as_str());
    let result = match cfg.experiment {
        Experiment::Run | Experiment::VirialStudy | Experiment::DecayStudy => run::execute(cfg, &mut summary),
        Experiment::SolitonCheck => soliton::execute(cfg, &mut summary),
        Experiment::Convergence => converge::execute(cfg, &mut summary),
        Experiment::Sweep => sweep::execute(cfg, &mut summary),
    };
    let result = result.and_then(|()| {
        let failed = summary.failed_checks();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::ChecksFailed(failed.join(", ")))
        }
    });
    if let Err(e) = &result {
        summary.status = e.category().to_string();
        summary.detail("error", e.to_string());
    }
    summary.write(&cfg.output)?;
    result.map(|()| summary)
}

/// Thread pool sized by `PCF_THREADS` when set, rayon's default otherwise.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PCF_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config {
            path: "PCF_THREADS".into(),
            msg: format!("`{v}` is not a positive integer"),
        })?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Pool(e.to_string()))
}
