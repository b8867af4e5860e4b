//! The `sweep` experiment: independent runs over one varied parameter.

use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, InitialData, SweepParameter};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, CsvTable, Summary};

/// The job configuration for one sweep value, writing under `out/job_NNN`.
pub fn job_config(base: &ExperimentConfig, index: usize, value: f64) -> CliResult<ExperimentConfig> {
    let sweep = base.sweep.as_ref().ok_or_else(|| CliError::Config {
        path: "sweep".into(),
        msg: "missing [sweep] table".into(),
    })?;
    let mut cfg = base.clone();
    cfg.experiment = Experiment::Run;
    cfg.sweep = None;
    cfg.output = base.output.join(format!("job_{index:03}"));
    let unsupported = |what: &str| CliError::Config {
        path: "sweep.parameter".into(),
        msg: format!("{what} is not a parameter of this initial data"),
    };
    match (sweep.parameter, &mut cfg.initial) {
        (SweepParameter::Epsilon, InitialData::Bump { ltil, .. } | InitialData::TravelingWave { ltil, .. }) => {
            ltil.epsilon = value
        }
        (SweepParameter::Epsilon, InitialData::FiniteEnergySoliton { epsilon, .. }) => *epsilon = value,
        (
            SweepParameter::Lambda,
            InitialData::Bump { lambda, .. }
            | InitialData::TravelingWave { lambda, .. }
            | InitialData::FiniteEnergySoliton { lambda, .. },
        ) => *lambda = value,
        (SweepParameter::Mu, InitialData::SingularSoliton { mu } | InitialData::FiniteEnergySoliton { mu, .. }) => {
            *mu = value
        }
        (SweepParameter::Nx, _) => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(CliError::Config {
                    path: format!("sweep.values[{index}]"),
                    msg: format!("nx = {value} must be a positive integer"),
                });
            }
            cfg.grid.nx = value as usize;
        }
        (SweepParameter::TEnd, _) => cfg.solver.t_end = value,
        (p, _) => return Err(unsupported(&format!("{p:?}"))),
    }
    cfg.validate().map_err(|e| match e {
        CliError::Config { path, msg } => CliError::Config {
            path: format!("sweep.values[{index}] -> {path}"),
            msg,
        },
        other => other,
    })?;
    Ok(cfg)
}

pub fn execute(cfg: &ExperimentConfig, summary: &mut Summary) -> CliResult<()> {
    let sweep = cfg.sweep.as_ref().expect("validated");
    let jobs = sweep
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| job_config(cfg, i, v))
        .collect::<CliResult<Vec<_>>>()?;
    // each job owns its directory; failures are recorded per job
    let results: Vec<Summary> = jobs
        .par_iter()
        .map(|job| match crate::run_experiment(job) {
            Ok(s) => s,
            Err(e) => crate::output::read_summary(&job.output.join("summary.json")).unwrap_or_else(|_| {
                let mut s = Summary::new("run");
                s.status = e.category().to_string();
                s
            }),
        })
        .collect();

    let mut table = CsvTable::create(
        &cfg.output.join("sweep.csv"),
        &["job", "value", "status", "termination", "t_final", "min_lambda", "max_sup_ltil", "energy_drift"],
    )?;
    let mut failed = 0;
    for (i, (s, v)) in results.iter().zip(&sweep.values).enumerate() {
        if s.status != "ok" {
            failed += 1;
        }
        let run = s.run.as_ref();
        let num = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        table.row([
            format!("job_{i:03}"),
            fmt_f64(*v),
            s.status.clone(),
            run.map(|r| r.termination.clone()).unwrap_or_default(),
            num(run.map(|r| r.t_final)),
            num(run.map(|r| r.min_lambda)),
            num(run.map(|r| r.max_sup_ltil)),
            num(s.details.get("max_relative_energy_drift").and_then(|v| v.as_f64())),
        ])?;
    }
    table.finish()?;
    summary.detail("parameter", sweep.parameter);
    summary.detail("jobs", results.len());
    summary.detail("jobs_not_ok", failed);
    Ok(())
}
