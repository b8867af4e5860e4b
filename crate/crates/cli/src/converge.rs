//! The `convergence` experiment: the same run at dx, dx/2, dx/4, ...

use pcf_core::numerics::observed_orders;
use pcf_core::oracle::free_wave_at_rest;
use pcf_core::{
    chiral_residual, continuity_residuals, evolve, metric_of_state, total_energy, FieldState, Grid, SolverConfig,
    Termination,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, InitialData, LaunchName, Reference};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, Check, CsvTable, Summary};
use crate::setup::Setup;

/// Result of one refinement level.
#[derive(Debug, Clone)]
pub struct Level {
    pub nx: usize,
    pub grid: Grid,
    pub final_state: FieldState,
    /// Max-norm error against the reference, when one exists.
    pub error: Option<f64>,
    pub energy_drift: f64,
    pub continuity: Option<f64>,
    pub chiral: Option<f64>,
}

/// Nodes of level `k` when the base level has `nx` nodes.
pub fn level_nodes(nx: usize, k: usize) -> usize {
    (nx - 1) * (1 << k) + 1
}

fn reference(cfg: &ExperimentConfig) -> CliResult<Reference> {
    let closed = !matches!(cfg.initial, InitialData::Bump { .. });
    match cfg.convergence.reference {
        Reference::Auto if closed => Ok(Reference::Auto),
        Reference::Auto => Ok(Reference::SelfConvergence),
        Reference::Dalembert => match &cfg.initial {
            InitialData::Bump { ltil, phi, .. }
                if [ltil, phi].iter().all(|b| b.launch == LaunchName::AtRest && b.kick == 0.0) =>
            {
                Ok(Reference::Dalembert)
            }
            _ => Err(CliError::Config {
                path: "convergence.reference".into(),
                msg: "the d'Alembert reference needs bump data launched at rest".into(),
            }),
        },
        Reference::SelfConvergence => Ok(Reference::SelfConvergence),
    }
}

/// Compares only nodes the boundary cannot have influenced by time `t`.
fn interior_error(a: &FieldState, b: &FieldState, grid: &Grid, t: f64) -> f64 {
    let (lo, hi) = (grid.x_min() + t, grid.x_max() - t);
    grid.nodes()
        .enumerate()
        .filter(|(_, x)| *x >= lo && *x <= hi)
        .map(|(i, _)| (a.ltil[i] - b.ltil[i]).abs().max((a.phi[i] - b.phi[i]).abs()))
        .fold(0.0, f64::max)
}

fn run_level(cfg: &ExperimentConfig, k: usize, refr: Reference) -> CliResult<Level> {
    let nx = level_nodes(cfg.grid.nx, k);
    let grid = Grid::with_cfl(cfg.grid.x_min, cfg.grid.x_max, nx, cfg.solver.cfl)?;
    let setup = Setup::on_grid(cfg, grid)?;
    let solver = SolverConfig {
        record_every: 1,
        ..cfg.solver()
    };
    let mut tail: Vec<FieldState> = Vec::with_capacity(3);
    let run = evolve(&setup.initial, &setup.grid, &solver, |s| {
        if tail.len() == 3 {
            tail.remove(0);
        }
        tail.push(s.clone());
    })?;
    if run.termination != Termination::Completed {
        return Err(CliError::Terminated {
            category: run.termination.as_str(),
            message: format!("level {k}: {}", run.error.map(|e| e.to_string()).unwrap_or_default()),
        });
    }
    let grid = &setup.grid;
    let t = run.final_state.t;
    let error = match refr {
        Reference::Auto => setup
            .exact_state(t)?
            .map(|exact| interior_error(&run.final_state, &exact, grid, t)),
        Reference::Dalembert => {
            let InitialData::Bump { ltil, phi, .. } = &cfg.initial else {
                unreachable!("checked by reference()")
            };
            let (bl, bp) = (ltil.spec(), phi.spec());
            let err = grid
                .nodes()
                .enumerate()
                .map(|(i, x)| {
                    let el = (run.final_state.ltil[i] - free_wave_at_rest(&bl, t, x).0).abs();
                    el.max((run.final_state.phi[i] - free_wave_at_rest(&bp, t, x).0).abs())
                })
                .fold(0.0, f64::max);
            Some(err)
        }
        Reference::SelfConvergence => None,
    };
    let e0 = total_energy(&setup.initial, grid)?;
    let e1 = total_energy(&run.final_state, grid)?;
    let energy_drift = if e0 > 0.0 { (e1 - e0).abs() / e0 } else { (e1 - e0).abs() };
    let (continuity, chiral) = if tail.len() == 3 {
        let (a, b) = continuity_residuals([&tail[0], &tail[1], &tail[2]], grid)?;
        let ms = tail.iter().map(metric_of_state).collect::<pcf_core::Result<Vec<_>>>()?;
        (Some(a.max(b)), Some(chiral_residual([&ms[0], &ms[1], &ms[2]], grid)?))
    } else {
        (None, None)
    };
    Ok(Level {
        nx,
        grid: *grid,
        final_state: run.final_state,
        error,
        energy_drift,
        continuity,
        chiral,
    })
}

/// Max difference between consecutive levels at the coarse nodes.
fn self_differences(levels: &[Level]) -> Vec<f64> {
    levels
        .windows(2)
        .map(|w| {
            let (c, f) = (&w[0], &w[1]);
            let coarse = FieldState {
                ltil: (0..c.nx).map(|i| f.final_state.ltil[2 * i]).collect(),
                phi: (0..c.nx).map(|i| f.final_state.phi[2 * i]).collect(),
                ..c.final_state.clone()
            };
            interior_error(&c.final_state, &coarse, &c.grid, c.final_state.t)
        })
        .collect()
}

/// Runs every level in parallel, ordered coarse to fine.
pub fn run_levels(cfg: &ExperimentConfig) -> CliResult<(Reference, Vec<Level>)> {
    let refr = reference(cfg)?;
    let levels = (0..cfg.convergence.levels)
        .into_par_iter()
        .map(|k| run_level(cfg, k, refr))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((refr, levels))
}

fn sequence_check(name: &str, errs: &[f64], require_order: bool) -> Check {
    let orders = observed_orders(errs, 2.0);
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let detail = format!("errors {errs:?}, orders {orders:?}");
    if !monotone {
        return Check {
            name: name.to_string(),
            value: 0.0,
            threshold: 0.0,
            passed: false,
            detail: format!("FAILED: non-monotone sequence; {detail}"),
        };
    }
    let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
    if require_order {
        Check::within(name, worst, 1.8, 2.2).with_detail(detail)
    } else {
        Check::at_least(name, worst, f64::NEG_INFINITY).with_detail(detail)
    }
}

pub fn execute(cfg: &ExperimentConfig, summary: &mut Summary) -> CliResult<()> {
    let (refr, levels) = run_levels(cfg)?;
    let errs: Vec<f64> = match refr {
        Reference::SelfConvergence => self_differences(&levels),
        _ => levels.iter().map(|l| l.error.unwrap_or(f64::NAN)).collect(),
    };
    let mut table = CsvTable::create(
        &cfg.output.join("convergence.csv"),
        &["level", "nx", "dx", "dt", "solution_error", "energy_drift", "continuity_residual", "chiral_residual"],
    )?;
    for (k, l) in levels.iter().enumerate() {
        let sol = match refr {
            Reference::SelfConvergence => errs.get(k).copied(),
            _ => Some(errs[k]),
        };
        table.row([
            k.to_string(),
            l.nx.to_string(),
            fmt_f64(l.grid.dx()),
            fmt_f64(l.grid.dt()),
            sol.map(fmt_f64).unwrap_or_default(),
            fmt_f64(l.energy_drift),
            l.continuity.map(fmt_f64).unwrap_or_default(),
            l.chiral.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    table.finish()?;

    summary.detail(
        "reference",
        match refr {
            Reference::Auto => "exact",
            Reference::Dalembert => "dalembert",
            Reference::SelfConvergence => "self",
        },
    );
    summary.checks.push(sequence_check("solution_order", &errs, true));
    let col = |f: fn(&Level) -> Option<f64>| levels.iter().filter_map(f).collect::<Vec<_>>();
    for (name, seq) in [
        ("energy_drift_order", col(|l| Some(l.energy_drift))),
        ("continuity_residual_order", col(|l| l.continuity)),
        ("chiral_residual_order", col(|l| l.chiral)),
    ] {
        let c = sequence_check(name, &seq, false);
        summary.detail(name, serde_json::json!({ "values": seq, "orders": observed_orders(&seq, 2.0), "detail": c.detail }));
    }
    Ok(())
}
