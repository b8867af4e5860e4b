//! Single evolutions: the `run`, `virial-study` and `decay-study` experiments.

use std::path::{Path, PathBuf};

use pcf_core::diagnostics::{
    decay_window_scaled, modified_energy, record, virial_rhs_scaled, virial_scaled, NormAccumulator, RecordOptions,
    WeightedNorms,
};
use pcf_core::{
    chiral_residual, continuity_residuals, evolve, metric_of_state, pointwise_bound_monitor, total_energy,
    weighted_sobolev_ratio, DiagnosticsRecord, FieldState, RunSummary, SolverConfig, Termination,
};

use crate::config::{Experiment, ExperimentConfig, InitialData};
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, fmt_f64, write_snapshot, Check, CsvTable, RunReport, Summary, TimeseriesWriter};
use crate::setup::Setup;

const NORM_COLUMNS: [&str; 12] = [
    "t", "e0", "e1", "ebar0", "ebar1", "f0", "f1", "fbar0", "fbar1", "bootstrap_ratio", "pointwise_max",
    "sobolev_ratio",
];

const VIRIAL_COLUMNS: [&str; 7] = ["t", "v", "virial", "virial_dt", "virial_rhs", "identity_residual", "window_energy"];

/// Aggregates kept while recording.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub records: usize,
    pub energy0: f64,
    pub max_energy_drift: f64,
    pub min_margin: f64,
    pub max_continuity: f64,
    pub max_chiral: Option<f64>,
    pub max_bootstrap_ratio: Option<f64>,
    pub max_pointwise: Option<f64>,
    pub max_modified_energy: Option<f64>,
    pub max_virial_excess: f64,
    pub max_identity_residual: Option<f64>,
    /// (t, v, window energy) at every recorded slice with t ≥ 2.
    pub windows: Vec<(f64, f64, f64)>,
    pub nonfinite: usize,
    pub norms0: Option<WeightedNorms>,
    pub snapshots: Vec<(PathBuf, f64)>,
}

struct Slice {
    state: FieldState,
    step: usize,
}

struct Recorder<'a> {
    cfg: &'a ExperimentConfig,
    setup: &'a Setup,
    opts: RecordOptions,
    singular: bool,
    prev: Option<Slice>,
    cur: Option<Slice>,
    pending: bool,
    steps_seen: usize,
    series: TimeseriesWriter,
    virial: Option<CsvTable>,
    norms: Option<(NormAccumulator, CsvTable)>,
    snapshot_dir: PathBuf,
    snapshot_times: Vec<f64>,
    stats: RunStats,
    error: Option<CliError>,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a ExperimentConfig, setup: &'a Setup, out: &Path) -> CliResult<Self> {
        let d = &cfg.diagnostics;
        let studies = matches!(cfg.experiment, Experiment::VirialStudy | Experiment::DecayStudy);
        let virial = if studies {
            Some(CsvTable::create(&out.join("virial.csv"), &VIRIAL_COLUMNS)?)
        } else {
            None
        };
        let norms = if d.norms {
            Some((
                NormAccumulator::new(&setup.grid, d.delta)?,
                CsvTable::create(&out.join("norms.csv"), &NORM_COLUMNS)?,
            ))
        } else {
            None
        };
        let snapshot_dir = out.join("snapshots");
        if !d.snapshots.is_empty() {
            create_dir(&snapshot_dir)?;
        }
        let mut snapshot_times = d.snapshots.clone();
        snapshot_times.sort_by(f64::total_cmp);
        Ok(Self {
            cfg,
            setup,
            opts: RecordOptions {
                v: d.v.first().copied().unwrap_or(0.0),
                window: d.window(),
                scale: d.scale(),
            },
            singular: matches!(cfg.initial, InitialData::SingularSoliton { .. }),
            prev: None,
            cur: None,
            pending: false,
            steps_seen: 0,
            series: TimeseriesWriter::create(&out.join("timeseries.csv"))?,
            virial,
            norms,
            snapshot_dir,
            snapshot_times,
            stats: RunStats {
                min_margin: f64::INFINITY,
                ..RunStats::default()
            },
            error: None,
        })
    }

    fn push(&mut self, s: &FieldState) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = self.try_push(s) {
            self.error = Some(e);
        }
    }

    fn try_push(&mut self, s: &FieldState) -> CliResult<()> {
        let step = self.steps_seen;
        self.steps_seen += 1;
        if let Some((acc, _)) = self.norms.as_mut() {
            let n = acc.push(s)?;
            if step == 0 {
                self.stats.norms0 = Some(n);
            }
        }
        while let Some(&ts) = self.snapshot_times.first() {
            if s.t + 1e-9 < ts {
                break;
            }
            self.snapshot_times.remove(0);
            let path = self.snapshot_dir.join(format!("snapshot_{:03}.pcf", self.stats.snapshots.len()));
            write_snapshot(&path, s)?;
            self.stats.snapshots.push((path, s.t));
        }
        if self.pending {
            self.emit(Some(s))?;
        }
        self.prev = self.cur.take();
        self.cur = Some(Slice {
            state: s.clone(),
            step,
        });
        self.pending = step % self.cfg.solver.record_every == 0;
        Ok(())
    }

    /// Writes the record for `cur`, using `next` for centered time differences.
    fn emit(&mut self, next: Option<&FieldState>) -> CliResult<()> {
        self.pending = false;
        let grid = &self.setup.grid;
        let cur = &self.cur.as_ref().expect("a current slice").state;
        let triple = match (&self.prev, next) {
            (Some(p), Some(n)) => {
                let (h0, h1) = (cur.t - p.state.t, n.t - cur.t);
                ((h0 - h1).abs() <= 1e-9 * h1).then_some([&p.state, cur, n])
            }
            _ => None,
        };
        let mut r: DiagnosticsRecord = record(cur, grid, &self.opts)?;
        if self.cfg.diagnostics.continuity {
            if let Some(tr) = triple {
                let (a, b) = continuity_residuals(tr, grid)?;
                r.continuity_residual = Some(a);
                r.continuity_residual_e = Some(b);
                self.stats.max_continuity = self.stats.max_continuity.max(a).max(b);
            }
        }
        if self.singular {
            if let Some(f) = &self.setup.exact {
                let e = modified_energy(f.as_ref(), cur.t, (grid.x_min(), grid.x_max()), grid.nx())?;
                r.energy_mod = Some(e);
                let m = self.stats.max_modified_energy.unwrap_or(0.0).max(e.abs());
                self.stats.max_modified_energy = Some(m);
            }
        }
        if self.cfg.diagnostics.chiral {
            if let Some(tr) = triple {
                let ms = [metric_of_state(tr[0])?, metric_of_state(tr[1])?, metric_of_state(tr[2])?];
                let c = chiral_residual([&ms[0], &ms[1], &ms[2]], grid)?;
                self.stats.max_chiral = Some(self.stats.max_chiral.unwrap_or(0.0).max(c));
            }
        }

        let st = &mut self.stats;
        if st.records == 0 {
            st.energy0 = r.energy;
        }
        st.records += 1;
        let drift = if st.energy0 > 0.0 {
            (r.energy - st.energy0).abs() / st.energy0
        } else {
            (r.energy - st.energy0).abs()
        };
        st.max_energy_drift = st.max_energy_drift.max(drift);
        st.min_margin = st.min_margin.min(r.ineq_margin);
        if let Some(i) = r.virial {
            st.max_virial_excess = st.max_virial_excess.max(i.abs() - r.energy);
        }
        let finite = [r.t, r.energy, r.sup_ltil, r.min_lambda, r.ineq_margin]
            .into_iter()
            .chain([r.energy_mod, r.virial, r.virial_rhs, r.window_energy, r.continuity_residual, r.continuity_residual_e].into_iter().flatten())
            .all(f64::is_finite);
        if !finite {
            st.nonfinite += 1;
        }
        self.series.write(&r)?;

        if let Some((acc, table)) = self.norms.as_mut() {
            let n = acc.norms();
            let base = self.stats.norms0.map(|n0| n0.ltil_total() + n0.phi_total()).unwrap_or(0.0);
            let total = n.ltil_total() + n.phi_total();
            let ratio = if base > 0.0 { total / base } else { 0.0 };
            let pw = pointwise_bound_monitor(cur, grid, self.cfg.diagnostics.delta, self.setup.epsilon)?.max();
            let sob = weighted_sobolev_ratio(cur, grid, self.cfg.diagnostics.delta)?;
            self.stats.max_bootstrap_ratio = Some(self.stats.max_bootstrap_ratio.unwrap_or(0.0).max(ratio));
            self.stats.max_pointwise = Some(self.stats.max_pointwise.unwrap_or(0.0).max(pw));
            table.floats(&[cur.t, n.e0, n.e1, n.ebar0, n.ebar1, n.f0, n.f1, n.fbar0, n.fbar1, ratio, pw, sob])?;
        }

        if cur.t >= 2.0 {
            let (d, scale) = (&self.cfg.diagnostics, self.opts.scale);
            for &v in d.v.iter().filter(|v| v.abs() < 1.0) {
                let w = decay_window_scaled(cur, grid, v, cur.t, d.window(), scale)?;
                self.stats.windows.push((cur.t, v, w));
                if let Some(table) = self.virial.as_mut() {
                    let i = virial_scaled(cur, grid, v, cur.t, scale)?;
                    let rhs = virial_rhs_scaled(cur, grid, v, cur.t, scale)?;
                    let didt = match triple {
                        Some([a, _, c]) if a.t >= 2.0 => Some(
                            (virial_scaled(c, grid, v, c.t, scale)? - virial_scaled(a, grid, v, a.t, scale)?)
                                / (c.t - a.t),
                        ),
                        _ => None,
                    };
                    let resid = didt.map(|x| (x - rhs).abs());
                    if let Some(res) = resid {
                        let m = self.stats.max_identity_residual.unwrap_or(0.0).max(res);
                        self.stats.max_identity_residual = Some(m);
                    }
                    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
                    table.row([
                        fmt_f64(cur.t),
                        fmt_f64(v),
                        fmt_f64(i),
                        opt(didt),
                        fmt_f64(rhs),
                        opt(resid),
                        fmt_f64(w),
                    ])?;
                }
            }
        }
        Ok(())
    }

    fn finish(mut self) -> CliResult<RunStats> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        // the last slice is always recorded, without a forward neighbour
        if let Some(cur) = &self.cur {
            if self.pending || cur.step % self.cfg.solver.record_every != 0 {
                self.emit(None)?;
            }
        }
        self.series.finish()?;
        if let Some(t) = self.virial {
            t.finish()?;
        }
        if let Some((_, t)) = self.norms {
            t.finish()?;
        }
        Ok(self.stats)
    }
}

/// Evolves the configured data, writing every artifact into `out`.
pub fn evolve_and_record(cfg: &ExperimentConfig, out: &Path) -> CliResult<(Setup, RunSummary, RunStats)> {
    let setup = Setup::new(cfg)?;
    let mut recorder = Recorder::new(cfg, &setup, out)?;
    // every step is observed; the recorder applies the cadence itself
    let solver = SolverConfig {
        record_every: 1,
        ..cfg.solver()
    };
    let summary = evolve(&setup.initial, &setup.grid, &solver, |s| recorder.push(s))?;
    let stats = recorder.finish()?;
    Ok((setup, summary, stats))
}

pub fn execute(cfg: &ExperimentConfig, summary: &mut Summary) -> CliResult<()> {
    let out = &cfg.output;
    let (setup, run, stats) = evolve_and_record(cfg, out)?;
    summary.run = Some(RunReport::new(&run, &setup.grid));

    summary.detail("records", stats.records);
    summary.detail("energy_initial", stats.energy0);
    summary.detail("energy_final", total_energy(&run.final_state, &setup.grid)?);
    summary.detail("max_relative_energy_drift", stats.max_energy_drift);
    summary.detail("min_ineq_margin", stats.min_margin);
    summary.detail("max_continuity_residual", stats.max_continuity);
    summary.detail("sup_ltil_over_lambda", run.max_sup_ltil / setup.initial.lambda_bg);
    if let Some(n0) = stats.norms0 {
        summary.detail("weighted_energy_initial", n0.ltil_total() + n0.phi_total());
    }
    for (key, v) in [
        ("max_bootstrap_ratio", stats.max_bootstrap_ratio),
        ("max_pointwise_constant", stats.max_pointwise),
        ("max_chiral_residual", stats.max_chiral),
        ("max_abs_modified_energy", stats.max_modified_energy),
        ("max_virial_identity_residual", stats.max_identity_residual),
    ] {
        if let Some(v) = v {
            summary.detail(key, v);
        }
    }
    summary.detail(
        "snapshots",
        stats
            .snapshots
            .iter()
            .map(|(p, t)| (p.file_name().map(|f| f.to_string_lossy().into_owned()), *t))
            .collect::<Vec<_>>(),
    );

    summary
        .checks
        .push(Check::at_least("density_inequality_margin", stats.min_margin, -1e-10));
    summary
        .checks
        .push(Check::at_most("nonfinite_records", stats.nonfinite as f64, 0.0));
    match cfg.experiment {
        Experiment::VirialStudy => {
            summary
                .checks
                .push(Check::at_most("virial_bounded_by_energy", stats.max_virial_excess, 1e-12));
        }
        Experiment::DecayStudy => {
            for &v in cfg.diagnostics.v.iter() {
                let series: Vec<(f64, f64)> = stats
                    .windows
                    .iter()
                    .filter(|w| w.1 == v)
                    .map(|w| (w.0, w.2))
                    .collect();
                let first = series.iter().find(|w| w.0 >= 4.0 - 1e-9);
                if let (Some(&(t0, w0)), Some(&(t1, w1))) = (first, series.last()) {
                    let ratio = if w0 > 0.0 { w1 / w0 } else { 0.0 };
                    summary.checks.push(
                        Check::at_most(&format!("window_decay_v{v}"), ratio, 0.2)
                            .with_detail(format!("W({t1})/W({t0})")),
                    );
                }
            }
        }
        _ => {}
    }

    match run.termination {
        Termination::Completed => Ok(()),
        other => Err(CliError::Terminated {
            category: other.as_str(),
            message: run.error.map(|e| e.to_string()).unwrap_or_default(),
        }),
    }
}
