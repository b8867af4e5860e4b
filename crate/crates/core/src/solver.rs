//! Method-of-lines evolution of the shifted (Λ̃, φ) system with classical RK4.

use std::time::Instant;

use crate::error::{invalid, PcfError, Result};
use crate::grid::Grid;
use crate::numerics::coth;
use crate::state::FieldState;
use crate::stencil::{derivative_into, edge_derivative, laplacian_into};

pub const DEFAULT_CFL: f64 = 0.4;
pub const DEFAULT_SINGULARITY_FLOOR: f64 = 1e-6;

/// Treatment of the two end nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// One-sided advection at unit speed out of the domain.
    #[default]
    Outgoing,
    /// Dirichlet: end nodes keep their initial values.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub t_end: f64,
    /// Courant number used when building grids for this run.
    pub cfl: f64,
    pub boundary: Boundary,
    pub singularity_floor: f64,
    pub record_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            cfl: DEFAULT_CFL,
            boundary: Boundary::Outgoing,
            singularity_floor: DEFAULT_SINGULARITY_FLOOR,
            record_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t_end.is_finite() {
            return Err(invalid("t_end must be finite"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(invalid(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        if !(self.singularity_floor > 0.0 && self.singularity_floor.is_finite()) {
            return Err(invalid(format!(
                "singularity_floor = {} must be positive",
                self.singularity_floor
            )));
        }
        if self.record_every == 0 {
            return Err(invalid("record_every must be at least 1"));
        }
        Ok(())
    }

    /// Grid on `[x_min, x_max]` with `nx` nodes and `dt = cfl·dx`.
    pub fn grid(&self, x_min: f64, x_max: f64, nx: usize) -> Result<Grid> {
        Grid::with_cfl(x_min, x_max, nx, self.cfl)
    }
}

/// Nonlinear right sides of the two wave equations.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsValue {
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
}

/// F1 = −2 sinh(2Λ)((∂xφ)² − (∂tφ)²), F2 = −2 coth(Λ)(∂tφ ∂tΛ̃ − ∂xφ ∂xΛ̃),
/// guarded by the default singularity floor.
pub fn rhs(state: &FieldState, grid: &Grid) -> Result<RhsValue> {
    rhs_with_floor(state, grid, DEFAULT_SINGULARITY_FLOOR)
}

pub fn rhs_with_floor(state: &FieldState, grid: &Grid, floor: f64) -> Result<RhsValue> {
    grid.check_len(state.len(), "state")?;
    state.check_regular(floor)?;
    let n = state.len();
    let mut lx = vec![0.0; n];
    let mut px = vec![0.0; n];
    derivative_into(&state.ltil, grid.dx(), &mut lx);
    derivative_into(&state.phi, grid.dx(), &mut px);
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    for i in 0..n {
        let (a, b) = sources(
            state.lambda_total(i),
            lx[i],
            state.ltil_t[i],
            px[i],
            state.phi_t[i],
        );
        if !(a.is_finite() && b.is_finite()) {
            return Err(PcfError::NumericalOverflow { node: i, what: "rhs" });
        }
        f1[i] = a;
        f2[i] = b;
    }
    Ok(RhsValue { f1, f2 })
}

#[inline]
fn sources(lambda: f64, lx: f64, lt: f64, px: f64, pt: f64) -> (f64, f64) {
    let f1 = -2.0 * (2.0 * lambda).sinh() * (px * px - pt * pt);
    let f2 = -2.0 * coth(lambda) * (pt * lt - px * lx);
    (f1, f2)
}

/// The four evolved arrays, in the order Λ̃, ∂tΛ̃, φ, ∂tφ.
#[derive(Debug, Clone)]
struct Fields([Vec<f64>; 4]);

impl Fields {
    fn zeros(n: usize) -> Self {
        Fields([vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]])
    }

    fn from_state(s: &FieldState) -> Self {
        Fields([
            s.ltil.clone(),
            s.ltil_t.clone(),
            s.phi.clone(),
            s.phi_t.clone(),
        ])
    }
}

/// Stage rates and derivative scratch.
struct Work {
    k: [Fields; 4],
    lx: Vec<f64>,
    px: Vec<f64>,
}

/// Reusable buffers for one RK4 step.
struct Stepper {
    work: Work,
    stage: Fields,
}

impl Work {

    /// Time derivative of `y` written into `self.k[slot]`.
    fn rates(
        &mut self,
        y: &Fields,
        slot: usize,
        lambda_bg: f64,
        dx: f64,
        boundary: Boundary,
        floor: f64,
    ) -> Result<()> {
        let [l, lt, p, pt] = &y.0;
        let n = l.len();
        if let Some((node, value)) = l
            .iter()
            .map(|v| lambda_bg + v)
            .enumerate()
            .find(|(_, v)| !(*v >= floor))
        {
            if !value.is_finite() {
                return Err(PcfError::NumericalOverflow { node, what: "stage" });
            }
            let (node, value) = l
                .iter()
                .map(|v| lambda_bg + v)
                .enumerate()
                .fold((node, value), |acc, c| if c.1 < acc.1 { c } else { acc });
            return Err(PcfError::SingularityApproach { node, value, floor });
        }
        derivative_into(l, dx, &mut self.lx);
        derivative_into(p, dx, &mut self.px);
        let [dl, dlt, dp, dpt] = &mut self.k[slot].0;
        laplacian_into(l, dx, dlt);
        laplacian_into(p, dx, dpt);
        for i in 1..n - 1 {
            let (f1, f2) = sources(lambda_bg + l[i], self.lx[i], lt[i], self.px[i], pt[i]);
            dl[i] = lt[i];
            dp[i] = pt[i];
            dlt[i] += f1;
            dpt[i] += f2;
        }
        for (i, left) in [(0, true), (n - 1, false)] {
            match boundary {
                Boundary::Frozen => {
                    dl[i] = 0.0;
                    dlt[i] = 0.0;
                    dp[i] = 0.0;
                    dpt[i] = 0.0;
                }
                Boundary::Outgoing => {
                    // left end: u_t = u_x, right end: u_t = −u_x
                    let s = if left { 1.0 } else { -1.0 };
                    dl[i] = s * edge_derivative(l, dx, left);
                    dlt[i] = s * edge_derivative(lt, dx, left);
                    dp[i] = s * edge_derivative(p, dx, left);
                    dpt[i] = s * edge_derivative(pt, dx, left);
                }
            }
        }
        for (a, arr) in self.k[slot].0.iter().enumerate() {
            if let Some(node) = arr.iter().position(|v| !v.is_finite()) {
                let what = ["ltil rate", "ltil_t rate", "phi rate", "phi_t rate"][a];
                return Err(PcfError::NumericalOverflow { node, what });
            }
        }
        Ok(())
    }

}

impl Stepper {
    fn new(n: usize) -> Self {
        let z = || Fields::zeros(n);
        Self {
            work: Work {
                k: [z(), z(), z(), z()],
                lx: vec![0.0; n],
                px: vec![0.0; n],
            },
            stage: z(),
        }
    }

    fn set_stage(&mut self, y: &Fields, slot: usize, h: f64) {
        for a in 0..4 {
            let (dst, src, k) = (&mut self.stage.0[a], &y.0[a], &self.work.k[slot].0[a]);
            for i in 0..dst.len() {
                dst[i] = src[i] + h * k[i];
            }
        }
    }

    fn advance(
        &mut self,
        y: &mut Fields,
        lambda_bg: f64,
        dx: f64,
        dt: f64,
        boundary: Boundary,
        floor: f64,
    ) -> Result<()> {
        self.work.rates(y, 0, lambda_bg, dx, boundary, floor)?;
        for (slot, h) in [(1, 0.5 * dt), (2, 0.5 * dt), (3, dt)] {
            self.set_stage(y, slot - 1, h);
            self.work
                .rates(&self.stage, slot, lambda_bg, dx, boundary, floor)?;
        }
        let w = dt / 6.0;
        let k = &self.work.k;
        for a in 0..4 {
            let [k1, k2, k3, k4] = [&k[0].0[a], &k[1].0[a], &k[2].0[a], &k[3].0[a]];
            let dst = &mut y.0[a];
            for i in 0..dst.len() {
                dst[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
            }
        }
        Ok(())
    }
}

/// One RK4 step of size `grid.dt()`.
pub fn step(state: &FieldState, grid: &Grid, config: &SolverConfig) -> Result<FieldState> {
    step_by(state, grid, config, grid.dt())
}

/// One RK4 step of size `dt` (at most the grid's dt).
pub fn step_by(state: &FieldState, grid: &Grid, config: &SolverConfig, dt: f64) -> Result<FieldState> {
    grid.check_len(state.len(), "state")?;
    if !(dt > 0.0 && dt <= grid.dt() * (1.0 + 1e-12)) {
        return Err(invalid(format!(
            "step size {dt} must lie in (0, {}]",
            grid.dt()
        )));
    }
    let mut y = Fields::from_state(state);
    let mut st = Stepper::new(state.len());
    st.advance(
        &mut y,
        state.lambda_bg,
        grid.dx(),
        dt,
        config.boundary,
        config.singularity_floor,
    )?;
    into_state(y, state.t + dt, state.lambda_bg)
}

fn into_state(y: Fields, t: f64, lambda_bg: f64) -> Result<FieldState> {
    let [ltil, ltil_t, phi, phi_t] = y.0;
    FieldState::new(t, lambda_bg, ltil, ltil_t, phi, phi_t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    Singularity,
    Overflow,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Singularity => "singularity",
            Termination::Overflow => "overflow",
        }
    }
}

/// Where and how fast Λ was approaching zero when a run stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityInfo {
    pub node: usize,
    pub value: f64,
    pub t: f64,
    /// Rate of change of min Λ over the last accepted step (negative when falling).
    pub approach_rate: f64,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    /// The uniform step actually used, `(t_end − t0) / steps`.
    pub dt: f64,
    pub wall_seconds: f64,
    pub min_lambda: f64,
    pub max_sup_ltil: f64,
    pub termination: Termination,
    pub error: Option<PcfError>,
    pub singularity: Option<SingularityInfo>,
    /// Last good state.
    pub final_state: FieldState,
}

/// Number of uniform steps covering `[t0, t_end]` with step no larger than `dt`.
pub fn step_count(t0: f64, t_end: f64, dt: f64) -> usize {
    let span = t_end - t0;
    if span <= 0.0 {
        return 0;
    }
    (span / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Evolves `initial` to `config.t_end`.
///
/// The observer sees the initial state, every `record_every`-th step, and
/// the final (or last good) state. Failures after validation never escape:
/// they end the run with the matching termination reason.
pub fn evolve<F>(
    initial: &FieldState,
    grid: &Grid,
    config: &SolverConfig,
    mut observer: F,
) -> Result<RunSummary>
where
    F: FnMut(&FieldState),
{
    config.validate()?;
    grid.check_len(initial.len(), "initial state")?;
    initial.validate()?;
    if config.t_end < initial.t {
        return Err(invalid(format!(
            "t_end = {} precedes the initial time {}",
            config.t_end, initial.t
        )));
    }
    let started = Instant::now();
    let nsteps = step_count(initial.t, config.t_end, grid.dt());
    let dt = if nsteps == 0 {
        0.0
    } else {
        (config.t_end - initial.t) / nsteps as f64
    };
    let floor = config.singularity_floor;
    let (mut min_lambda, mut max_sup) = (initial.min_lambda().1, initial.sup_ltil());

    observer(initial);
    let mut summary = RunSummary {
        steps: 0,
        dt,
        wall_seconds: 0.0,
        min_lambda,
        max_sup_ltil: max_sup,
        termination: Termination::Completed,
        error: None,
        singularity: None,
        final_state: initial.clone(),
    };
    if let Err(e) = initial.check_regular(floor) {
        summary.termination = Termination::Singularity;
        summary.singularity = singularity_info(&e, initial.t, 0.0);
        summary.error = Some(e);
        summary.wall_seconds = started.elapsed().as_secs_f64();
        return Ok(summary);
    }

    let mut y = Fields::from_state(initial);
    let mut stepper = Stepper::new(initial.len());
    let mut last_observed = 0;
    let mut last_min = min_lambda;
    let mut rate = 0.0;
    let mut good = initial.clone();
    for k in 1..=nsteps {
        let t_next = if k == nsteps {
            config.t_end
        } else {
            initial.t + k as f64 * dt
        };
        let outcome = stepper
            .advance(&mut y, initial.lambda_bg, grid.dx(), dt, config.boundary, floor)
            .and_then(|_| {
                let s = into_state(y.clone(), t_next, initial.lambda_bg)?;
                s.check_regular(floor)?;
                Ok(s)
            });
        match outcome {
            Ok(s) => {
                let (_, m) = s.min_lambda();
                rate = (m - last_min) / dt;
                last_min = m;
                min_lambda = min_lambda.min(m);
                max_sup = max_sup.max(s.sup_ltil());
                summary.steps = k;
                if k % config.record_every == 0 || k == nsteps {
                    observer(&s);
                    last_observed = k;
                }
                good = s;
            }
            Err(e) => {
                summary.termination = match e {
                    PcfError::SingularityApproach { .. } => Termination::Singularity,
                    _ => Termination::Overflow,
                };
                if let PcfError::SingularityApproach { value, .. } = e {
                    min_lambda = min_lambda.min(value);
                }
                summary.singularity = singularity_info(&e, t_next, rate);
                if let Some(info) = &summary.singularity {
                    log::warn!(
                        "singularity approach at node {} (x = {:.6}), t = {:.6}: Lambda = {:e}, rate {:e}",
                        info.node,
                        grid.x(info.node),
                        info.t,
                        info.value,
                        info.approach_rate
                    );
                } else {
                    log::warn!("run stopped at t = {t_next:.6}: {e}");
                }
                summary.error = Some(e);
                if last_observed != summary.steps {
                    observer(&good);
                }
                break;
            }
        }
    }
    summary.min_lambda = min_lambda;
    summary.max_sup_ltil = max_sup;
    summary.final_state = good;
    summary.wall_seconds = started.elapsed().as_secs_f64();
    Ok(summary)
}

fn singularity_info(e: &PcfError, t: f64, rate: f64) -> Option<SingularityInfo> {
    match *e {
        PcfError::SingularityApproach { node, value, .. } => Some(SingularityInfo {
            node,
            value,
            t,
            approach_rate: rate,
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::with_cfl(-10.0, 10.0, 201, 0.4).unwrap()
    }

    fn pulse(g: &Grid, lambda_bg: f64, amp: f64) -> FieldState {
        let b = |x: f64| amp * (-(x * x)).exp();
        let n = g.nx();
        FieldState::new(
            0.0,
            lambda_bg,
            g.nodes().map(b).collect(),
            vec![0.0; n],
            g.nodes().map(|x| 0.5 * b(x - 1.0)).collect(),
            vec![0.0; n],
        )
        .unwrap()
    }

    #[test]
    fn constant_phi_gives_zero_sources() {
        let g = grid();
        let mut s = FieldState::background(&g, 1.0, 0.3, 0.0).unwrap();
        s.ltil.iter_mut().for_each(|v| *v = 0.2);
        let r = rhs(&s, &g).unwrap();
        assert!(r.f1.iter().chain(&r.f2).all(|&v| v.abs() < 1e-12));
        let cfg = SolverConfig::new(1.0);
        let next = step(&s, &g, &cfg).unwrap();
        assert!(next.ltil.iter().all(|&v| (v - 0.2).abs() < 1e-15));
    }

    #[test]
    fn rhs_guards_the_singularity() {
        let g = grid();
        let mut s = FieldState::background(&g, 0.5, 0.0, 0.0).unwrap();
        s.ltil[42] = -0.5;
        match rhs(&s, &g) {
            Err(PcfError::SingularityApproach { node, value, .. }) => {
                assert_eq!(node, 42);
                assert_eq!(value, 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = grid();
        let s = FieldState::background(&g, 1.0, 0.0, 0.0).unwrap();
        let sum = evolve(&s, &g, &SolverConfig::new(2.0), |_| {}).unwrap();
        assert_eq!(sum.termination, Termination::Completed);
        assert!(sum.final_state.max_abs_diff(&FieldState { t: 2.0, ..s }) == 0.0);
    }

    #[test]
    fn empty_run_completes_without_steps() {
        let g = grid();
        let s = pulse(&g, 1.0, 0.01);
        let mut seen = 0;
        let sum = evolve(&s, &g, &SolverConfig::new(0.0), |_| seen += 1).unwrap();
        assert_eq!(sum.steps, 0);
        assert_eq!(sum.termination, Termination::Completed);
        assert_eq!(seen, 1);
    }

    #[test]
    fn observer_cadence_and_final_time() {
        let g = grid();
        let s = pulse(&g, 1.0, 0.01);
        let cfg = SolverConfig {
            record_every: 7,
            ..SolverConfig::new(1.0)
        };
        let mut times = Vec::new();
        let sum = evolve(&s, &g, &cfg, |st| times.push(st.t)).unwrap();
        assert_eq!(sum.steps, 25);
        assert_eq!(times.len(), 1 + 3 + 1);
        assert_eq!(*times.last().unwrap(), 1.0);
        assert_eq!(sum.final_state.t, 1.0);
    }

    #[test]
    fn large_data_stops_with_singularity() {
        let g = grid();
        let mut s = pulse(&g, 0.5, 0.0);
        let n = g.nx();
        s.ltil_t = g.nodes().map(|x| -2.0 * (-(x * x)).exp()).collect();
        assert_eq!(s.ltil_t.len(), n);
        let mut last_t = 0.0;
        let sum = evolve(&s, &g, &SolverConfig::new(5.0), |st| last_t = st.t).unwrap();
        assert_eq!(sum.termination, Termination::Singularity);
        let info = sum.singularity.unwrap();
        assert!(info.approach_rate < 0.0);
        assert!(sum.final_state.is_regular(1e-6));
        assert_eq!(last_t, sum.final_state.t);
        assert!(sum.final_state.t < 1.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let g = grid();
        let s = pulse(&g, 1.0, 0.01);
        let bad = SolverConfig {
            record_every: 0,
            ..SolverConfig::new(1.0)
        };
        assert!(evolve(&s, &g, &bad, |_| {}).is_err());
        let bad = SolverConfig {
            cfl: 1.5,
            ..SolverConfig::new(1.0)
        };
        assert!(bad.validate().is_err());
        let mut early = s.clone();
        early.t = 2.0;
        assert!(evolve(&early, &g, &SolverConfig::new(1.0), |_| {}).is_err());
    }

    #[test]
    fn frozen_boundary_keeps_end_values() {
        let g = grid();
        let s = pulse(&g, 1.0, 0.01);
        let cfg = SolverConfig {
            boundary: Boundary::Frozen,
            ..SolverConfig::new(1.0)
        };
        let next = step(&s, &g, &cfg).unwrap();
        assert_eq!(next.ltil[0], s.ltil[0]);
        assert_eq!(next.phi[g.nx() - 1], s.phi[g.nx() - 1]);
    }
}
