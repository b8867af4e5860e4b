use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::null::NullFrame;
use crate::numerics::{interpolate, trapezoid};
use crate::state::{FieldSelector, FieldState};
use crate::stencil::spatial_derivative;

pub const DEFAULT_DELTA: f64 = 0.5;

/// Slice energies E_k, Ē_k and null-line suprema F_k, F̄_k (k = 0, 1).
/// Unbarred quantities refer to Λ̃, barred ones to φ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeightedNorms {
    pub t: f64,
    pub delta: f64,
    pub e0: f64,
    pub e1: f64,
    pub ebar0: f64,
    pub ebar1: f64,
    pub f0: f64,
    pub f1: f64,
    pub fbar0: f64,
    pub fbar1: f64,
}

impl WeightedNorms {
    /// E + F for Λ̃.
    pub fn ltil_total(&self) -> f64 {
        self.e0 + self.e1 + self.f0 + self.f1
    }

    /// Ē + F̄ for φ.
    pub fn phi_total(&self) -> f64 {
        self.ebar0 + self.ebar1 + self.fbar0 + self.fbar1
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta = {delta} must lie in (0, 1)")));
    }
    Ok(())
}

/// φ(s) = (1 + s²)^{1+δ}.
#[inline]
pub fn weight(s: f64, delta: f64) -> f64 {
    (1.0 + s * s).powf(1.0 + delta)
}

/// Frames of ∂ₓᵏ f for k = 0, 1.
fn frames(state: &FieldState, which: FieldSelector, grid: &Grid) -> Result<[NullFrame; 2]> {
    let (f, ft) = state.field(which);
    let f0 = NullFrame::from_arrays(f, ft, grid, state.t)?;
    let fx = spatial_derivative(f, grid)?;
    let ftx = spatial_derivative(ft, grid)?;
    let f1 = NullFrame::from_arrays(&fx, &ftx, grid, state.t)?;
    Ok([f0, f1])
}

/// Per-node integrands (φ(ū)|L̄·|², φ(u)|L·|²) of one slice, in the order
/// (Λ̃, k=0), (Λ̃, k=1), (φ, k=0), (φ, k=1).
fn slice_integrands(state: &FieldState, grid: &Grid, delta: f64) -> Result<[(Vec<f64>, Vec<f64>); 4]> {
    let [a0, a1] = frames(state, FieldSelector::Ltil, grid)?;
    let [b0, b1] = frames(state, FieldSelector::Phi, grid)?;
    let build = |fr: &NullFrame| {
        let lb = (0..fr.l.len())
            .map(|i| weight(fr.ub[i], delta) * fr.lb[i] * fr.lb[i])
            .collect();
        let l = (0..fr.l.len())
            .map(|i| weight(fr.u[i], delta) * fr.l[i] * fr.l[i])
            .collect();
        (lb, l)
    };
    Ok([build(&a0), build(&a1), build(&b0), build(&b1)])
}

/// E_k and Ē_k of one slice: [E0, E1, Ē0, Ē1].
pub fn slice_energies(state: &FieldState, grid: &Grid, delta: f64) -> Result<[f64; 4]> {
    check_delta(delta)?;
    grid.check_len(state.len(), "state")?;
    let ints = slice_integrands(state, grid, delta)?;
    let mut out = [0.0; 4];
    for (o, (lb, l)) in out.iter_mut().zip(&ints) {
        *o = trapezoid(lb, grid.dx()) + trapezoid(l, grid.dx());
    }
    Ok(out)
}

/// Running line integrals along one family of null lines.
#[derive(Debug, Clone)]
struct LineFamily {
    /// +1 for lines x + t = c, −1 for lines x − t = c.
    sign: f64,
    origin: f64,
    /// Per line, per quantity: (integral so far, integrand at the previous slice).
    lines: Vec<[(f64, f64); 4]>,
}

impl LineFamily {
    fn new(sign: f64, origin: f64) -> Self {
        Self {
            sign,
            origin,
            lines: Vec::new(),
        }
    }

    /// Lines are c_k = origin + sign·k·dx; a line crosses the slice at x = c − sign·t.
    fn push(&mut self, grid: &Grid, t: f64, dt: Option<f64>, ints: [&[f64]; 4]) {
        let dx = grid.dx();
        let reach = |x: f64| (self.sign * (x + self.sign * t - self.origin) / dx).floor();
        let k_hi = reach(if self.sign > 0.0 { grid.x_max() } else { grid.x_min() });
        if k_hi >= 0.0 && self.lines.len() < k_hi as usize + 1 {
            self.lines.resize(k_hi as usize + 1, [(0.0, 0.0); 4]);
        }
        for (k, line) in self.lines.iter_mut().enumerate() {
            let c = self.origin + self.sign * k as f64 * dx;
            let x = c - self.sign * t;
            for q in 0..4 {
                let g = interpolate(ints[q], grid, x).unwrap_or(0.0);
                let (acc, prev) = &mut line[q];
                if let Some(dt) = dt {
                    *acc += 0.5 * dt * (*prev + g);
                }
                *prev = g;
            }
        }
    }

    fn sup(&self) -> [f64; 4] {
        let mut out = [0.0f64; 4];
        for line in &self.lines {
            for q in 0..4 {
                out[q] = out[q].max(line[q].0);
            }
        }
        out
    }
}

/// Streams slices of a run and maintains the weighted norms.
///
/// Left-moving lines x + t = c carry φ(ū)|L̄·|², right-moving lines x − t = c
/// carry φ(u)|L·|²; line values come from linear interpolation of each slice
/// and the time integral is a trapezoid over the pushed slices.
#[derive(Debug, Clone)]
pub struct NormAccumulator {
    grid: Grid,
    delta: f64,
    last_t: Option<f64>,
    left: Option<LineFamily>,
    right: Option<LineFamily>,
    current: WeightedNorms,
}

impl NormAccumulator {
    pub fn new(grid: &Grid, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self {
            grid: *grid,
            delta,
            last_t: None,
            left: None,
            right: None,
            current: WeightedNorms {
                delta,
                ..Default::default()
            },
        })
    }

    pub fn push(&mut self, state: &FieldState) -> Result<WeightedNorms> {
        self.grid.check_len(state.len(), "state")?;
        let dt = match self.last_t {
            Some(t0) if state.t <= t0 => {
                return Err(invalid(format!(
                    "slices must advance in time ({} after {t0})",
                    state.t
                )))
            }
            Some(t0) => Some(state.t - t0),
            None => None,
        };
        let t = state.t;
        let ints = slice_integrands(state, &self.grid, self.delta)?;
        let g = self.grid;
        let left = self
            .left
            .get_or_insert_with(|| LineFamily::new(1.0, g.x_min() + t));
        left.push(&g, t, dt, [&ints[0].0, &ints[1].0, &ints[2].0, &ints[3].0]);
        let right = self
            .right
            .get_or_insert_with(|| LineFamily::new(-1.0, g.x_max() - t));
        right.push(&g, t, dt, [&ints[0].1, &ints[1].1, &ints[2].1, &ints[3].1]);
        let (fl, fr) = (left.sup(), right.sup());
        let e: Vec<f64> = ints
            .iter()
            .map(|(lb, l)| trapezoid(lb, g.dx()) + trapezoid(l, g.dx()))
            .collect();
        self.current = WeightedNorms {
            t,
            delta: self.delta,
            e0: e[0],
            e1: e[1],
            ebar0: e[2],
            ebar1: e[3],
            f0: fl[0] + fr[0],
            f1: fl[1] + fr[1],
            fbar0: fl[2] + fr[2],
            fbar1: fl[3] + fr[3],
        };
        self.last_t = Some(t);
        Ok(self.current)
    }

    pub fn norms(&self) -> WeightedNorms {
        self.current
    }
}

/// Weighted norms at the last slice of a stored run.
pub fn weighted_norms(history: &[FieldState], grid: &Grid, delta: f64) -> Result<WeightedNorms> {
    if history.len() < 2 {
        return Err(invalid(format!(
            "weighted norms need at least 2 slices, got {}",
            history.len()
        )));
    }
    let mut acc = NormAccumulator::new(grid, delta)?;
    for s in history {
        acc.push(s)?;
    }
    Ok(acc.norms())
}

/// Empirical constants of the pointwise decay bounds, each a sup over the slice.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointwiseBounds {
    /// sup (1 + u²)^{(1+δ)/2} |LΛ̃| / ε
    pub l_ltil: f64,
    /// sup (1 + ū²)^{(1+δ)/2} |L̄Λ̃| / ε
    pub lb_ltil: f64,
    pub l_phi: f64,
    pub lb_phi: f64,
}

impl PointwiseBounds {
    pub fn max(&self) -> f64 {
        self.l_ltil.max(self.lb_ltil).max(self.l_phi).max(self.lb_phi)
    }
}

pub fn pointwise_bound_monitor(state: &FieldState, grid: &Grid, delta: f64, epsilon: f64) -> Result<PointwiseBounds> {
    check_delta(delta)?;
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon = {epsilon} must be positive")));
    }
    let sup = |vals: &[f64], coord: &[f64]| {
        vals.iter()
            .zip(coord)
            .map(|(v, s)| weight(*s, delta).sqrt() * v.abs())
            .fold(0.0, f64::max)
            / epsilon
    };
    let [a, _] = frames(state, FieldSelector::Ltil, grid)?;
    let [b, _] = frames(state, FieldSelector::Phi, grid)?;
    Ok(PointwiseBounds {
        l_ltil: sup(&a.l, &a.u),
        lb_ltil: sup(&a.lb, &a.ub),
        l_phi: sup(&b.l, &b.u),
        lb_phi: sup(&b.lb, &b.ub),
    })
}

/// Largest ratio ‖w·Df‖_∞ / (‖w·Df‖₂ + ‖w·D∂ₓf‖₂) over D ∈ {L, L̄} and f ∈ {Λ̃, φ},
/// with w = φ(ū)^{1/2}/φ(u)^{1/4} for L̄ and φ(u)^{1/2}/φ(ū)^{1/4} for L.
pub fn weighted_sobolev_ratio(state: &FieldState, grid: &Grid, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let mut best = 0.0f64;
    for which in [FieldSelector::Ltil, FieldSelector::Phi] {
        let [f0, f1] = frames(state, which, grid)?;
        let n = f0.l.len();
        let w_lb: Vec<f64> = (0..n)
            .map(|i| weight(f0.ub[i], delta).sqrt() / weight(f0.u[i], delta).powf(0.25))
            .collect();
        let w_l: Vec<f64> = (0..n)
            .map(|i| weight(f0.u[i], delta).sqrt() / weight(f0.ub[i], delta).powf(0.25))
            .collect();
        for (w, d0, d1) in [(&w_lb, &f0.lb, &f1.lb), (&w_l, &f0.l, &f1.l)] {
            let sup = (0..n).map(|i| (w[i] * d0[i]).abs()).fold(0.0, f64::max);
            let l2 = |d: &[f64]| {
                let sq: Vec<f64> = (0..n).map(|i| (w[i] * d[i]).powi(2)).collect();
                trapezoid(&sq, grid.dx()).sqrt()
            };
            let den = l2(d0) + l2(d1);
            if den > 0.0 {
                best = best.max(sup / den);
            }
        }
    }
    Ok(best)
}
