//! The 2×2 metric block g(Λ, φ), the chiral field residual, the source G
//! and the d'Alembert–Duhamel reconstruction of ln f.

use crate::error::{invalid, PcfError, Result};
use crate::grid::Grid;
use crate::initdata::Profile;
use crate::numerics::{integrate_interval, sinh_sq};
use crate::state::FieldState;
use crate::stencil::spatial_derivative;

/// Samples of a symmetric 2×2 metric block; g21 = g12 by storage.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    pub t: f64,
    pub alpha: f64,
    pub g11: Vec<f64>,
    pub g12: Vec<f64>,
    pub g22: Vec<f64>,
}

impl MetricField {
    pub fn len(&self) -> usize {
        self.g11.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g11.is_empty()
    }

    pub fn det(&self, i: usize) -> f64 {
        self.g11[i] * self.g22[i] - self.g12[i] * self.g12[i]
    }

    /// max_i |det g − α²|.
    pub fn det_deviation(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        (0..self.len()).map(|i| (self.det(i) - a2).abs()).fold(0.0, f64::max)
    }

    fn at(&self, i: usize) -> Mat {
        [[self.g11[i], self.g12[i]], [self.g12[i], self.g22[i]]]
    }
}

/// g = α [[cosh Λ + cos 2φ sinh Λ, sin 2φ sinh Λ], [sin 2φ sinh Λ, cosh Λ − cos 2φ sinh Λ]].
pub fn assemble_g(lambda: &[f64], phi: &[f64], alpha: f64) -> Result<MetricField> {
    if lambda.len() != phi.len() {
        return Err(invalid(format!(
            "Lambda has {} samples, phi has {}",
            lambda.len(),
            phi.len()
        )));
    }
    if !alpha.is_finite() {
        return Err(invalid("alpha must be finite"));
    }
    let n = lambda.len();
    let (mut g11, mut g12, mut g22) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let (l, p) = (lambda[i], phi[i]);
        if !(l.is_finite() && p.is_finite()) {
            return Err(invalid(format!("non-finite input at node {i}")));
        }
        let (ch, sh) = (l.cosh(), l.sinh());
        if !ch.is_finite() {
            return Err(PcfError::NumericalOverflow { node: i, what: "metric" });
        }
        let (s2, c2) = (2.0 * p).sin_cos();
        g11.push(alpha * (ch + c2 * sh));
        g12.push(alpha * s2 * sh);
        g22.push(alpha * (ch - c2 * sh));
    }
    Ok(MetricField {
        t: 0.0,
        alpha,
        g11,
        g12,
        g22,
    })
}

/// The metric of a state, α = 1.
pub fn metric_of_state(state: &FieldState) -> Result<MetricField> {
    let mut m = assemble_g(&state.lambda_total_vec(), &state.phi, 1.0)?;
    m.t = state.t;
    Ok(m)
}

type Mat = [[f64; 2]; 2];

fn mul(a: &Mat, b: &Mat) -> Mat {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Closed-form inverse; rejects |det| < 1e-8.
fn inverse(a: &Mat, node: usize) -> Result<Mat> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(det.abs() >= 1e-8) {
        return Err(PcfError::DomainError(format!(
            "near-singular metric (det = {det:e}) at node {node}"
        )));
    }
    Ok([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

/// Midpoint flux (b − a)/h · ((a + b)/2)⁻¹, a second-order approximation of
/// ∂g·g⁻¹ halfway between two samples.
fn flux(a: &Mat, b: &Mat, h: f64, node: usize) -> Result<Mat> {
    let mut d = [[0.0; 2]; 2];
    let mut m = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            d[r][c] = (b[r][c] - a[r][c]) / h;
            m[r][c] = 0.5 * (a[r][c] + b[r][c]);
        }
    }
    Ok(mul(&d, &inverse(&m, node)?))
}

/// max over interior nodes and matrix entries of ∂t(∂tg·g⁻¹) − ∂x(∂xg·g⁻¹)
/// at the middle slice.
pub fn chiral_residual(history: [&MetricField; 3], grid: &Grid) -> Result<f64> {
    let [a, b, c] = history;
    for m in history {
        grid.check_len(m.len(), "metric")?;
    }
    let (h1, h2) = (b.t - a.t, c.t - b.t);
    if !(h1 > 0.0) || (h1 - h2).abs() > 1e-9 * h1.max(h2) {
        return Err(invalid(format!(
            "metric slices must be uniformly spaced in time (steps {h1}, {h2})"
        )));
    }
    let dx = grid.dx();
    let mut worst = 0.0f64;
    for i in 1..grid.nx() - 1 {
        let mid = b.at(i);
        let ft0 = flux(&a.at(i), &mid, h1, i)?;
        let ft1 = flux(&mid, &c.at(i), h1, i)?;
        let fx0 = flux(&b.at(i - 1), &mid, dx, i)?;
        let fx1 = flux(&mid, &b.at(i + 1), dx, i)?;
        for r in 0..2 {
            for col in 0..2 {
                let v = (ft1[r][col] - ft0[r][col]) / h1 - (fx1[r][col] - fx0[r][col]) / dx;
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// G = −½(Λt² − Λx²) − 2 sinh²Λ (φt² − φx²).
pub fn source_g(state: &FieldState, grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(state.len(), "state")?;
    let lx = spatial_derivative(&state.ltil, grid)?;
    let px = spatial_derivative(&state.phi, grid)?;
    (0..state.len())
        .map(|i| {
            let (lt, pt) = (state.ltil_t[i], state.phi_t[i]);
            let g = -0.5 * (lt * lt - lx[i] * lx[i])
                - 2.0 * sinh_sq(state.lambda_total(i)) * (pt * pt - px[i] * px[i]);
            if g.is_finite() {
                Ok(g)
            } else {
                Err(PcfError::NumericalOverflow { node: i, what: "source G" })
            }
        })
        .collect()
}

/// Source samples on a fixed grid at increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceHistory {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SourceHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(invalid(format!("source slices must advance in time ({t} after {last})")));
            }
        }
        self.times.push(t);
        self.values.push(values);
        Ok(())
    }
}

/// ψ(t, x) for □ψ = source with ψ = psi0, ∂tψ = psi1 at the first stored time:
/// ½(ψ0(x+τ) + ψ0(x−τ)) + ½∫_{x−τ}^{x+τ} ψ1 + ½∬_cone source, τ = t − t0.
pub fn dalembert_solve(
    psi0: &dyn Profile,
    psi1: &dyn Profile,
    source: &SourceHistory,
    t: f64,
    x: f64,
    grid: &Grid,
) -> Result<f64> {
    let t0 = *source
        .times
        .first()
        .ok_or_else(|| invalid("empty source history"))?;
    let tau = t - t0;
    if !(tau >= 0.0) {
        return Err(invalid(format!("t = {t} precedes the data time {t0}")));
    }
    let tol = 1e-9 * grid.dx();
    if x - tau < grid.x_min() - tol || x + tau > grid.x_max() + tol {
        return Err(invalid(format!(
            "backward light cone of ({t}, {x}) leaves the grid [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let t_last = *source.times.last().unwrap();
    if t > t_last + 1e-9 * (1.0 + t.abs()) {
        return Err(invalid(format!("source history ends at {t_last}, before t = {t}")));
    }
    for v in &source.values {
        grid.check_len(v.len(), "source slice")?;
    }

    let free = 0.5 * (psi0.value(x + tau) + psi0.value(x - tau)) + 0.5 * simpson(psi1, x - tau, x + tau);

    // inner integral over the cone cross-section at each stored time
    let inner = |j: usize| {
        let half = t - source.times[j];
        integrate_interval(&source.values[j], grid, x - half, x + half)
    };
    let mut cone = 0.0;
    let mut prev = inner(0);
    for j in 1..source.times.len() {
        let (s0, s1) = (source.times[j - 1], source.times[j]);
        if s1 <= t {
            let cur = inner(j);
            cone += 0.5 * (s1 - s0) * (prev + cur);
            prev = cur;
        } else {
            // the cross-section shrinks to zero width at s = t
            cone += 0.5 * (t - s0) * prev;
            break;
        }
    }
    Ok(free + 0.5 * cone)
}

fn simpson(f: &dyn Profile, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = 4096;
    let h = (b - a) / n as f64;
    let mut s = f.value(a) + f.value(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f.value(a + i as f64 * h);
    }
    s * h / 3.0
}
