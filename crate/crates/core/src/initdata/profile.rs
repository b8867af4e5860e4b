//! Compactly supported bump profiles and the data built from them.

use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::state::FieldState;

/// A twice-differentiable scalar profile h(s) with its first two derivatives.
pub trait Profile: Send + Sync {
    fn value(&self, s: f64) -> f64;
    fn d1(&self, s: f64) -> f64;
    fn d2(&self, s: f64) -> f64;
}

/// The identically zero profile.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Zero;

impl Profile for Zero {
    fn value(&self, _: f64) -> f64 {
        0.0
    }
    fn d1(&self, _: f64) -> f64 {
        0.0
    }
    fn d2(&self, _: f64) -> f64 {
        0.0
    }
}

/// Unit-height bump shapes on s ∈ [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shape {
    /// (1 − s²)⁴; value and first three derivatives vanish at |s| = 1.
    #[default]
    SmoothCompact,
    /// exp(−12.5 s²) cut off at |s| = 1 (jump of about 4e-6 at the cut).
    GaussianTruncated,
    /// e·exp(−1/(1 − s²)), C^∞.
    Mollifier,
}

impl Shape {
    /// (b, b′, b″) with respect to s.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        if s.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let q = 1.0 - s * s;
        match self {
            Shape::SmoothCompact => {
                let q2 = q * q;
                let q3 = q2 * q;
                (q3 * q, -8.0 * s * q3, -8.0 * q3 + 48.0 * s * s * q2)
            }
            Shape::GaussianTruncated => {
                let b = (-12.5 * s * s).exp();
                (b, -25.0 * s * b, (625.0 * s * s - 25.0) * b)
            }
            Shape::Mollifier => {
                if q < 1e-3 {
                    return (0.0, 0.0, 0.0);
                }
                let b = (1.0 - 1.0 / q).exp();
                let (q2, q3) = (q * q, q * q * q);
                let d1 = -2.0 * s / q2 * b;
                let d2 = b * (4.0 * s * s / (q2 * q2) - 2.0 / q2 - 8.0 * s * s / q3);
                (b, d1, d2)
            }
        }
    }
}

/// How the time derivative of a bump is initialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Launch {
    /// ∂t f = 0.
    #[default]
    AtRest,
    /// f(t, x) = b(x − t) at t = 0, so ∂t f = −b′.
    Right,
    /// f(t, x) = b(x + t), so ∂t f = b′.
    Left,
}

/// An amplitude-ε bump, ε·shape((x − center)/width).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub epsilon: f64,
    pub center: f64,
    pub width: f64,
    pub shape: Shape,
    pub launch: Launch,
    /// Extra time derivative, `kick · shape`, added on top of `launch`.
    pub kick: f64,
}

impl BumpSpec {
    pub fn new(epsilon: f64, center: f64, width: f64) -> Self {
        Self {
            epsilon,
            center,
            width,
            shape: Shape::SmoothCompact,
            launch: Launch::AtRest,
            kick: 0.0,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    pub fn with_shape(self, shape: Shape) -> Self {
        Self { shape, ..self }
    }

    pub fn with_launch(self, launch: Launch) -> Self {
        Self { launch, ..self }
    }

    pub fn with_kick(self, kick: f64) -> Self {
        Self { kick, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.center.is_finite() && self.kick.is_finite()) {
            return Err(invalid("bump parameters must be finite"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(invalid(format!("bump width = {} must be positive", self.width)));
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// Initial time derivative at `x`.
    pub fn rate(&self, x: f64) -> f64 {
        let launch = match self.launch {
            Launch::AtRest => 0.0,
            Launch::Right => -self.d1(x),
            Launch::Left => self.d1(x),
        };
        let kick = if self.kick == 0.0 {
            0.0
        } else {
            self.kick * self.shape.eval((x - self.center) / self.width).0
        };
        launch + kick
    }
}

impl Profile for BumpSpec {
    fn value(&self, x: f64) -> f64 {
        self.epsilon * self.shape.eval((x - self.center) / self.width).0
    }
    fn d1(&self, x: f64) -> f64 {
        self.epsilon * self.shape.eval((x - self.center) / self.width).1 / self.width
    }
    fn d2(&self, x: f64) -> f64 {
        let w = self.width;
        self.epsilon * self.shape.eval((x - self.center) / w).2 / (w * w)
    }
}

/// Compactly supported data around the background λ at t = 0.
pub fn bump_data(spec_l: &BumpSpec, spec_phi: &BumpSpec, lambda_bg: f64, grid: &Grid) -> Result<FieldState> {
    for (name, spec) in [("Lambda", spec_l), ("phi", spec_phi)] {
        spec.validate()?;
        let (a, b) = spec.support();
        let idle = spec.epsilon == 0.0 && spec.kick == 0.0;
        if !idle && (a <= grid.x_min() || b >= grid.x_max()) {
            return Err(invalid(format!(
                "{name} bump support [{a}, {b}] leaves the grid interior ({}, {})",
                grid.x_min(),
                grid.x_max()
            )));
        }
    }
    FieldState::new(
        0.0,
        lambda_bg,
        grid.nodes().map(|x| spec_l.value(x)).collect(),
        grid.nodes().map(|x| spec_l.rate(x)).collect(),
        grid.nodes().map(|x| spec_phi.value(x)).collect(),
        grid.nodes().map(|x| spec_phi.rate(x)).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Profiles of x + t.
    Left,
    /// Profiles of x − t.
    #[default]
    Right,
}

impl Direction {
    /// Sign σ with argument x − σt.
    pub fn sign(&self) -> f64 {
        match self {
            Direction::Right => 1.0,
            Direction::Left => -1.0,
        }
    }
}

/// Λ = λ + h(x ∓ t), φ = k(x ∓ t), an exact solution for any profiles.
pub fn traveling_wave(
    h: &dyn Profile,
    k: &dyn Profile,
    direction: Direction,
    lambda_bg: f64,
    grid: &Grid,
    t: f64,
) -> Result<FieldState> {
    let s = direction.sign();
    let arg = |x: f64| x - s * t;
    FieldState::new(
        t,
        lambda_bg,
        grid.nodes().map(|x| h.value(arg(x))).collect(),
        grid.nodes().map(|x| -s * h.d1(arg(x))).collect(),
        grid.nodes().map(|x| k.value(arg(x))).collect(),
        grid.nodes().map(|x| -s * k.d1(arg(x))).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::with_cfl(-20.0, 20.0, 401, 0.4).unwrap()
    }

    #[test]
    fn shape_derivatives_match_differences() {
        let h = 1e-5;
        for shape in [Shape::SmoothCompact, Shape::GaussianTruncated, Shape::Mollifier] {
            for &s in &[-0.9, -0.5, -0.1, 0.0, 0.3, 0.77] {
                let (_, d1, d2) = shape.eval(s);
                let fd1 = (shape.eval(s + h).0 - shape.eval(s - h).0) / (2.0 * h);
                let fd2 = (shape.eval(s + h).1 - shape.eval(s - h).1) / (2.0 * h);
                assert!((d1 - fd1).abs() < 1e-7, "{shape:?} d1 at {s}");
                assert!((d2 - fd2).abs() < 1e-6, "{shape:?} d2 at {s}");
            }
        }
    }

    #[test]
    fn zero_amplitude_is_background() {
        let g = grid();
        let s = bump_data(&BumpSpec::zero(), &BumpSpec::zero(), 1.0, &g).unwrap();
        assert_eq!(s.sup_ltil(), 0.0);
        assert!(s.phi.iter().chain(&s.phi_t).chain(&s.ltil_t).all(|&v| v == 0.0));
    }

    #[test]
    fn smooth_compact_vanishes_outside_support() {
        let g = grid();
        let spec = BumpSpec::new(0.3, 2.0, 4.0).with_launch(Launch::Right);
        let s = bump_data(&spec, &BumpSpec::zero(), 1.0, &g).unwrap();
        let d = crate::stencil::spatial_derivative(&s.ltil, &g).unwrap();
        for (i, x) in g.nodes().enumerate() {
            if !(-2.0 - g.dx()..=6.0 + g.dx()).contains(&x) {
                assert_eq!(s.ltil[i], 0.0);
                assert_eq!(s.ltil_t[i], 0.0);
                assert_eq!(d[i], 0.0);
            }
        }
    }

    #[test]
    fn support_outside_grid_is_rejected() {
        let g = grid();
        let spec = BumpSpec::new(0.1, 18.0, 3.0);
        assert!(bump_data(&spec, &BumpSpec::zero(), 1.0, &g).is_err());
        assert!(bump_data(&BumpSpec::zero(), &spec, 1.0, &g).is_err());
        assert!(bump_data(&BumpSpec::new(0.1, 0.0, -1.0), &BumpSpec::zero(), 1.0, &g).is_err());
    }

    #[test]
    fn traveling_wave_time_derivative_follows_direction() {
        let g = grid();
        let h = BumpSpec::new(0.2, 0.0, 3.0);
        let r = traveling_wave(&h, &Zero, Direction::Right, 1.0, &g, 1.5).unwrap();
        let l = traveling_wave(&h, &Zero, Direction::Left, 1.0, &g, -1.5).unwrap();
        for (i, x) in g.nodes().enumerate() {
            assert_eq!(r.ltil[i], h.value(x - 1.5));
            assert_eq!(r.ltil_t[i], -h.d1(x - 1.5));
            assert_eq!(l.ltil[i], h.value(x - 1.5));
            assert_eq!(l.ltil_t[i], h.d1(x - 1.5));
        }
        let bg = traveling_wave(&Zero, &Zero, Direction::Right, 0.7, &g, 0.0).unwrap();
        assert_eq!(bg, FieldState::background(&g, 0.7, 0.0, 0.0).unwrap());
    }
}
