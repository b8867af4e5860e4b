use crate::density::densities;
use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::numerics::{integrate_interval, sech, sinh_sq, trapezoid};
use crate::state::FieldState;
use crate::stencil::spatial_derivative;

/// Choice of the window scale λ(t), defined for t ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    /// λ(t) = t / log²t.
    #[default]
    LogSquared,
    /// λ(t) = t² / log t.
    Quadratic,
}

impl Scale {
    /// (λ(t), λ′(t)/λ(t)).
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let lg = t.ln();
        match self {
            Scale::LogSquared => (t / (lg * lg), (1.0 - 2.0 / lg) / t),
            Scale::Quadratic => (t * t / lg, (2.0 - 1.0 / lg) / t),
        }
    }
}

/// Weight of the decay window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// Indicator of [vt − λ(t), vt + λ(t)].
    Sharp,
    /// sech⁴((x − vt)/λ(t)).
    #[default]
    Sech4,
}

fn check(v: f64, t: f64) -> Result<()> {
    if !(v.abs() < 1.0) {
        return Err(invalid(format!("window speed |v| = {} must be < 1", v.abs())));
    }
    if !(t >= 2.0) {
        return Err(invalid(format!("window scale needs t ≥ 2, got t = {t}")));
    }
    Ok(())
}

/// I(t) = −∫ tanh((x − vt)/λ(t)) p dx.
pub fn virial(state: &FieldState, grid: &Grid, v: f64, t: f64) -> Result<f64> {
    virial_scaled(state, grid, v, t, Scale::default())
}

pub fn virial_scaled(state: &FieldState, grid: &Grid, v: f64, t: f64, scale: Scale) -> Result<f64> {
    check(v, t)?;
    let d = densities(state, grid)?;
    let (lam, _) = scale.eval(t);
    let vals: Vec<f64> = grid
        .nodes()
        .zip(&d.p)
        .map(|(x, p)| -((x - v * t) / lam).tanh() * p)
        .collect();
    Ok(trapezoid(&vals, grid.dx()))
}

/// The four-term expression for dI/dt, with y = (x − vt)/λ and ρ′ = sech²:
/// (λ′/λ)∫yρ′p + (1/λ)∫ρ′(½Λx² + 2sinh²Λ φt²) + (1/λ)∫ρ′(½Λt² + 2sinh²Λ φx²) + (v/λ)∫ρ′p.
pub fn virial_rhs(state: &FieldState, grid: &Grid, v: f64, t: f64) -> Result<f64> {
    virial_rhs_scaled(state, grid, v, t, Scale::default())
}

pub fn virial_rhs_scaled(state: &FieldState, grid: &Grid, v: f64, t: f64, scale: Scale) -> Result<f64> {
    check(v, t)?;
    let d = densities(state, grid)?;
    let lx = spatial_derivative(&state.ltil, grid)?;
    let px = spatial_derivative(&state.phi, grid)?;
    let (lam, rate) = scale.eval(t);
    let mut terms = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for (i, x) in grid.nodes().enumerate() {
        let y = (x - v * t) / lam;
        let rho = sech(y).powi(2);
        let s2 = sinh_sq(state.lambda_total(i));
        let (lt, pt) = (state.ltil_t[i], state.phi_t[i]);
        terms[0].push(rate * y * rho * d.p[i]);
        terms[1].push(rho * (0.5 * lx[i] * lx[i] + 2.0 * s2 * pt * pt) / lam);
        terms[2].push(rho * (0.5 * lt * lt + 2.0 * s2 * px[i] * px[i]) / lam);
        terms[3].push(v * rho * d.p[i] / lam);
    }
    Ok(terms.iter().map(|a| trapezoid(a, grid.dx())).sum())
}

/// Windowed energy around the ray x = vt.
pub fn decay_window(state: &FieldState, grid: &Grid, v: f64, t: f64, weight: Window) -> Result<f64> {
    decay_window_scaled(state, grid, v, t, weight, Scale::default())
}

pub fn decay_window_scaled(
    state: &FieldState,
    grid: &Grid,
    v: f64,
    t: f64,
    weight: Window,
    scale: Scale,
) -> Result<f64> {
    check(v, t)?;
    let (lam, _) = scale.eval(t);
    match weight {
        Window::Sharp => {
            let lx = spatial_derivative(&state.ltil, grid)?;
            let px = spatial_derivative(&state.phi, grid)?;
            let vals: Vec<f64> = (0..state.len())
                .map(|i| {
                    let (lt, pt) = (state.ltil_t[i], state.phi_t[i]);
                    lt * lt + lx[i] * lx[i] + sinh_sq(state.lambda_total(i)) * (pt * pt + px[i] * px[i])
                })
                .collect();
            Ok(integrate_interval(&vals, grid, v * t - lam, v * t + lam))
        }
        Window::Sech4 => {
            let d = densities(state, grid)?;
            let vals: Vec<f64> = grid
                .nodes()
                .zip(&d.e)
                .map(|(x, e)| sech((x - v * t) / lam).powi(4) * e)
                .collect();
            Ok(trapezoid(&vals, grid.dx()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::total_energy;
    use crate::initdata::{traveling_wave, BumpSpec, Direction, Zero};
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::with_cfl(-30.0, 30.0, 601, 0.4).unwrap()
    }

    #[test]
    fn zero_fields_give_zero() {
        let g = grid();
        let s = FieldState::background(&g, 1.0, 0.0, 3.0).unwrap();
        assert_eq!(virial(&s, &g, 0.2, 3.0).unwrap(), 0.0);
        assert_eq!(virial_rhs(&s, &g, 0.2, 3.0).unwrap(), 0.0);
        assert_eq!(decay_window(&s, &g, 0.2, 3.0, Window::Sharp).unwrap(), 0.0);
        assert_eq!(decay_window(&s, &g, 0.2, 3.0, Window::Sech4).unwrap(), 0.0);
    }

    #[test]
    fn preconditions_are_enforced() {
        let g = grid();
        let s = FieldState::background(&g, 1.0, 0.0, 3.0).unwrap();
        assert!(virial(&s, &g, 1.0, 3.0).is_err());
        assert!(virial(&s, &g, -1.5, 3.0).is_err());
        assert!(virial_rhs(&s, &g, 0.0, 1.9).is_err());
        assert!(decay_window(&s, &g, 0.0, 0.5, Window::Sech4).is_err());
    }

    #[test]
    fn scale_rate_matches_difference() {
        for scale in [Scale::LogSquared, Scale::Quadratic] {
            let t = 5.0;
            let h = 1e-5;
            let (lam, rate) = scale.eval(t);
            let fd = (scale.eval(t + h).0 - scale.eval(t - h).0) / (2.0 * h);
            assert!((fd / lam - rate).abs() < 1e-8);
        }
    }

    #[test]
    fn resting_traveling_wave_feeds_the_window() {
        let g = grid();
        let h = BumpSpec::new(0.1, 0.0, 3.0);
        let s = traveling_wave(&h, &Zero, Direction::Right, 1.0, &g, 2.0).unwrap();
        assert!(virial_rhs(&s, &g, 0.0, 2.0).unwrap() > 0.0);
    }

    proptest! {
        #[test]
        fn virial_is_bounded_by_energy(
            amp in -0.3f64..0.3,
            c in -5.0f64..5.0,
            w in 1.0f64..6.0,
            v in -0.95f64..0.95,
            t in 2.0f64..30.0,
            right in any::<bool>(),
        ) {
            let g = grid();
            let dir = if right { Direction::Right } else { Direction::Left };
            let b = BumpSpec::new(amp, c, w);
            let k = BumpSpec::new(0.5 * amp, c + 1.0, w);
            let s = traveling_wave(&b, &k, dir, 0.8, &g, 0.0).unwrap();
            let i = virial(&s, &g, v, t).unwrap();
            prop_assert!(i.abs() <= total_energy(&s, &g).unwrap() + 1e-15);
        }
    }
}
