use crate::density::densities;
use crate::error::{invalid, PcfError, Result};
use crate::grid::Grid;
use crate::initdata::ClosedForm;
use crate::numerics::{sinh_sq, trapezoid};
use crate::state::FieldState;

/// E = ∫ e dx by the trapezoid rule.
pub fn total_energy(state: &FieldState, grid: &Grid) -> Result<f64> {
    Ok(trapezoid(&densities(state, grid)?.e, grid.dx()))
}

/// ½((∂tΛ)² − 1 + (∂xΛ)²) + 2 sinh²Λ((∂tφ)² + (∂xφ)²) at (t, x).
pub fn modified_energy_density(field: &dyn ClosedForm, t: f64, x: f64) -> Result<f64> {
    let (l, _) = field.eval(t, x)?;
    let [lt, lx, pt, px] = field.gradient(t, x)?;
    Ok(0.5 * ((lt * lt - 1.0) + lx * lx) + 2.0 * sinh_sq(l) * (pt * pt + px * px))
}

/// Trapezoid quadrature of the modified energy density over `[a, b]` at time `t`.
pub fn modified_energy(field: &dyn ClosedForm, t: f64, domain: (f64, f64), nodes: usize) -> Result<f64> {
    let (a, b) = domain;
    if !(a < b) || nodes < 2 {
        return Err(invalid(format!(
            "quadrature needs a < b and at least 2 nodes, got [{a}, {b}] with {nodes}"
        )));
    }
    let h = (b - a) / (nodes - 1) as f64;
    let vals = (0..nodes)
        .map(|i| modified_energy_density(field, t, a + i as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    let e = trapezoid(&vals, h);
    if !e.is_finite() {
        return Err(PcfError::NumericalOverflow {
            node: vals.iter().position(|v| !v.is_finite()).unwrap_or(0),
            what: "modified energy",
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initdata::{bump_data, BumpSpec, SeedBackground};

    #[test]
    fn zero_perturbation_has_zero_energy() {
        let g = Grid::with_cfl(-5.0, 5.0, 64, 0.4).unwrap();
        let s = FieldState::background(&g, 1.0, 0.2, 0.0).unwrap();
        assert_eq!(total_energy(&s, &g).unwrap(), 0.0);
    }

    #[test]
    fn energy_scales_quadratically() {
        let g = Grid::with_cfl(-20.0, 20.0, 801, 0.4).unwrap();
        let e = |eps: f64| {
            let s = bump_data(&BumpSpec::new(eps, 0.0, 5.0), &BumpSpec::new(eps, 1.0, 5.0), 1.0, &g).unwrap();
            total_energy(&s, &g).unwrap()
        };
        for eps in [1e-3, 1e-4] {
            let r = e(2.0 * eps) / e(eps);
            assert!((r - 4.0).abs() < 0.04, "ratio {r} at eps {eps}");
        }
    }

    #[test]
    fn seed_has_zero_modified_density() {
        for &(t, x) in &[(0.0, 0.0), (3.0, -2.0)] {
            assert_eq!(modified_energy_density(&SeedBackground, t, x).unwrap(), 0.0);
        }
        assert_eq!(modified_energy(&SeedBackground, 1.0, (-10.0, 10.0), 101).unwrap(), 0.0);
        assert!(modified_energy(&SeedBackground, 1.0, (1.0, -1.0), 101).is_err());
    }
}
