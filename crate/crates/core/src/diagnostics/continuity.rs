use crate::density::densities;
use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::state::FieldState;
use crate::stencil::spatial_derivative;

/// (max |∂t p − ∂x e|, max |∂t e − ∂x p|) over interior nodes of the middle
/// slice, with centered time differences across the three slices.
pub fn continuity_residuals(history: [&FieldState; 3], grid: &Grid) -> Result<(f64, f64)> {
    let [a, b, c] = history;
    for s in history {
        grid.check_len(s.len(), "slice")?;
        if s.lambda_bg != a.lambda_bg {
            return Err(invalid("slices have different backgrounds"));
        }
    }
    let (h1, h2) = (b.t - a.t, c.t - b.t);
    if !(h1 > 0.0) || (h1 - h2).abs() > 1e-9 * h1.max(h2) {
        return Err(invalid(format!(
            "slices must be uniformly spaced in time (steps {h1}, {h2})"
        )));
    }
    let (da, db, dc) = (densities(a, grid)?, densities(b, grid)?, densities(c, grid)?);
    let ex = spatial_derivative(&db.e, grid)?;
    let px = spatial_derivative(&db.p, grid)?;
    let inv = 0.5 / h1;
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for i in 1..grid.nx() - 1 {
        r1 = r1.max(((dc.p[i] - da.p[i]) * inv - ex[i]).abs());
        r2 = r2.max(((dc.e[i] - da.e[i]) * inv - px[i]).abs());
    }
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_state_has_zero_residual() {
        let g = Grid::with_cfl(-5.0, 5.0, 51, 0.4).unwrap();
        let s0 = FieldState::background(&g, 1.0, 0.3, 0.0).unwrap();
        let s1 = FieldState { t: 0.1, ..s0.clone() };
        let s2 = FieldState { t: 0.2, ..s0.clone() };
        assert_eq!(continuity_residuals([&s0, &s1, &s2], &g).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn uneven_or_mismatched_slices_are_rejected() {
        let g = Grid::with_cfl(-5.0, 5.0, 51, 0.4).unwrap();
        let s0 = FieldState::background(&g, 1.0, 0.0, 0.0).unwrap();
        let s1 = FieldState { t: 0.1, ..s0.clone() };
        let s2 = FieldState { t: 0.3, ..s0.clone() };
        assert!(continuity_residuals([&s0, &s1, &s2], &g).is_err());
        let s3 = FieldState { t: 0.2, lambda_bg: 2.0, ..s0.clone() };
        assert!(continuity_residuals([&s0, &s1, &s3], &g).is_err());
    }
}
