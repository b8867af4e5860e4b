//! Independent reference computations: high-order differences of closed
//! forms, the continuum PDE residual, and free-wave solutions.

use crate::error::Result;
use crate::grid::Grid;
use crate::initdata::{ClosedForm, Profile};
use crate::numerics::coth;

/// Sixth-order central difference of a scalar function.
pub fn fd6<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let c = [(1.0, 45.0), (2.0, -9.0), (3.0, 1.0)];
    let mut s = 0.0;
    for (k, w) in c {
        s += w * (f(x + k * h)? - f(x - k * h)?);
    }
    Ok(s / (60.0 * h))
}

/// (∂tΛ, ∂xΛ, ∂tφ, ∂xφ) of a closed form by sixth-order differences.
pub fn fd6_gradient<F: ClosedForm + ?Sized>(field: &F, t: f64, x: f64, h: f64) -> Result<[f64; 4]> {
    let lt = fd6(|s| Ok(field.eval(s, x)?.0), t, h)?;
    let lx = fd6(|s| Ok(field.eval(t, s)?.0), x, h)?;
    let pt = fd6(|s| Ok(field.eval(s, x)?.1), t, h)?;
    let px = fd6(|s| Ok(field.eval(t, s)?.1), x, h)?;
    Ok([lt, lx, pt, px])
}

/// Residuals □Λ − F1 and □φ − F2 of a closed form at time `t`, on the
/// interior nodes of `grid`, with second-order centered differences of
/// spacing dx in both t and x.
pub fn pde_residual(field: &dyn ClosedForm, grid: &Grid, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = grid.dx();
    let n = grid.nx();
    let mut r1 = Vec::with_capacity(n - 2);
    let mut r2 = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let x = grid.x(i);
        let c = field.eval(t, x)?;
        let tp = field.eval(t + h, x)?;
        let tm = field.eval(t - h, x)?;
        let xp = field.eval(t, grid.x(i + 1))?;
        let xm = field.eval(t, grid.x(i - 1))?;
        let h2 = h * h;
        let box_l = (tp.0 - 2.0 * c.0 + tm.0) / h2 - (xp.0 - 2.0 * c.0 + xm.0) / h2;
        let box_p = (tp.1 - 2.0 * c.1 + tm.1) / h2 - (xp.1 - 2.0 * c.1 + xm.1) / h2;
        let (lt, lx) = ((tp.0 - tm.0) / (2.0 * h), (xp.0 - xm.0) / (2.0 * h));
        let (pt, px) = ((tp.1 - tm.1) / (2.0 * h), (xp.1 - xm.1) / (2.0 * h));
        let f1 = -2.0 * (2.0 * c.0).sinh() * (px * px - pt * pt);
        let f2 = -2.0 * coth(c.0) * (pt * lt - px * lx);
        r1.push(box_l - f1);
        r2.push(box_p - f2);
    }
    Ok((r1, r2))
}

/// Max-norm over both residual arrays.
pub fn residual_max(field: &dyn ClosedForm, grid: &Grid, t: f64) -> Result<f64> {
    let (r1, r2) = pde_residual(field, grid, t)?;
    Ok(r1.iter().chain(&r2).fold(0.0, |m, v| m.max(v.abs())))
}

/// d'Alembert solution of the free wave equation with u(0) = f, ∂tu(0) = 0,
/// returning (u, ∂tu) at (t, x).
pub fn free_wave_at_rest(f: &dyn Profile, t: f64, x: f64) -> (f64, f64) {
    (
        0.5 * (f.value(x + t) + f.value(x - t)),
        0.5 * (f.d1(x + t) - f.d1(x - t)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initdata::{BumpSpec, Direction, SingularSoliton, TravelingWaveField};

    #[test]
    fn fd6_is_sixth_order() {
        let err = |h: f64| (fd6(|x| Ok(x.sin()), 0.7, h).unwrap() - 0.7f64.cos()).abs();
        let (e1, e2) = (err(0.1), err(0.05));
        let order = (e1 / e2).log2();
        assert!((5.7..6.3).contains(&order), "order {order}");
    }

    #[test]
    fn traveling_waves_have_vanishing_residual() {
        let w = TravelingWaveField {
            h: BumpSpec::new(0.2, 0.0, 3.0),
            k: BumpSpec::new(0.4, 1.0, 3.0),
            direction: Direction::Right,
            lambda_bg: 1.0,
        };
        // with equal t and x spacing the discrete wave operator is exact on x − t profiles
        for nx in [121, 241] {
            let g = Grid::with_cfl(-6.0, 6.0, nx, 0.4).unwrap();
            assert!(residual_max(&w, &g, 0.5).unwrap() < 1e-9);
        }
    }

    #[test]
    fn soliton_residual_is_small() {
        let s = SingularSoliton::new(2.0).unwrap();
        let g = Grid::with_cfl(-5.0, 5.0, 501, 0.4).unwrap();
        assert!(residual_max(&s, &g, 1.0).unwrap() < 1e-2);
    }

    #[test]
    fn free_wave_splits_in_two() {
        let b = BumpSpec::new(1.0, 0.0, 1.0);
        let (u, _) = free_wave_at_rest(&b, 5.0, 5.0);
        assert!((u - 0.5).abs() < 1e-15);
        assert_eq!(free_wave_at_rest(&b, 5.0, 0.0).0, 0.0);
    }
}
