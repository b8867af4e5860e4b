//! Scalar special functions and quadrature shared by every module.

use crate::grid::Grid;

const SMALL_ARG: f64 = 1e-4;

/// sinh²(a), free of cancellation near a = 0.
#[inline]
pub fn sinh_sq(a: f64) -> f64 {
    if a.abs() < SMALL_ARG {
        // expm1(a) and expm1(-a) have opposite signs, so the difference is exact-ish
        let s = 0.5 * (a.exp_m1() - (-a).exp_m1());
        s * s
    } else {
        let s = a.sinh();
        s * s
    }
}

/// coth(a); the truncated Laurent series 1/a + a/3 is used for |a| ≤ 1e-4.
#[inline]
pub fn coth(a: f64) -> f64 {
    if a.abs() <= SMALL_ARG {
        1.0 / a + a / 3.0
    } else {
        1.0 / a.tanh()
    }
}

#[inline]
pub fn sech(a: f64) -> f64 {
    if a.abs() > 700.0 {
        0.0
    } else {
        1.0 / a.cosh()
    }
}

/// cosh(b)/cosh(a) without overflow for large arguments.
#[inline]
pub fn cosh_ratio(b: f64, a: f64) -> f64 {
    let (ab, aa) = (b.abs(), a.abs());
    (ab - aa).exp() * (1.0 + (-2.0 * ab).exp()) / (1.0 + (-2.0 * aa).exp())
}

/// Composite trapezoid rule over all grid nodes.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            dx * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Exact integral over `[a, b]` of the piecewise-linear interpolant of
/// `values`, clipped to the grid extent.
pub fn integrate_interval(values: &[f64], grid: &Grid, a: f64, b: f64) -> f64 {
    let (lo, hi) = (a.max(grid.x_min()), b.min(grid.x_max()));
    if hi <= lo {
        return 0.0;
    }
    let dx = grid.dx();
    let n = values.len();
    let cell = |x: f64| (((x - grid.x_min()) / dx).floor() as usize).min(n - 2);
    let interp = |x: f64| {
        let i = cell(x);
        let s = (x - grid.x(i)) / dx;
        values[i] * (1.0 - s) + values[i + 1] * s
    };
    let (i0, i1) = (cell(lo), cell(hi));
    if i0 == i1 {
        return 0.5 * (interp(lo) + interp(hi)) * (hi - lo);
    }
    let mut sum = 0.5 * (interp(lo) + values[i0 + 1]) * (grid.x(i0 + 1) - lo);
    for i in i0 + 1..i1 {
        sum += 0.5 * (values[i] + values[i + 1]) * dx;
    }
    sum + 0.5 * (values[i1] + interp(hi)) * (hi - grid.x(i1))
}

/// Linear interpolation of nodal values at an arbitrary `x`; `None` outside the grid.
pub fn interpolate(values: &[f64], grid: &Grid, x: f64) -> Option<f64> {
    let dx = grid.dx();
    let r = (x - grid.x_min()) / dx;
    let tol = 1e-9;
    if r < -tol || r > (values.len() - 1) as f64 + tol {
        return None;
    }
    let r = r.clamp(0.0, (values.len() - 1) as f64);
    let i = (r.floor() as usize).min(values.len() - 2);
    let s = r - i as f64;
    Some(values[i] * (1.0 - s) + values[i + 1] * s)
}

/// Observed convergence order from errors at successive refinements by `ratio`.
pub fn observed_orders(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).ln() / ratio.ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_sq_small_and_large() {
        for &a in &[1e-9f64, -3e-6, 5e-5, 1e-3, 0.5, -2.0] {
            let exact = a.sinh().powi(2);
            assert!((sinh_sq(a) - exact).abs() <= 1e-15 * exact.max(1e-300) + 1e-300);
        }
        assert_eq!(sinh_sq(0.0), 0.0);
    }

    #[test]
    fn coth_series_matches_direct_near_switch() {
        let a = 1e-4f64;
        let direct = 1.0 / a.tanh();
        assert!((coth(a) - direct).abs() / direct < 1e-14);
        assert!((coth(2.0) - 1.0 / 2f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn cosh_ratio_is_stable() {
        assert!((cosh_ratio(1.0, 0.5) - 1f64.cosh() / 0.5f64.cosh()).abs() < 1e-15);
        let r = cosh_ratio(801.0, 800.0);
        assert!((r - 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn interval_integral_of_linear_is_exact() {
        let g = Grid::with_cfl(-2.0, 2.0, 41, 0.5).unwrap();
        let v: Vec<f64> = g.nodes().map(|x| 3.0 * x + 1.0).collect();
        let exact = |a: f64, b: f64| 1.5 * (b * b - a * a) + (b - a);
        for &(a, b) in &[(-0.33, 0.71), (-1.0, 1.0), (0.01, 0.02), (-5.0, 5.0)] {
            let (lo, hi) = (f64::max(a, -2.0), f64::min(b, 2.0));
            assert!((integrate_interval(&v, &g, a, b) - exact(lo, hi)).abs() < 1e-12);
        }
        assert!((trapezoid(&v, g.dx()) - exact(-2.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn orders_from_error_sequence() {
        let o = observed_orders(&[1.0, 0.25, 0.0625], 2.0);
        assert!(o.iter().all(|p| (p - 2.0).abs() < 1e-12));
    }
}
