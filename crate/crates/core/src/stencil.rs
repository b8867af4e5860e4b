//! Second-order finite-difference stencils on a uniform grid.

use crate::error::Result;
use crate::grid::Grid;

/// First derivative: centered in the interior, one-sided three-point at the ends.
pub fn spatial_derivative(f: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(f.len(), "field")?;
    let mut out = vec![0.0; f.len()];
    derivative_into(f, grid.dx(), &mut out);
    Ok(out)
}

pub(crate) fn derivative_into(f: &[f64], dx: f64, out: &mut [f64]) {
    let n = f.len();
    let inv2h = 0.5 / dx;
    out[0] = edge_derivative(f, dx, true);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * inv2h;
    }
    out[n - 1] = edge_derivative(f, dx, false);
}

/// One-sided first derivative at the left (`0`) or right (`n-1`) end.
#[inline]
pub(crate) fn edge_derivative(f: &[f64], dx: f64, left: bool) -> f64 {
    let n = f.len();
    // written in differences so that constants give exactly zero
    if left {
        (4.0 * (f[1] - f[0]) - (f[2] - f[0])) * 0.5 / dx
    } else {
        (4.0 * (f[n - 1] - f[n - 2]) - (f[n - 1] - f[n - 3])) * 0.5 / dx
    }
}

/// Three-point second derivative; the two end values are left at zero.
pub fn second_derivative(f: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(f.len(), "field")?;
    let mut out = vec![0.0; f.len()];
    laplacian_into(f, grid.dx(), &mut out);
    Ok(out)
}

pub(crate) fn laplacian_into(f: &[f64], dx: f64, out: &mut [f64]) {
    let n = f.len();
    let inv = 1.0 / (dx * dx);
    out[0] = 0.0;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
    }
    out[n - 1] = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::with_cfl(-3.0, 4.0, n, 0.4).unwrap()
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = grid(33);
        let d = spatial_derivative(&vec![2.5; 33], &g).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exact_on_quadratics() {
        let g = grid(40);
        let lin: Vec<f64> = g.nodes().collect();
        let d = spatial_derivative(&lin, &g).unwrap();
        assert!(d.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let quad: Vec<f64> = g.nodes().map(|x| x * x - x).collect();
        let d = spatial_derivative(&quad, &g).unwrap();
        for (i, x) in g.nodes().enumerate() {
            assert!((d[i] - (2.0 * x - 1.0)).abs() < 1e-11, "node {i}");
        }
        let d2 = second_derivative(&quad, &g).unwrap();
        assert!(d2[1..39].iter().all(|&v| (v - 2.0).abs() < 1e-9));
    }

    #[test]
    fn second_order_on_sine() {
        let err = |n: usize| {
            let g = grid(n);
            let f: Vec<f64> = g.nodes().map(f64::sin).collect();
            let d = spatial_derivative(&f, &g).unwrap();
            g.nodes()
                .zip(d)
                .map(|(x, v)| (v - x.cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(101), err(201));
        let ratio = e1 / e2;
        assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = grid(20);
        assert!(spatial_derivative(&[1.0; 19], &g).is_err());
    }
}
