//! Null-frame derivatives L = ∂t + ∂x, L̄ = ∂t − ∂x and the null form Q0.

use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::state::{FieldSelector, FieldState};
use crate::stencil::spatial_derivative;

/// Null derivatives of one field at one time level, plus the null
/// coordinates u = (t+x)/2, ū = (t−x)/2 at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct NullFrame {
    pub t: f64,
    pub l: Vec<f64>,
    pub lb: Vec<f64>,
    pub u: Vec<f64>,
    pub ub: Vec<f64>,
}

impl NullFrame {
    /// Frame of a field given its samples and its time derivative.
    pub fn from_arrays(f: &[f64], f_t: &[f64], grid: &Grid, t: f64) -> Result<Self> {
        grid.check_len(f_t.len(), "time derivative")?;
        let fx = spatial_derivative(f, grid)?;
        let l = f_t.iter().zip(&fx).map(|(a, b)| a + b).collect();
        let lb = f_t.iter().zip(&fx).map(|(a, b)| a - b).collect();
        let u = grid.nodes().map(|x| 0.5 * (t + x)).collect();
        let ub = grid.nodes().map(|x| 0.5 * (t - x)).collect();
        Ok(Self { t, l, lb, u, ub })
    }

    /// Recovers ∂t f = (Lf + L̄f)/2.
    pub fn time_derivative(&self) -> Vec<f64> {
        self.l.iter().zip(&self.lb).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Recovers ∂x f = (Lf − L̄f)/2.
    pub fn space_derivative(&self) -> Vec<f64> {
        self.l.iter().zip(&self.lb).map(|(a, b)| 0.5 * (a - b)).collect()
    }
}

pub fn null_frame(state: &FieldState, which: FieldSelector, grid: &Grid) -> Result<NullFrame> {
    grid.check_len(state.len(), "state")?;
    let (f, f_t) = state.field(which);
    NullFrame::from_arrays(f, f_t, grid, state.t)
}

/// Q0(a, b) = ∂x a ∂x b − ∂t a ∂t b, assembled from the null frames as
/// −(La·L̄b + L̄a·Lb)/2.
pub fn null_form_q0(a: &NullFrame, b: &NullFrame) -> Result<Vec<f64>> {
    if a.l.len() != b.l.len() {
        return Err(invalid(format!(
            "null frames live on different grids ({} vs {} nodes)",
            a.l.len(),
            b.l.len()
        )));
    }
    if (a.t - b.t).abs() > 1e-12 * (1.0 + a.t.abs()) {
        return Err(invalid(format!(
            "null frames at different times ({} vs {})",
            a.t, b.t
        )));
    }
    if a.u.first() != b.u.first() || a.u.last() != b.u.last() {
        return Err(invalid("null frames live on different grids"));
    }
    Ok((0..a.l.len())
        .map(|i| -0.5 * (a.l[i] * b.lb[i] + a.lb[i] * b.l[i]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::with_cfl(-10.0, 10.0, 401, 0.4).unwrap()
    }

    fn h(x: f64) -> f64 {
        (-(x * x)).exp()
    }
    fn hp(x: f64) -> f64 {
        -2.0 * x * (-(x * x)).exp()
    }

    #[test]
    fn zero_field_has_zero_frame() {
        let g = grid();
        let s = FieldState::background(&g, 1.0, 0.0, 0.0).unwrap();
        let f = null_frame(&s, FieldSelector::Ltil, &g).unwrap();
        assert!(f.l.iter().chain(&f.lb).all(|&v| v == 0.0));
    }

    #[test]
    fn right_mover_is_annihilated_by_l() {
        let g = grid();
        let t = 0.3;
        let f: Vec<f64> = g.nodes().map(|x| h(x - t)).collect();
        let ft: Vec<f64> = g.nodes().map(|x| -hp(x - t)).collect();
        let fr = NullFrame::from_arrays(&f, &ft, &g, t).unwrap();
        let dx2 = g.dx() * g.dx();
        for (i, x) in g.nodes().enumerate() {
            assert!(fr.l[i].abs() < 2.0 * dx2, "L at {x}");
            assert!((fr.lb[i] + 2.0 * hp(x - t)).abs() < 4.0 * dx2, "Lb at {x}");
        }
        let ft_back = fr.time_derivative();
        for i in 0..g.nx() {
            assert!((ft_back[i] - ft[i]).abs() <= 1e-15 * (1.0 + ft[i].abs()));
        }
    }

    #[test]
    fn q0_vanishes_in_null_direction_and_is_bilinear() {
        let g = grid();
        let a: Vec<f64> = g.nodes().map(|x| h(x - 1.0)).collect();
        let at: Vec<f64> = g.nodes().map(|x| -hp(x - 1.0)).collect();
        let fa = NullFrame::from_arrays(&a, &at, &g, 0.0).unwrap();
        let q = null_form_q0(&fa, &fa).unwrap();
        assert!(q.iter().all(|v| v.abs() < 10.0 * g.dx() * g.dx()));

        let b: Vec<f64> = g.nodes().map(|x| x.sin() * h(0.3 * x)).collect();
        let bt: Vec<f64> = g.nodes().map(|x| x.cos()).collect();
        let c: Vec<f64> = g.nodes().map(|x| 0.2 * x).collect();
        let ct: Vec<f64> = g.nodes().map(h).collect();
        let fb = NullFrame::from_arrays(&b, &bt, &g, 0.0).unwrap();
        let fc = NullFrame::from_arrays(&c, &ct, &g, 0.0).unwrap();
        let bc: Vec<f64> = b.iter().zip(&c).map(|(x, y)| x + y).collect();
        let bct: Vec<f64> = bt.iter().zip(&ct).map(|(x, y)| x + y).collect();
        let fbc = NullFrame::from_arrays(&bc, &bct, &g, 0.0).unwrap();
        let lhs = null_form_q0(&fa, &fbc).unwrap();
        let r1 = null_form_q0(&fa, &fb).unwrap();
        let r2 = null_form_q0(&fa, &fc).unwrap();
        for i in 0..g.nx() {
            assert!((lhs[i] - r1[i] - r2[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn static_fields_give_product_of_gradients() {
        let g = grid();
        let a: Vec<f64> = g.nodes().map(|x| x * x).collect();
        let b: Vec<f64> = g.nodes().map(|x| 3.0 * x).collect();
        let z = vec![0.0; g.nx()];
        let fa = NullFrame::from_arrays(&a, &z, &g, 0.0).unwrap();
        let fb = NullFrame::from_arrays(&b, &z, &g, 0.0).unwrap();
        let q = null_form_q0(&fa, &fb).unwrap();
        for (i, x) in g.nodes().enumerate() {
            assert!((q[i] - 6.0 * x).abs() < 1e-9);
        }
    }

    #[test]
    fn mismatched_frames_are_rejected() {
        let g = grid();
        let g2 = Grid::with_cfl(-10.0, 10.0, 201, 0.4).unwrap();
        let z = vec![0.0; g.nx()];
        let z2 = vec![0.0; g2.nx()];
        let fa = NullFrame::from_arrays(&z, &z, &g, 0.0).unwrap();
        let fb = NullFrame::from_arrays(&z2, &z2, &g2, 0.0).unwrap();
        assert!(null_form_q0(&fa, &fb).is_err());
        let fc = NullFrame::from_arrays(&z, &z, &g, 1.0).unwrap();
        assert!(null_form_q0(&fa, &fc).is_err());
    }
}
