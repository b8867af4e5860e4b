use crate::error::{PcfError, Result};
use crate::grid::Grid;
use crate::numerics::sinh_sq;
use crate::state::FieldState;
use crate::stencil::spatial_derivative;

/// Energy density `e` and momentum density `p` at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPair {
    pub e: Vec<f64>,
    pub p: Vec<f64>,
}

impl DensityPair {
    /// min over nodes of e − |p|.
    pub fn inequality_margin(&self) -> f64 {
        self.e
            .iter()
            .zip(&self.p)
            .map(|(e, p)| e - p.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Pointwise densities from first derivatives and the total field Λ.
#[inline]
pub fn density_at(lambda: f64, lx: f64, lt: f64, px: f64, pt: f64) -> (f64, f64) {
    let s2 = sinh_sq(lambda);
    let e = 0.5 * (lx * lx + lt * lt) + 2.0 * s2 * (px * px + pt * pt);
    let p = lx * lt + 4.0 * s2 * px * pt;
    (e, p)
}

/// e = ½((∂xΛ)² + (∂tΛ)²) + 2 sinh²Λ ((∂xφ)² + (∂tφ)²),
/// p = ∂xΛ ∂tΛ + 4 sinh²Λ ∂xφ ∂tφ.
pub fn densities(state: &FieldState, grid: &Grid) -> Result<DensityPair> {
    grid.check_len(state.len(), "state")?;
    let lx = spatial_derivative(&state.ltil, grid)?;
    let px = spatial_derivative(&state.phi, grid)?;
    let n = state.len();
    let mut e = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    for i in 0..n {
        let (ei, pi) = density_at(state.lambda_total(i), lx[i], state.ltil_t[i], px[i], state.phi_t[i]);
        if !(ei.is_finite() && pi.is_finite()) {
            return Err(PcfError::NumericalOverflow { node: i, what: "densities" });
        }
        e.push(ei);
        p.push(pi);
    }
    Ok(DensityPair { e, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::with_cfl(-10.0, 10.0, 201, 0.4).unwrap()
    }

    #[test]
    fn background_has_zero_density() {
        let g = grid();
        let s = FieldState::background(&g, 1.3, 0.0, 0.0).unwrap();
        let d = densities(&s, &g).unwrap();
        assert!(d.e.iter().chain(&d.p).all(|&v| v == 0.0));
    }

    #[test]
    fn right_mover_has_p_equal_minus_e() {
        let g = grid();
        let h = |x: f64| 0.1 * (-(x * x)).exp();
        let hp = |x: f64| -0.2 * x * (-(x * x)).exp();
        let n = g.nx();
        let s = FieldState::new(
            0.0,
            1.0,
            g.nodes().map(h).collect(),
            g.nodes().map(|x| -hp(x)).collect(),
            vec![0.0; n],
            vec![0.0; n],
        )
        .unwrap();
        let d = densities(&s, &g).unwrap();
        for (i, x) in g.nodes().enumerate() {
            assert!((d.e[i] - hp(x).powi(2)).abs() < 0.05 * g.dx() * g.dx());
            assert!((d.p[i] + d.e[i]).abs() < 1e-3 * g.dx() * g.dx() + 1e-16);
        }
    }

    #[test]
    fn overflow_is_reported_with_node() {
        let g = grid();
        let n = g.nx();
        let mut ltil = vec![0.0; n];
        ltil[17] = 800.0;
        let s = FieldState::new(0.0, 1.0, ltil, vec![0.0; n], vec![0.0; n], vec![1.0; n]).unwrap();
        assert!(matches!(
            densities(&s, &g),
            Err(PcfError::NumericalOverflow { node: 17, .. })
        ));
    }

    proptest! {
        #[test]
        fn momentum_is_bounded_by_energy(
            lambda_bg in 0.05f64..3.0,
            coeffs in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let g = Grid::with_cfl(-5.0, 5.0, 64, 0.4).unwrap();
            let field = |k: usize, x: f64| {
                coeffs[k] * (x * (k as f64 + 1.0) * 0.7).sin() + coeffs[k + 4] * (-(x - k as f64).powi(2)).exp()
            };
            let s = FieldState::new(
                0.0,
                lambda_bg,
                g.nodes().map(|x| 0.3 * lambda_bg * field(0, x).tanh()).collect(),
                g.nodes().map(|x| field(1, x)).collect(),
                g.nodes().map(|x| field(2, x)).collect(),
                g.nodes().map(|x| field(3, x)).collect(),
            ).unwrap();
            let d = densities(&s, &g).unwrap();
            for i in 0..g.nx() {
                prop_assert!(d.e[i] >= 0.0);
                prop_assert!(d.p[i].abs() <= d.e[i] * (1.0 + 1e-14) + 1e-300);
            }
        }
    }
}
