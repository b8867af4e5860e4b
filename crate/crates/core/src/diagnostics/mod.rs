//! Scalar functionals of states and runs.

pub mod continuity;
pub mod energy;
pub mod norms;
pub mod virial;

pub use continuity::continuity_residuals;
pub use energy::{modified_energy, modified_energy_density, total_energy};
pub use norms::{
    pointwise_bound_monitor, slice_energies, weight, weighted_norms, weighted_sobolev_ratio, NormAccumulator,
    PointwiseBounds, WeightedNorms, DEFAULT_DELTA,
};
pub use virial::{
    decay_window, decay_window_scaled, virial, virial_rhs, virial_rhs_scaled, virial_scaled, Scale, Window,
};

use crate::density::densities;
use crate::error::Result;
use crate::grid::Grid;
use crate::numerics::trapezoid;
use crate::state::FieldState;

/// Every scalar diagnostic of one slice. Quantities that are undefined at
/// this slice (window functionals before t = 2, residuals that need
/// neighbouring slices, the modified energy of non-closed-form data) are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    pub energy_mod: Option<f64>,
    pub virial: Option<f64>,
    pub virial_rhs: Option<f64>,
    pub window_energy: Option<f64>,
    pub sup_ltil: f64,
    pub min_lambda: f64,
    /// max |∂t p − ∂x e|
    pub continuity_residual: Option<f64>,
    /// max |∂t e − ∂x p|
    pub continuity_residual_e: Option<f64>,
    /// min (e − |p|)
    pub ineq_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordOptions {
    pub v: f64,
    pub window: Window,
    pub scale: Scale,
}

impl Default for RecordOptions {
    fn default() -> Self {
        Self {
            v: 0.0,
            window: Window::Sech4,
            scale: Scale::LogSquared,
        }
    }
}

/// Slice diagnostics; the continuity and modified-energy fields are left empty.
pub fn record(state: &FieldState, grid: &Grid, opts: &RecordOptions) -> Result<DiagnosticsRecord> {
    let d = densities(state, grid)?;
    let t = state.t;
    let windowed = t >= 2.0 && opts.v.abs() < 1.0;
    let (virial, virial_rhs, window_energy) = if windowed {
        (
            Some(virial_scaled(state, grid, opts.v, t, opts.scale)?),
            Some(virial_rhs_scaled(state, grid, opts.v, t, opts.scale)?),
            Some(decay_window_scaled(state, grid, opts.v, t, opts.window, opts.scale)?),
        )
    } else {
        (None, None, None)
    };
    Ok(DiagnosticsRecord {
        t,
        energy: trapezoid(&d.e, grid.dx()),
        energy_mod: None,
        virial,
        virial_rhs,
        window_energy,
        sup_ltil: state.sup_ltil(),
        min_lambda: state.min_lambda().1,
        continuity_residual: None,
        continuity_residual_e: None,
        ineq_margin: d.inequality_margin(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn early_slices_have_no_window_terms() {
        let g = Grid::with_cfl(-5.0, 5.0, 51, 0.4).unwrap();
        let s = FieldState::background(&g, 1.0, 0.0, 1.0).unwrap();
        let r = record(&s, &g, &RecordOptions::default()).unwrap();
        assert_eq!(r.virial, None);
        assert_eq!(r.min_lambda, 1.0);
        let s = FieldState { t: 2.5, ..s };
        let r = record(&s, &g, &RecordOptions::default()).unwrap();
        assert_eq!(r.virial, Some(0.0));
        assert_eq!(r.window_energy, Some(0.0));
    }
}
