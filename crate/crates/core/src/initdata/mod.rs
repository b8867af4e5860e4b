//! Initial data and exact solutions.

pub mod profile;
pub mod soliton;

use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::oracle::fd6_gradient;
use crate::state::FieldState;

pub use profile::{bump_data, traveling_wave, BumpSpec, Direction, Launch, Profile, Shape, Zero};
pub use soliton::{
    finite_energy_argument, finite_energy_soliton, singular_background, singular_soliton_fields,
    singular_soliton_metric, FiniteEnergySoliton, SeedBackground, SingularSoliton, SolitonParams,
};

/// Step used for finite-difference derivatives of closed forms.
pub const FD_STEP: f64 = 1e-4;

/// A field pair (Λ, φ) known in closed form on all of (t, x).
pub trait ClosedForm: Sync {
    /// Total fields (Λ, φ) at (t, x).
    fn eval(&self, t: f64, x: f64) -> Result<(f64, f64)>;

    /// (∂tΛ, ∂xΛ, ∂tφ, ∂xφ); sixth-order central differences unless overridden.
    fn gradient(&self, t: f64, x: f64) -> Result<[f64; 4]> {
        fd6_gradient(self, t, x, FD_STEP)
    }
}

/// Λ = λ + h(x ∓ t), φ = k(x ∓ t) as a closed form with exact derivatives.
pub struct TravelingWaveField<H, K> {
    pub h: H,
    pub k: K,
    pub direction: Direction,
    pub lambda_bg: f64,
}

impl<H: Profile, K: Profile> ClosedForm for TravelingWaveField<H, K> {
    fn eval(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let s = x - self.direction.sign() * t;
        Ok((self.lambda_bg + self.h.value(s), self.k.value(s)))
    }

    fn gradient(&self, t: f64, x: f64) -> Result<[f64; 4]> {
        let sg = self.direction.sign();
        let s = x - sg * t;
        let (h1, k1) = (self.h.d1(s), self.k.d1(s));
        Ok([-sg * h1, h1, -sg * k1, k1])
    }
}

/// Samples a closed form at time `t` as a state around `lambda_bg`.
pub fn sample_state(field: &dyn ClosedForm, grid: &Grid, t: f64, lambda_bg: f64) -> Result<FieldState> {
    if !(lambda_bg > 0.0) {
        return Err(invalid(format!("lambda_bg = {lambda_bg} must be positive")));
    }
    let n = grid.nx();
    let (mut ltil, mut ltil_t, mut phi, mut phi_t) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for x in grid.nodes() {
        let (l, p) = field.eval(t, x)?;
        let [lt, _, pt, _] = field.gradient(t, x)?;
        ltil.push(l - lambda_bg);
        ltil_t.push(lt);
        phi.push(p);
        phi_t.push(pt);
    }
    FieldState::new(t, lambda_bg, ltil, ltil_t, phi, phi_t)
}
