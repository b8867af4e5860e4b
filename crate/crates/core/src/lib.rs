//! Evolution, exact solutions and identity diagnostics for the 1+1
//! dimensional principal chiral field in the (Λ, φ) parametrization
//!
//! Λ = λ + Λ̃ with constant λ > 0 solves
//!
//! ```text
//! □Λ̃ = −2 sinh(2Λ)((∂xφ)² − (∂tφ)²)
//! □φ  = −2 coth(Λ)(∂tφ ∂tΛ̃ − ∂xφ ∂xΛ̃)
//! ```
//!
//! with □ = ∂t² − ∂x².

// `!(a < b)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod initdata;
pub mod metric;
pub mod null;
pub mod numerics;
pub mod oracle;
pub mod solver;
pub mod state;
pub mod stencil;

pub use density::{densities, density_at, DensityPair};
pub use diagnostics::{
    continuity_residuals, decay_window, modified_energy, pointwise_bound_monitor, total_energy, virial, virial_rhs,
    weighted_norms, weighted_sobolev_ratio, DiagnosticsRecord, WeightedNorms,
};
pub use error::{PcfError, Result};
pub use grid::Grid;
pub use initdata::{
    bump_data, finite_energy_soliton, sample_state, singular_soliton_fields, singular_soliton_metric,
    traveling_wave, BumpSpec, ClosedForm, Direction, Profile, SolitonParams,
};
pub use metric::{
    assemble_g, chiral_residual, dalembert_solve, metric_of_state, source_g, MetricField, SourceHistory,
};
pub use null::{null_form_q0, null_frame, NullFrame};
pub use solver::{
    evolve, rhs, step, Boundary, RhsValue, RunSummary, SingularityInfo, SolverConfig, Termination,
};
pub use state::{FieldSelector, FieldState};
pub use stencil::{second_derivative, spatial_derivative};
