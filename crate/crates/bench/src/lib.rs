//! Shared fixtures for the kernel benchmarks in `benches/`.

use pcf_core::{bump_data, BumpSpec, FieldState, Grid};

/// Small two-field bump on [−50, 50] with `nx` nodes, at the default cfl.
pub fn bump_fixture(nx: usize) -> (Grid, FieldState) {
    let grid = Grid::with_cfl(-50.0, 50.0, nx, 0.4).expect("fixture grid");
    let state = bump_data(&BumpSpec::new(0.01, 0.0, 5.0), &BumpSpec::new(0.01, 1.0, 5.0), 1.0, &grid)
        .expect("fixture data");
    (grid, state)
}
