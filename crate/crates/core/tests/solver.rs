use pcf_core::diagnostics::total_energy;
use pcf_core::initdata::{bump_data, sample_state, BumpSpec, SingularSoliton, Zero};
use pcf_core::numerics::observed_orders;
use pcf_core::oracle::free_wave_at_rest;
use pcf_core::{evolve, Boundary, FieldState, Grid, SolverConfig, Termination};

fn run(initial: &FieldState, grid: &Grid, cfg: &SolverConfig) -> FieldState {
    let sum = evolve(initial, grid, cfg, |_| {}).unwrap();
    assert_eq!(sum.termination, Termination::Completed);
    sum.final_state
}

#[test]
fn linear_regime_follows_dalembert() {
    let eps = 1e-8;
    let b = BumpSpec::new(eps, 0.0, 10.0);
    let mut errs = Vec::new();
    for dx in [0.025, 0.0125, 0.00625] {
        let g = Grid::with_spacing(-20.0, 20.0, dx, 0.4).unwrap();
        let s = bump_data(&b, &BumpSpec::zero(), 1.0, &g).unwrap();
        let end = run(&s, &g, &SolverConfig::new(5.0));
        let exact: Vec<f64> = g.nodes().map(|x| free_wave_at_rest(&b, 5.0, x).0).collect();
        let scale = exact.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let err = end.ltil.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        errs.push(err / scale);
    }
    assert!(errs[2] < 1e-6, "relative errors {errs:?}");
    let orders = observed_orders(&errs, 2.0);
    assert!(orders.iter().all(|p| (1.8..2.2).contains(p)), "orders {orders:?}");
}

#[test]
fn soliton_evolution_converges_at_second_order() {
    // μ = 5 keeps Λ well away from zero on this window; compare only where
    // boundary effects cannot arrive by t = 1
    let sol = SingularSoliton::new(5.0).unwrap();
    let lam = sol.background();
    let mut errs = Vec::new();
    for dx in [0.04, 0.02, 0.01] {
        let g = Grid::with_spacing(-8.0, 8.0, dx, 0.4).unwrap();
        let s0 = sample_state(&sol, &g, 0.0, lam).unwrap();
        let end = run(&s0, &g, &SolverConfig::new(1.0));
        let exact = sample_state(&sol, &g, 1.0, lam).unwrap();
        let err = g
            .nodes()
            .enumerate()
            .filter(|(_, x)| x.abs() <= 6.0)
            .map(|(i, _)| (end.ltil[i] - exact.ltil[i]).abs().max((end.phi[i] - exact.phi[i]).abs()))
            .fold(0.0, f64::max);
        errs.push(err);
    }
    let orders = observed_orders(&errs, 2.0);
    assert!(orders.iter().all(|p| (1.8..2.2).contains(p)), "errors {errs:?}, orders {orders:?}");
}

#[test]
fn time_reversal_returns_to_initial_data() {
    let b = BumpSpec::new(0.05, 0.0, 4.0);
    let mut errs = Vec::new();
    for nx in [401, 801] {
        let g = Grid::with_cfl(-20.0, 20.0, nx, 0.4).unwrap();
        let s0 = bump_data(&b, &BumpSpec::new(0.05, 1.0, 4.0), 1.0, &g).unwrap();
        let fwd = run(&s0, &g, &SolverConfig::new(3.0));
        let mut back = fwd.time_reversed();
        back.t = 0.0;
        let end = run(&back, &g, &SolverConfig::new(3.0)).time_reversed();
        errs.push(FieldState { t: 0.0, ..end }.max_abs_diff(&s0));
    }
    assert!(errs[1] < 1e-5, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn boundary_policy_is_invisible_inside_the_domain_of_dependence() {
    let g = Grid::with_cfl(-30.0, 30.0, 601, 0.4).unwrap();
    let b = BumpSpec::new(0.02, 0.0, 5.0);
    let s0 = bump_data(&b, &b, 1.0, &g).unwrap();
    let out = run(&s0, &g, &SolverConfig::new(10.0));
    let frozen = run(
        &s0,
        &g,
        &SolverConfig {
            boundary: Boundary::Frozen,
            ..SolverConfig::new(10.0)
        },
    );
    assert!(out.max_abs_diff(&frozen) < 1e-12);
}

#[test]
fn energy_drift_shrinks_under_refinement() {
    let b = BumpSpec::new(0.01, 0.0, 8.0);
    let mut drift = Vec::new();
    for nx in [401, 801] {
        let g = Grid::with_cfl(-25.0, 25.0, nx, 0.4).unwrap();
        let s0 = bump_data(&b, &b, 1.0, &g).unwrap();
        let e0 = total_energy(&s0, &g).unwrap();
        let end = run(&s0, &g, &SolverConfig::new(8.0));
        drift.push((total_energy(&end, &g).unwrap() - e0).abs() / e0);
    }
    assert!(drift[0] / drift[1] > 3.0, "{drift:?}");
}

#[test]
fn recorded_states_keep_the_density_inequality() {
    let g = Grid::with_cfl(-20.0, 20.0, 401, 0.4).unwrap();
    let b = BumpSpec::new(0.2, 0.0, 3.0);
    let s0 = bump_data(&b, &BumpSpec::new(0.3, 0.5, 3.0), 0.8, &g).unwrap();
    let mut worst = f64::INFINITY;
    let cfg = SolverConfig {
        record_every: 5,
        ..SolverConfig::new(6.0)
    };
    evolve(&s0, &g, &cfg, |s| {
        worst = worst.min(pcf_core::densities(s, &g).unwrap().inequality_margin());
    })
    .unwrap();
    assert!(worst >= -1e-14, "{worst}");
}

#[test]
fn zero_profile_data_stays_flat() {
    let g = Grid::with_cfl(-5.0, 5.0, 101, 0.4).unwrap();
    let s = pcf_core::traveling_wave(&Zero, &Zero, pcf_core::Direction::Right, 1.0, &g, 0.0).unwrap();
    let end = run(&s, &g, &SolverConfig::new(3.0));
    assert_eq!(end.sup_ltil(), 0.0);
}
