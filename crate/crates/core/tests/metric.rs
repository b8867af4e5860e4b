use pcf_core::initdata::{bump_data, singular_soliton_metric, BumpSpec, SolitonParams, Zero};
use pcf_core::numerics::{interpolate, observed_orders};
use pcf_core::{
    chiral_residual, dalembert_solve, evolve, metric_of_state, source_g, FieldState, Grid, MetricField,
    SolverConfig, SourceHistory,
};

fn soliton_metric(p: &SolitonParams, g: &Grid, t: f64) -> MetricField {
    let m: Vec<[[f64; 2]; 2]> = g.nodes().map(|x| singular_soliton_metric(p, t, x).unwrap()).collect();
    MetricField {
        t,
        alpha: 1.0,
        g11: m.iter().map(|a| a[0][0]).collect(),
        g12: m.iter().map(|a| a[0][1]).collect(),
        g22: m.iter().map(|a| a[1][1]).collect(),
    }
}

fn bump_run(dx: f64) -> (Grid, FieldState) {
    let g = Grid::with_spacing(-30.0, 30.0, dx, 0.4).unwrap();
    let b = BumpSpec::new(0.1, 0.0, 5.0);
    let s = bump_data(&b, &BumpSpec::new(0.1, 1.0, 5.0), 1.0, &g).unwrap();
    (g, s)
}

#[test]
fn soliton_metric_solves_the_chiral_equation_at_second_order() {
    let p = SolitonParams::new(2.0).unwrap();
    let errs: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&dx| {
            let g = Grid::with_spacing(-10.0, 10.0, dx, 0.4).unwrap();
            let h = g.dt();
            let ms: Vec<_> = [1.0 - h, 1.0, 1.0 + h].iter().map(|&t| soliton_metric(&p, &g, t)).collect();
            chiral_residual([&ms[0], &ms[1], &ms[2]], &g).unwrap()
        })
        .collect();
    let orders = observed_orders(&errs, 2.0);
    assert!(orders.iter().all(|p| (1.8..2.2).contains(p)), "{errs:?} {orders:?}");
}

#[test]
fn evolved_run_satisfies_the_chiral_equation_to_scheme_order() {
    let errs: Vec<f64> = [0.05, 0.025, 0.0125]
        .iter()
        .map(|&dx| {
            let (g, s) = bump_run(dx);
            let mut hist: Vec<FieldState> = Vec::new();
            evolve(&s, &g, &SolverConfig::new(4.0 + g.dt()), |st| {
                hist.push(st.clone());
                if hist.len() > 3 {
                    hist.remove(0);
                }
            })
            .unwrap();
            let ms: Vec<_> = hist.iter().map(|s| metric_of_state(s).unwrap()).collect();
            let r = chiral_residual([&ms[0], &ms[1], &ms[2]], &g).unwrap();
            assert!(ms.iter().all(|m| m.det_deviation() < 1e-10));
            r
        })
        .collect();
    // pre-asymptotic at the coarsest level
    let orders = observed_orders(&errs, 2.0);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(orders[1] > 1.5, "{errs:?} {orders:?}");
}

#[test]
fn dalembert_reproduces_a_manufactured_solution() {
    // ψ = t² e^{−x²} solves □ψ = s with zero data
    let s = |t: f64, x: f64| {
        let e = (-x * x).exp();
        2.0 * e - t * t * (4.0 * x * x - 2.0) * e
    };
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dx| {
            let g = Grid::with_spacing(-10.0, 10.0, dx, 0.5).unwrap();
            let mut hist = SourceHistory::new();
            let n = (2.0 / g.dt()).round() as usize;
            for j in 0..=n {
                let t = j as f64 * g.dt();
                hist.push(t, g.nodes().map(|x| s(t, x)).collect()).unwrap();
            }
            [-1.0, 0.0, 0.5, 2.0]
                .iter()
                .map(|&x| (dalembert_solve(&Zero, &Zero, &hist, 2.0, x, &g).unwrap() - 4.0 * (-x * x).exp()).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let orders = observed_orders(&errs, 2.0);
    assert!(orders.iter().all(|p| (1.8..2.3).contains(p)), "{errs:?} {orders:?}");
}

#[test]
fn log_f_from_a_run_satisfies_its_wave_equation() {
    let (ts, xs) = (2.0, 1.0);
    let diffs: Vec<f64> = [(0.05, 0.4), (0.025, 0.2), (0.0125, 0.1)]
        .iter()
        .map(|&(dx, h)| {
            let (g, s) = bump_run(dx);
            let mut src = SourceHistory::new();
            let mut at_ts = None;
            evolve(&s, &g, &SolverConfig::new(3.0), |st| {
                let v = source_g(st, &g).unwrap();
                if (st.t - ts).abs() < 1e-9 {
                    at_ts = interpolate(&v, &g, xs);
                }
                src.push(st.t, v).unwrap();
            })
            .unwrap();
            let psi = |t: f64, x: f64| dalembert_solve(&Zero, &Zero, &src, t, x, &g).unwrap();
            let c = psi(ts, xs);
            let boxed = (psi(ts + h, xs) - 2.0 * c + psi(ts - h, xs) - psi(ts, xs + h) + 2.0 * c - psi(ts, xs - h)) / (h * h);
            (boxed - at_ts.unwrap()).abs()
        })
        .collect();
    let orders = observed_orders(&diffs, 2.0);
    assert!(orders.iter().all(|p| *p > 1.8), "{diffs:?} {orders:?}");
}
