use netflux::analysis::{burgers_initial, burgers_reference, gauss_average, total_variation};
use netflux::relaxation::{imex_run_1to1, imex_step_1to1, relaxation_coupling, RelaxState};
use netflux::schemes::{
    run, step, step_periodic_line, RunOptions, SchemeConfig, SchemeOrder, TimeStep,
};
use netflux::{BoundaryCondition, CellField, FluxFunction, Grid, Network};

fn burgers(m: usize, bc: BoundaryCondition) -> Network {
    Network::one_to_one(
        Grid::unit(m).unwrap(),
        FluxFunction::Burgers,
        1.0,
        FluxFunction::Burgers,
        1.0,
        bc,
    )
    .unwrap()
}

fn merged(field: &CellField) -> Vec<f64> {
    field
        .interior(0)
        .iter()
        .chain(field.interior(1))
        .copied()
        .collect()
}

#[test]
fn coupled_first_order_equals_uncoupled_scheme() {
    let net = burgers(40, BoundaryCondition::Periodic);
    let mut field = CellField::from_cell_averages(&net, |_, x| burgers_initial(x));
    let mut line = merged(&field);
    let cfg = SchemeConfig::new(SchemeOrder::First, TimeStep::Cfl(0.9));
    let dt = cfg.dt(&net);
    let dx = net.grid().dx;
    for _ in 0..500 {
        field = step(&field, &net, &cfg, dt).unwrap().field;
        line = step_periodic_line(
            &line,
            &FluxFunction::Burgers,
            1.0,
            dx,
            dt,
            SchemeOrder::First,
        );
    }
    let diff = merged(&field)
        .iter()
        .zip(&line)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-14, "max deviation {diff:e}");
}

#[test]
fn first_order_is_lax_friedrichs_when_lambda_matches_grid_ratio() {
    let net = burgers(25, BoundaryCondition::Periodic);
    let field =
        CellField::from_point_values(&net, |k, x| 0.3 + 0.5 * ((k + 1) as f64 * x).sin().abs());
    let dx = net.grid().dx;
    let dt = dx; // lambda = dx / dt = 1
    let cfg = SchemeConfig::new(SchemeOrder::First, TimeStep::Fixed(dt));
    let next = merged(&step(&field, &net, &cfg, dt).unwrap().field);
    let u = merged(&field);
    let n = u.len();
    let f = |x: f64| 0.5 * x * x;
    for j in 0..n {
        let (l, r) = (u[(j + n - 1) % n], u[(j + 1) % n]);
        let lxf = 0.5 * (l + r) - dt / (2.0 * dx) * (f(r) - f(l));
        assert!((next[j] - lxf).abs() <= 1e-14, "cell {j}");
    }
}

#[test]
fn muscl_away_from_node_matches_uncoupled_muscl() {
    let net = burgers(30, BoundaryCondition::Periodic);
    let field = CellField::from_cell_averages(&net, |_, x| burgers_initial(x));
    let cfg = SchemeConfig::new(SchemeOrder::MusclCentral, TimeStep::Cfl(0.4));
    let dt = cfg.dt(&net);
    let next = merged(&step(&field, &net, &cfg, dt).unwrap().field);
    let line = step_periodic_line(
        &merged(&field),
        &FluxFunction::Burgers,
        1.0,
        net.grid().dx,
        dt,
        SchemeOrder::MusclCentral,
    );
    let node = 30;
    for j in (0..60).filter(|&j| j + 3 < node || j >= node + 3) {
        assert!((next[j] - line[j]).abs() <= 1e-15, "cell {j}");
    }
}

#[test]
fn zero_flux_network_conserves_mass() {
    let net = Network::builder(Grid::unit(50).unwrap())
        .incoming(FluxFunction::lwr(1.0), 1.0, BoundaryCondition::ZeroFlux)
        .incoming(FluxFunction::lwr(1.0), 1.0, BoundaryCondition::ZeroFlux)
        .outgoing(FluxFunction::lwr(1.2), 1.0, BoundaryCondition::ZeroFlux)
        .build()
        .unwrap();
    let field =
        CellField::from_point_values(&net, |k, x| 0.2 + 0.15 * k as f64 + 0.1 * (5.0 * x).sin());
    for order in [
        SchemeOrder::First,
        SchemeOrder::MusclCentral,
        SchemeOrder::MusclTvd,
    ] {
        let cfg = SchemeConfig::new(order, TimeStep::Cfl(0.45));
        let t_end = 1000.0 * cfg.dt(&net);
        let tr = run(
            &field,
            &net,
            &cfg,
            &RunOptions::new(t_end).diagnostics(true),
        )
        .unwrap();
        let m0 = tr.initial_mass;
        let drift = (tr.final_field.total_mass(net.grid().dx) - m0).abs() / m0;
        assert!(drift <= 1e-11, "{order:?}: drift {drift:e}");
        assert!(tr.max_node_residual() <= 1e-12);
    }
}

#[test]
fn tvd_variant_does_not_increase_total_variation() {
    let net = burgers(100, BoundaryCondition::Periodic);
    let field = CellField::from_cell_averages(&net, |_, x| burgers_initial(x));
    let cfg = SchemeConfig::new(SchemeOrder::MusclTvd, TimeStep::Cfl(0.5));
    let tr = run(&field, &net, &cfg, &RunOptions::new(0.75).diagnostics(true)).unwrap();
    let mut prev = total_variation(&field, &net);
    for d in &tr.diagnostics {
        assert!(
            d.total_variation <= prev + 1e-13,
            "step {}: {} > {}",
            d.step,
            d.total_variation,
            prev
        );
        prev = d.total_variation;
    }
}

#[test]
fn reference_agrees_with_fine_grid_solution() {
    let n = 8000;
    let dx = 2.0 / n as f64;
    let mut u: Vec<f64> = (0..n)
        .map(|i| {
            gauss_average(
                burgers_initial,
                -1.0 + i as f64 * dx,
                -1.0 + (i + 1) as f64 * dx,
            )
        })
        .collect();
    let dt = 0.05 * dx;
    let steps = (0.5 / dt).round() as usize;
    for _ in 0..steps {
        u = step_periodic_line(
            &u,
            &FluxFunction::Burgers,
            1.0,
            dx,
            dt,
            SchemeOrder::MusclCentral,
        );
    }
    let t = steps as f64 * dt;
    for &x in &[-0.75, -0.5, 0.0, 0.6, 0.9] {
        let i = ((x + 1.0) / dx).floor() as usize;
        let a = -1.0 + i as f64 * dx;
        let exact = gauss_average(|y| burgers_reference(y, t).unwrap(), a, a + dx);
        assert!((u[i] - exact).abs() <= 1e-5, "x = {x}: {} vs {exact}", u[i]);
    }
}

#[test]
fn source_free_imex_step_is_characteristic_upwinding() {
    let net = burgers(20, BoundaryCondition::Periodic);
    let field = CellField::from_point_values(&net, |_, x| 0.5 + 0.3 * (3.0 * x).cos());
    let mut state = RelaxState::equilibrium(&field, &net, f64::INFINITY).unwrap();
    state.v[1][4] += 0.05;
    let dx = net.grid().dx;
    let dt = 0.7 * dx;
    let coupling = relaxation_coupling(&state, &net);
    let next = imex_step_1to1(&state, &net, dt, &coupling).unwrap();

    let lam = 1.0;
    let u: Vec<f64> = state.u.concat();
    let v: Vec<f64> = state.v.concat();
    let n = u.len();
    let wm: Vec<f64> = (0..n).map(|j| 0.5 * (v[j] - lam * u[j])).collect();
    let wp: Vec<f64> = (0..n).map(|j| 0.5 * (v[j] + lam * u[j])).collect();
    let c = lam * dt / dx;
    let nu: Vec<f64> = next.u.concat();
    let nv: Vec<f64> = next.v.concat();
    for j in 0..n {
        let wm_new = wm[j] + c * (wm[(j + 1) % n] - wm[j]);
        let wp_new = wp[j] - c * (wp[j] - wp[(j + n - 1) % n]);
        assert!(
            (0.5 * (nv[j] - lam * nu[j]) - wm_new).abs() <= 1e-15,
            "w- at {j}"
        );
        assert!(
            (0.5 * (nv[j] + lam * nu[j]) - wp_new).abs() <= 1e-15,
            "w+ at {j}"
        );
    }
}

#[test]
fn imex_approaches_limit_scheme() {
    let net = burgers(50, BoundaryCondition::Periodic);
    let field = CellField::from_cell_averages(&net, |_, x| burgers_initial(x));
    let cfg = SchemeConfig::new(SchemeOrder::First, TimeStep::Cfl(0.5));
    let dt = cfg.dt(&net);
    let mut limit = field.clone();
    for _ in 0..100 {
        limit = step(&limit, &net, &cfg, dt).unwrap().field;
    }
    let limit = merged(&limit);
    let mut gaps = Vec::new();
    for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
        let state = RelaxState::equilibrium(&field, &net, eps).unwrap();
        let relaxed = imex_run_1to1(&state, &net, dt, 100).unwrap();
        let u = relaxed.u.concat();
        gaps.push(
            u.iter()
                .zip(&limit)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] <= 1e-6, "{gaps:?}");
}
