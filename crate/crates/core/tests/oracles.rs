use std::sync::Arc;

use ibvp_core::flux::{LwrFlux, SpeedProfile};
use ibvp_core::ibvp::{IbvpProblem, StepFn};
use ibvp_core::solver::{l1_cells, solve, solve_via_gamma, GridSpec, SolverConfig};
use ibvp_core::verify::riemann::{glue_riemann, riemann_at};

const R: f64 = 0.2;
const L: f64 = 100.0;

fn riemann_problem(ul: f64, ur: f64, v: f64, horizon: f64) -> IbvpProblem {
    IbvpProblem::segment(
        StepFn::new(vec![0.0, 0.5 * L, L], vec![ul, ur]).unwrap(),
        StepFn::constant(0.0, horizon, ul).unwrap(),
        StepFn::constant(0.0, horizon, ur).unwrap(),
        SpeedProfile::constant(v, horizon).unwrap(),
        Arc::new(LwrFlux::new(R).unwrap()),
    )
    .unwrap()
}

fn riemann_errors(ul: f64, ur: f64) -> Vec<f64> {
    let (v, t) = (10.0, 4.0);
    let p = riemann_problem(ul, ur, v, t);
    let exact = riemann_at(ul, ur, 0.5 * L, v, R).unwrap();
    [100, 200, 400, 800]
        .iter()
        .map(|&n| {
            let grid = GridSpec::covering(&p, n).unwrap();
            let f = solve(&p, &grid, &SolverConfig::default().uniform_records(t, t)).unwrap();
            let e = grid.edges();
            let reference: Vec<f64> = e.windows(2).map(|w| exact.integral(t, w[0], w[1]) / (w[1] - w[0])).collect();
            l1_cells(f.last(), &reference, grid.dx())
        })
        .collect()
}

fn assert_converges(errors: &[f64], factor: f64) {
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= factor, "errors {errors:?}");
    }
}

#[test]
fn stationary_shock_converges() {
    assert_converges(&riemann_errors(0.2 * R, 0.8 * R), 1.3);
}

#[test]
fn full_rarefaction_converges() {
    assert_converges(&riemann_errors(R, 0.0), 1.3);
}

#[test]
fn stationary_shock_stays_within_two_cells() {
    let p = riemann_problem(0.2 * R, 0.8 * R, 10.0, 20.0);
    let grid = GridSpec::covering(&p, 200).unwrap();
    let f = solve(&p, &grid, &SolverConfig::default().uniform_records(20.0, 20.0)).unwrap();
    let mid = 0.5 * R;
    let centers = grid.centers();
    let crossing = f.last().windows(2).position(|w| w[0] < mid && w[1] >= mid).unwrap();
    let x = 0.5 * (centers[crossing] + centers[crossing + 1]);
    assert!((x - 0.5 * L).abs() <= 2.0 * grid.dx(), "front at {x}");
}

#[test]
fn staircase_matches_glued_solution() {
    let v = 10.0;
    let u = StepFn::new(vec![0.0, 30.0, 70.0, L], vec![0.9 * R, 0.5 * R, 0.1 * R]).unwrap();
    let t = 1.5;
    let glued = glue_riemann(&u, v, R, t).unwrap();
    let p = IbvpProblem::segment(
        u.clone(),
        StepFn::constant(0.0, t, 0.9 * R).unwrap(),
        StepFn::constant(0.0, t, 0.1 * R).unwrap(),
        SpeedProfile::constant(v, t).unwrap(),
        Arc::new(LwrFlux::new(R).unwrap()),
    )
    .unwrap();
    let mut prev = f64::INFINITY;
    for n in [200, 400, 800] {
        let grid = GridSpec::covering(&p, n).unwrap();
        let f = solve(&p, &grid, &SolverConfig::default().uniform_records(t, t)).unwrap();
        let err = l1_cells(f.last(), &glued.cell_averages(&grid.edges()), grid.dx());
        // O(Δx^{1/2}) with room for the constant
        assert!(err < 0.5 * grid.dx().sqrt(), "n={n}: {err}");
        assert!(err < prev);
        prev = err;
    }
}

fn two_piece_problem() -> IbvpProblem {
    let t = 10.0;
    IbvpProblem::segment(
        StepFn::new(vec![0.0, 40.0, L], vec![0.05, 0.15]).unwrap(),
        StepFn::new(vec![0.0, 3.0, t], vec![0.08, 0.02]).unwrap(),
        StepFn::constant(0.0, t, 0.1).unwrap(),
        SpeedProfile::new(vec![0.0, 4.0, t], vec![15.0, 6.0], 6.0).unwrap(),
        Arc::new(LwrFlux::new(R).unwrap()),
    )
    .unwrap()
}

#[test]
fn gamma_path_agrees_under_refinement() {
    let p = two_piece_problem();
    let mut gaps = vec![];
    let mut mass = 0.0;
    for n in [100, 200, 400] {
        let grid = GridSpec::covering(&p, n).unwrap();
        let cfg = SolverConfig::default().uniform_records(p.horizon, p.horizon);
        let a = solve(&p, &grid, &cfg).unwrap();
        let b = solve_via_gamma(&p, &grid, &cfg).unwrap();
        assert_eq!(a.times, b.times);
        gaps.push(l1_cells(a.last(), b.last(), grid.dx()));
        mass = a.mass(a.len() - 1);
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(*gaps.last().unwrap() < 0.01 * mass, "{gaps:?} vs mass {mass}");
}

#[test]
fn gamma_path_constant_speed_is_exact() {
    let t = 10.0;
    let p = two_piece_problem().with_speed(SpeedProfile::constant(2.0, t).unwrap()).unwrap();
    let grid = GridSpec::covering(&p, 200).unwrap();
    let cfg = SolverConfig::default().uniform_records(t, 1.0);
    let a = solve(&p, &grid, &cfg).unwrap();
    let b = solve_via_gamma(&p, &grid, &cfg).unwrap();
    for (x, y) in a.profiles.iter().zip(&b.profiles) {
        assert!(l1_cells(x, y, grid.dx()) <= 1e-12, "{}", l1_cells(x, y, grid.dx()));
    }
}
