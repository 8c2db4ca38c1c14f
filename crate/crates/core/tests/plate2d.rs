use std::f64::consts::PI;

use vonkarman::fields::FieldExpr;
use vonkarman::forcing::Forcing2;
use vonkarman::plate2d::{linear_step, vk_step, Grid2, PlateSolver, PlateState, Regime};
use vonkarman::ReducedTensor2;

fn iso() -> ReducedTensor2 {
    ReducedTensor2::isotropic(1.0, 2.0 / 3.0)
}

fn free_vibration_error(n: usize, dt: f64, t_end: f64) -> f64 {
    let grid = Grid2::periodic(PI, n, n).unwrap();
    let solver = PlateSolver::new(grid, iso(), Regime::Linear);
    let mode = FieldExpr::cos_product(1.0, 1.0, 1.0);
    let v0 = mode.sample(&grid).unwrap();
    let mut s = solver.initial_state(&v0, &vec![0.0; grid.len()]).unwrap();
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        solver.step(&mut s, &Forcing2::Zero, dt).unwrap();
    }
    let omega = (8.0f64 / 9.0).sqrt();
    let err: Vec<f64> = v0.iter().zip(&s.v).map(|(e, v)| v - (omega * s.t).cos() * e).collect();
    grid.l2_norm(&err)
}

#[test]
fn manufactured_free_vibration_is_second_order() {
    let e32 = free_vibration_error(32, 1e-3, 1.0);
    let e64 = free_vibration_error(64, 1e-3, 1.0);
    let ratio = e32 / e64;
    assert!(e64 < 5e-3, "error {e64}");
    assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
}

#[test]
fn zero_state_is_fixed_point() {
    let grid = Grid2::clamped(1.0, 10, 10).unwrap();
    let s = PlateState::zero(&grid);
    assert_eq!(vk_step(&grid, &iso(), &s, &Forcing2::Zero, 1e-3).unwrap().v, s.v);
    assert_eq!(linear_step(&grid, &iso(), &s, &Forcing2::Zero, 1e-3).unwrap().p, s.p);
}

#[test]
fn small_amplitude_vk_matches_linear() {
    let grid = Grid2::periodic(PI, 16, 16).unwrap();
    let v0 = FieldExpr::cos_product(1e-3, 1.0, 1.0).sample(&grid).unwrap();
    let zero = vec![0.0; grid.len()];
    let vk = PlateSolver::new(grid, iso(), Regime::VonKarman);
    let lin = PlateSolver::new(grid, iso(), Regime::Linear);
    let mut a = vk.initial_state(&v0, &zero).unwrap();
    let mut b = lin.initial_state(&v0, &zero).unwrap();
    for _ in 0..100 {
        vk.step(&mut a, &Forcing2::Zero, 1e-2).unwrap();
        lin.step(&mut b, &Forcing2::Zero, 1e-2).unwrap();
    }
    let diff: Vec<f64> = a.v.iter().zip(&b.v).map(|(x, y)| x - y).collect();
    assert!(grid.l2_norm(&diff) / grid.l2_norm(&b.v) <= 1e-4);
}

fn balance_defect(dt: f64) -> f64 {
    let grid = Grid2::clamped(1.0, 12, 12).unwrap();
    let solver = PlateSolver::new(grid, iso(), Regime::VonKarman);
    let v0 = FieldExpr::Bump { amplitude: 0.5 }.sample(&grid).unwrap();
    let g = Forcing2::CosProduct { amplitude: 5.0, omega: 3.0, k1: 0.0, k2: 0.0 };
    let mut s = solver.initial_state(&v0, &vec![0.0; grid.len()]).unwrap();
    let e0 = solver.energy(&s, &g).total();
    let mut work = 0.0;
    let steps = (0.5 / dt).round() as usize;
    for _ in 0..steps {
        work += solver.step(&mut s, &g, dt).unwrap().work;
    }
    (solver.energy(&s, &g).total() - e0 - work).abs()
}

#[test]
fn forced_energy_balance_is_second_order() {
    let a = balance_defect(2e-3);
    let b = balance_defect(1e-3);
    let ratio = a / b;
    assert!((3.2..=4.8).contains(&ratio), "defects {a} {b} ratio {ratio}");
}

mod weak_form {
    use super::*;
    use vonkarman::plate2d::{weak_residual_vk, BumpFamily, Trajectory};

    fn injected_residual(n: usize, dt: f64) -> f64 {
        let grid = Grid2::periodic(PI, n, n).unwrap();
        let solver = PlateSolver::new(grid, iso(), Regime::Linear);
        let omega = (8.0f64 / 9.0).sqrt();
        let shape = FieldExpr::cos_product(1.0, 1.0, 1.0).sample(&grid).unwrap();
        let mut traj = Trajectory::new(dt);
        let steps = (1.0 / dt).round() as usize;
        for k in 0..=steps {
            let t = k as f64 * dt;
            let mut s = PlateState::zero(&grid);
            s.t = t;
            s.v = shape.iter().map(|e| (omega * t).cos() * e).collect();
            s.p = shape.iter().map(|e| -omega * (omega * t).sin() * e).collect();
            traj.push(&s);
        }
        weak_residual_vk(&solver, &traj, &Forcing2::Zero, &BumpFamily::standard(1.0, PI)).max()
    }

    #[test]
    fn exact_solution_residual_is_second_order() {
        let a = injected_residual(16, 0.02);
        let b = injected_residual(32, 0.01);
        assert!(b < a / 3.0, "{a} {b}");
    }

    #[test]
    fn zero_trajectory_has_zero_residual() {
        let grid = Grid2::clamped(1.0, 9, 9).unwrap();
        let solver = PlateSolver::new(grid, iso(), Regime::VonKarman);
        let mut traj = Trajectory::new(0.1);
        for k in 0..5 {
            let mut s = PlateState::zero(&grid);
            s.t = 0.1 * k as f64;
            traj.push(&s);
        }
        assert_eq!(weak_residual_vk(&solver, &traj, &Forcing2::Zero, &BumpFamily::standard(0.4, 1.0)).max(), 0.0);
    }

    #[test]
    fn solver_output_satisfies_weak_form() {
        let grid = Grid2::periodic(PI, 16, 16).unwrap();
        let solver = PlateSolver::new(grid, iso(), Regime::VonKarman);
        let v0 = FieldExpr::cos_product(0.3, 1.0, 1.0).sample(&grid).unwrap();
        let s = solver.initial_state(&v0, &vec![0.0; grid.len()]).unwrap();
        let residual = |dt: f64| {
            let mut s = s.clone();
            let mut traj = Trajectory::new(dt);
            traj.push(&s);
            for _ in 0..(1.0 / dt).round() as usize {
                solver.step(&mut s, &Forcing2::Zero, dt).unwrap();
                traj.push(&s);
            }
            weak_residual_vk(&solver, &traj, &Forcing2::Zero, &BumpFamily::standard(1.0, PI))
        };
        let coarse = residual(0.02);
        let fine = residual(0.01);
        assert!(coarse.membrane <= 1e-9 && fine.membrane <= 1e-9);
        assert!(fine.transverse < coarse.transverse / 3.0, "{coarse:?} {fine:?}");
    }
}

#[test]
fn damped_clamped_plate_settles_to_static_solution() {
    let grid = Grid2::clamped(1.0, 12, 12).unwrap();
    let mut solver = PlateSolver::new(grid, iso(), Regime::Linear);
    solver.damping = 4.0;
    let zero = vec![0.0; grid.len()];
    let mut s = solver.initial_state(&zero, &zero).unwrap();
    let g = Forcing2::Constant { value: 1.0 };
    for _ in 0..4000 {
        solver.step(&mut s, &g, 0.01).unwrap();
    }
    // stationarity: K v = g on free nodes
    let mut kv = vec![0.0; grid.len()];
    solver.bending().apply(&s.v, &mut kv);
    let mut worst = 0.0f64;
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            if grid.is_free(i, j) {
                worst = worst.max((kv[grid.index(i, j)] - 1.0).abs());
            }
        }
    }
    assert!(worst <= 1e-6, "stationarity residual {worst}");
    assert!(s.v[grid.index(6, 6)] > 0.0);
}
