//! Free vibration of a periodic linear plate against the exact mode
//! `cos(omega t) cos(x1) cos(x2)`, followed by the same initial data in the
//! von Karman regime at a larger amplitude.

use std::f64::consts::PI;

use vonkarman::fields::FieldExpr;
use vonkarman::forcing::Forcing2;
use vonkarman::plate2d::{write_series, ExactMode, Grid2, PlateRunOptions, PlateSolver, Regime};
use vonkarman::{reduce, MaterialModel};

fn main() -> vonkarman::Result<()> {
    let l2 = reduce(&MaterialModel::svk(1.0, 1.0)?.tangent_at_identity())?;
    let omega = 2.0 * 2f64.sqrt() / 3.0;
    for n in [16, 32, 64] {
        let grid = Grid2::periodic(PI, n, n)?;
        let solver = PlateSolver::new(grid, l2, Regime::Linear);
        let shape = FieldExpr::cos_product(1.0, 1.0, 1.0).sample(&grid)?;
        let initial = solver.initial_state(&shape, &vec![0.0; grid.len()])?;
        let opts = PlateRunOptions {
            dt: 1e-3,
            t_end: 1.0,
            sample_every: 1000,
            keep_states: false,
            exact: Some(ExactMode { shape, omega }),
        };
        let run = solver.run(&initial, &Forcing2::Zero, &opts)?;
        let err = run.samples.last().and_then(|s| s.error_l2).unwrap_or(f64::NAN);
        println!("linear n = {n:3}: final L2 error {err:.3e}");
    }

    let grid = Grid2::periodic(PI, 32, 32)?;
    let solver = PlateSolver::new(grid, l2, Regime::VonKarman);
    let v0 = FieldExpr::cos_product(0.8, 1.0, 1.0).sample(&grid)?;
    let initial = solver.initial_state(&v0, &vec![0.0; grid.len()])?;
    let opts = PlateRunOptions { dt: 1e-2, t_end: 2.0, sample_every: 20, keep_states: false, exact: None };
    let run = solver.run(&initial, &Forcing2::Zero, &opts)?;
    println!("\nvon Karman, amplitude 0.8:");
    write_series(std::io::stdout().lock(), &run.samples)
}
