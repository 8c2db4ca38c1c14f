//! A clamped von Karman plate under a time-periodic load: energy balance
//! against the work of the load and the membrane residual after each step.

use vonkarman::fields::FieldExpr;
use vonkarman::forcing::Forcing2;
use vonkarman::plate2d::{Grid2, PlateSolver, Regime};
use vonkarman::{reduce, MaterialModel};

fn main() -> vonkarman::Result<()> {
    let grid = Grid2::clamped(1.0, 24, 24)?;
    let l2 = reduce(&MaterialModel::dist_so3(1.0)?.tangent_at_identity())?;
    let solver = PlateSolver::new(grid, l2, Regime::VonKarman);
    let v0 = FieldExpr::Bump { amplitude: 0.3 }.sample(&grid)?;
    let load = Forcing2::CosProduct { amplitude: 4.0, omega: 3.0, k1: 0.0, k2: 0.0 };
    let mut s = solver.initial_state(&v0, &vec![0.0; grid.len()])?;
    let e0 = solver.energy(&s, &load).total();
    let (dt, mut work, mut residual) = (2e-3, 0.0, 0.0f64);
    println!("{:>6} {:>14} {:>14} {:>14}", "t", "energy", "E0 + work", "membrane res");
    for n in 1..=1000 {
        let rep = solver.step(&mut s, &load, dt)?;
        work += rep.work;
        residual = residual.max(rep.membrane_residual);
        if n % 100 == 0 {
            let e = solver.energy(&s, &load).total();
            println!("{:6.3} {e:14.8e} {:14.8e} {residual:14.3e}", s.t, e0 + work);
            residual = 0.0;
        }
    }
    Ok(())
}
