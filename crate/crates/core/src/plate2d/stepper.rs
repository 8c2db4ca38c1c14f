use serde::{Deserialize, Serialize};

use super::bending::BendingOperator;
use super::grid::Grid2;
use super::membrane::MembraneSolver;
use crate::cg::{self, CgOptions};
use crate::error::{Error, Result};
use crate::forcing::Forcing2;
use crate::tensor::ReducedTensor2;

/// Which plate model is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Bending coupled to the in-plane membrane.
    VonKarman,
    /// Bending only, `u = 0`.
    Linear,
}

/// Nodal fields of the plate; all vectors have `grid.len()` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateState {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl PlateState {
    pub fn zero(grid: &Grid2) -> Self {
        let n = grid.len();
        Self { u1: vec![0.0; n], u2: vec![0.0; n], v: vec![0.0; n], p: vec![0.0; n], t: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().chain(&self.p).chain(&self.u1).chain(&self.u2).all(|x| x.is_finite())
    }
}

/// Energy terms of a plate state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PlateEnergy {
    pub kinetic: f64,
    pub membrane: f64,
    pub bending: f64,
    pub load_work_rate: f64,
}

impl PlateEnergy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.membrane + self.bending
    }
}

/// Diagnostics of one accepted step.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepReport {
    /// `dt * sum m g p_mid`.
    pub work: f64,
    /// Membrane residual after the `u` refresh (0 in the linear regime).
    pub membrane_residual: f64,
}

/// Time integrator for either plate model on a fixed grid.
///
/// Bending is advanced by the implicit midpoint rule. The membrane
/// coupling and the load enter at the half step; the membrane force is
/// first evaluated at a predicted midpoint and then re-evaluated
/// `corrections` times at the updated midpoint, which keeps the energy
/// error second order in `dt`.
#[derive(Debug, Clone)]
pub struct PlateSolver {
    grid: Grid2,
    l2: ReducedTensor2,
    regime: Regime,
    bending: BendingOperator,
    membrane: MembraneSolver,
    /// Linear damping coefficient `c` in `p' = ... - c p` (0 for the conservative model).
    pub damping: f64,
    pub corrections: usize,
    pub implicit_tolerance: f64,
}

impl PlateSolver {
    pub fn new(grid: Grid2, l2: ReducedTensor2, regime: Regime) -> Self {
        Self {
            grid,
            l2,
            regime,
            bending: BendingOperator::new(grid, l2),
            membrane: MembraneSolver::new(grid, l2),
            damping: 0.0,
            corrections: 1,
            implicit_tolerance: 1e-13,
        }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn l2(&self) -> &ReducedTensor2 {
        &self.l2
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn bending(&self) -> &BendingOperator {
        &self.bending
    }

    pub fn membrane(&self) -> &MembraneSolver {
        &self.membrane
    }

    /// Largest stable step for the explicit membrane coupling.
    pub fn dt_cap(&self) -> f64 {
        self.grid.dt_cap(self.l2.max_eigenvalue())
    }

    /// Builds a state from initial deflection and velocity, enforcing the
    /// boundary mode and solving for `u` in the von Karman regime.
    pub fn initial_state(&self, v0: &[f64], p0: &[f64]) -> Result<PlateState> {
        let mut s = PlateState::zero(&self.grid);
        s.v.copy_from_slice(v0);
        s.p.copy_from_slice(p0);
        self.constrain(&mut s.v);
        self.constrain(&mut s.p);
        self.refresh_membrane(&mut s)?;
        Ok(s)
    }

    fn constrain(&self, f: &mut [f64]) {
        let g = &self.grid;
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                if !g.is_free(i, j) {
                    f[g.index(i, j)] = 0.0;
                }
            }
        }
    }

    /// Re-solves `u` for the current `v`; returns the membrane residual.
    pub fn refresh_membrane(&self, s: &mut PlateState) -> Result<f64> {
        match self.regime {
            Regime::Linear => {
                s.u1.fill(0.0);
                s.u2.fill(0.0);
                Ok(0.0)
            }
            Regime::VonKarman => {
                self.membrane.solve(&s.v, &mut s.u1, &mut s.u2)?;
                Ok(self.membrane.residual(&s.u1, &s.u2, &s.v))
            }
        }
    }

    pub fn energy(&self, s: &PlateState, forcing: &Forcing2) -> PlateEnergy {
        let weights = self.grid.weights();
        let g = forcing.sample(s.t, &self.grid);
        let kinetic = 0.5 * weights.iter().zip(&s.p).map(|(w, p)| w * p * p).sum::<f64>();
        let load_work_rate = weights.iter().zip(&s.p).zip(&g).map(|((w, p), g)| w * g * p).sum();
        let membrane = match self.regime {
            Regime::Linear => 0.0,
            Regime::VonKarman => self.membrane.energy(&s.u1, &s.u2, &s.v),
        };
        PlateEnergy { kinetic, membrane, bending: self.bending.energy(&s.v), load_work_rate }
    }

    /// Solves `((1 + c dt/2) I + dt^2/4 K) p_mid = p + dt/2 (-K v + f)` on free nodes.
    fn implicit_solve(&self, s: &PlateState, rhs_force: &[f64], dt: f64, p_mid: &mut [f64]) -> Result<()> {
        let n = self.grid.len();
        let mut kv = vec![0.0; n];
        self.bending.apply(&s.v, &mut kv);
        let mut rhs: Vec<f64> = (0..n).map(|k| s.p[k] + 0.5 * dt * (rhs_force[k] - kv[k])).collect();
        self.constrain(&mut rhs);
        let diag = 1.0 + 0.5 * self.damping * dt;
        let quarter = 0.25 * dt * dt;
        let apply = |x: &[f64], out: &mut [f64]| {
            self.bending.apply(x, out);
            for k in 0..n {
                out[k] = diag * x[k] + quarter * out[k];
            }
            self.constrain(out);
        };
        let scale = rhs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let opts = CgOptions { tolerance: self.implicit_tolerance * scale, max_iterations: 10 * n };
        cg::solve(apply, &rhs, p_mid, opts, None::<fn(&mut [f64])>)?;
        Ok(())
    }

    /// Advances `s` by `dt`.
    pub fn step(&self, s: &mut PlateState, forcing: &Forcing2, dt: f64) -> Result<StepReport> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be > 0 (got {dt})")));
        }
        let n = self.grid.len();
        let t_mid = s.t + 0.5 * dt;
        let mut load = vec![0.0; n];
        forcing.sample_into(t_mid, &self.grid, &mut load);
        self.constrain(&mut load);

        let mut p_mid = s.p.clone();
        let mut force = load.clone();
        if self.regime == Regime::VonKarman {
            let mut mid = PlateState {
                u1: s.u1.clone(),
                u2: s.u2.clone(),
                v: s.v.iter().zip(&s.p).map(|(v, p)| v + 0.5 * dt * p).collect(),
                p: Vec::new(),
                t: t_mid,
            };
            let mut fm = vec![0.0; n];
            for pass in 0..=self.corrections {
                if pass > 0 {
                    self.implicit_solve(s, &force, dt, &mut p_mid)?;
                    for k in 0..n {
                        mid.v[k] = s.v[k] + 0.5 * dt * p_mid[k];
                    }
                }
                self.membrane.solve(&mid.v, &mut mid.u1, &mut mid.u2)?;
                self.membrane.transverse_force(&mid.u1, &mid.u2, &mid.v, &mut fm);
                for k in 0..n {
                    force[k] = load[k] + fm[k];
                }
            }
            // warm start for the final membrane refresh
            s.u1.copy_from_slice(&mid.u1);
            s.u2.copy_from_slice(&mid.u2);
        }
        self.implicit_solve(s, &force, dt, &mut p_mid)?;

        let area = self.grid.dx1() * self.grid.dx2();
        let mut work = 0.0;
        for k in 0..n {
            work += area * load[k] * p_mid[k];
            s.v[k] += dt * p_mid[k];
            s.p[k] = 2.0 * p_mid[k] - s.p[k];
        }
        s.t += dt;
        if !s.v.iter().chain(&s.p).all(|x| x.is_finite()) {
            return Err(Error::BlowUp { time: s.t, reason: "non-finite plate field".into() });
        }
        let membrane_residual = self.refresh_membrane(s)?;
        Ok(StepReport { work: dt * work, membrane_residual })
    }
}

/// One von Karman step with default solver settings.
pub fn vk_step(grid: &Grid2, l2: &ReducedTensor2, state: &PlateState, g: &Forcing2, dt: f64) -> Result<PlateState> {
    let mut next = state.clone();
    PlateSolver::new(*grid, *l2, Regime::VonKarman).step(&mut next, g, dt)?;
    Ok(next)
}

/// One linear plate step; `u` stays zero.
pub fn linear_step(grid: &Grid2, l2: &ReducedTensor2, state: &PlateState, g: &Forcing2, dt: f64) -> Result<PlateState> {
    let mut next = state.clone();
    PlateSolver::new(*grid, *l2, Regime::Linear).step(&mut next, g, dt)?;
    Ok(next)
}

/// Total energy for the model and state.
pub fn plate_energy(solver: &PlateSolver, state: &PlateState, g: &Forcing2) -> PlateEnergy {
    solver.energy(state, g)
}
