//! Space-time weak residuals of the plate equations.
//!
//! For a test `phi(t, x)` compactly supported in `(0, T) x Omega'` the
//! transverse equation reads
//! `int int -p phi_t + (1/12) L2 D^2 v : D^2 phi + L2(eps) Dv . D phi - g phi = 0`,
//! and the membrane equation `int int L2(eps) : sym D psi = 0` for `psi = phi e_a`.
//! Space integrals reuse the solver's own discrete forms; time integrals use
//! the trapezoid rule over the stored samples.

use super::grid::Grid2;
use super::stepper::{PlateSolver, PlateState, Regime};
use crate::forcing::Forcing2;

/// States sampled at `t0 + k dt`.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<PlateState>,
}

impl Trajectory {
    pub fn new(dt: f64) -> Self {
        Self { dt, states: Vec::new() }
    }

    pub fn push(&mut self, s: &PlateState) {
        self.states.push(s.clone());
    }
}

/// `(1 - r^2)^4` on `|r| < 1`, centred at `center` with half-width `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
}

impl Bump {
    pub fn value(&self, s: f64) -> f64 {
        let r = (s - self.center) / self.radius;
        if r.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - r * r).powi(4)
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let r = (s - self.center) / self.radius;
        if r.abs() >= 1.0 {
            0.0
        } else {
            -8.0 * r * (1.0 - r * r).powi(3) / self.radius
        }
    }
}

/// Tensor-product tests `b_t(t) b_1(x1) b_2(x2)`.
#[derive(Debug, Clone, Default)]
pub struct BumpFamily {
    pub time: Vec<Bump>,
    pub x1: Vec<Bump>,
    pub x2: Vec<Bump>,
}

impl BumpFamily {
    /// Three overlapping bumps per direction, each strictly inside `(0, t_end)` and the plate.
    pub fn standard(t_end: f64, half_width: f64) -> Self {
        let time = [0.3, 0.5, 0.7].iter().map(|c| Bump { center: c * t_end, radius: 0.25 * t_end }).collect();
        let space: Vec<Bump> = [-0.45, 0.0, 0.45]
            .iter()
            .map(|c| Bump { center: c * half_width, radius: 0.5 * half_width })
            .collect();
        Self { time, x1: space.clone(), x2: space }
    }

    pub fn len(&self) -> usize {
        self.time.len() * self.x1.len() * self.x2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Largest absolute residual of each equation over a test family.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeakResidual {
    pub transverse: f64,
    pub membrane: f64,
}

impl WeakResidual {
    pub fn max(&self) -> f64 {
        self.transverse.max(self.membrane)
    }
}

fn spatial_profile(grid: &Grid2, b1: &Bump, b2: &Bump) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            out[grid.index(i, j)] = b1.value(grid.x1(i)) * b2.value(grid.x2(j));
        }
    }
    out
}

/// Weak residual of the solver's model on a stored trajectory.
pub fn weak_residual_vk(solver: &PlateSolver, traj: &Trajectory, g: &Forcing2, family: &BumpFamily) -> WeakResidual {
    let grid = *solver.grid();
    let n = grid.len();
    let area = grid.dx1() * grid.dx2();
    let m = traj.states.len();
    if m < 2 || family.is_empty() {
        return WeakResidual::default();
    }
    let t0 = traj.states[0].t;
    let time_weight = |k: usize| if k == 0 || k == m - 1 { 0.5 * traj.dt } else { traj.dt };

    // Nodal densities per sample: the spatial operator `K v - f_m - g` and the membrane residual.
    let mut operator = Vec::with_capacity(m);
    let mut membrane = Vec::with_capacity(m);
    let mut kv = vec![0.0; n];
    let mut fm = vec![0.0; n];
    for (k, s) in traj.states.iter().enumerate() {
        let t = t0 + k as f64 * traj.dt;
        solver.bending().apply(&s.v, &mut kv);
        let load = g.sample(t, &grid);
        let coupled = solver.regime() == Regime::VonKarman;
        if coupled {
            solver.membrane().transverse_force(&s.u1, &s.u2, &s.v, &mut fm);
            membrane.push(solver.membrane().residual_vector(&s.u1, &s.u2, &s.v));
        } else {
            membrane.push(vec![0.0; 2 * n]);
        }
        let row: Vec<f64> = (0..n)
            .map(|q| {
                let free = grid.is_free(q % grid.n1, q / grid.n1);
                let f = if coupled { fm[q] } else { 0.0 };
                if free { area * (kv[q] - f - load[q]) } else { 0.0 }
            })
            .collect();
        operator.push(row);
    }

    let mut worst = WeakResidual::default();
    for b1 in &family.x1 {
        for b2 in &family.x2 {
            let phi = spatial_profile(&grid, b1, b2);
            // per-sample spatial pairings
            let pair = |f: &[f64]| f.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>();
            let kinetic: Vec<f64> = traj
                .states
                .iter()
                .map(|s| {
                    s.p.iter()
                        .zip(&phi)
                        .enumerate()
                        .map(|(q, (p, f))| if grid.is_free(q % grid.n1, q / grid.n1) { area * p * f } else { 0.0 })
                        .sum()
                })
                .collect();
            let ops: Vec<f64> = operator.iter().map(|r| pair(r)).collect();
            let mem: Vec<[f64; 2]> = membrane.iter().map(|r| [pair(&r[..n]), pair(&r[n..])]).collect();
            for bt in &family.time {
                let mut rv = 0.0;
                let mut rm = [0.0; 2];
                for k in 0..m {
                    let t = t0 + k as f64 * traj.dt;
                    let w = time_weight(k);
                    rv += w * (-kinetic[k] * bt.derivative(t) + ops[k] * bt.value(t));
                    rm[0] += w * mem[k][0] * bt.value(t);
                    rm[1] += w * mem[k][1] * bt.value(t);
                }
                worst.transverse = worst.transverse.max(rv.abs());
                worst.membrane = worst.membrane.max(rm[0].abs()).max(rm[1].abs());
            }
        }
    }
    worst
}
