use std::io::Write;

use log::warn;
use serde::Serialize;

use super::grid::Grid3;
use super::mechanics::{elastic_energy, internal_force};
use super::state::{SlabState, Vec3};
use crate::error::{Error, Result};
use crate::forcing::Forcing2;
use crate::material::MaterialModel;
use crate::plate2d::{choose_step, StepChoice};

/// Energies of a slab state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SlabEnergy {
    /// `1/2 h^2 int |w|^2`.
    pub kinetic: f64,
    /// `int W(grad_h y)`.
    pub elastic: f64,
    pub cumulative_work: f64,
}

impl SlabEnergy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.elastic
    }
}

/// `1/2 int |w|^2` with lumped nodal volumes.
pub fn velocity_norm_squared(s: &SlabState) -> f64 {
    let g = &s.grid;
    let mut sum = 0.0;
    for k in 0..g.n3 {
        let m = g.node_volume(k);
        for q in 0..g.lateral_len() {
            sum += m * s.w[q + k * g.lateral_len()].norm_squared();
        }
    }
    0.5 * sum
}

pub fn slab_energy(s: &SlabState, model: &MaterialModel, cumulative_work: f64) -> Result<SlabEnergy> {
    Ok(SlabEnergy {
        kinetic: s.h * s.h * velocity_norm_squared(s),
        elastic: elastic_energy(s, model)?,
        cumulative_work,
    })
}

/// Stable step for velocity Verlet:
/// `c_safe * min(h^2 dx3, h dx1, h dx2) / sqrt(q_max)`.
///
/// The thickness term comes from the `h^-2` inertia combined with the
/// `(h dx3)^-2` stiffness of the scaled gradient; the lateral terms carry
/// only one factor of `h`.
pub fn stable_dt(grid: &Grid3, h: f64, model: &MaterialModel, c_safe: f64) -> f64 {
    let q_max = model.tangent_at_identity().max_eigenvalue();
    let limit = (h * h * grid.dx3()).min(h * grid.dx1()).min(h * grid.dx2());
    c_safe * limit / q_max.sqrt()
}

pub const DEFAULT_C_SAFE: f64 = 0.25;

/// Velocity-Verlet integrator of `h^2 m y'' = f_int + h^alpha g m e3`.
#[derive(Debug, Clone)]
pub struct SlabIntegrator {
    pub model: MaterialModel,
    pub forcing: Forcing2,
    force: Vec<Vec3>,
    load: Vec<f64>,
    fresh: bool,
}

impl SlabIntegrator {
    pub fn new(model: MaterialModel, forcing: Forcing2) -> Self {
        Self { model, forcing, force: Vec::new(), load: Vec::new(), fresh: false }
    }

    fn update_force(&mut self, s: &SlabState) -> Result<()> {
        self.force.resize(s.grid.len(), Vec3::zeros());
        internal_force(s, &self.model, &mut self.force)?;
        self.fresh = true;
        Ok(())
    }

    fn accelerate(&mut self, s: &mut SlabState, t: f64, half_dt: f64) {
        let g = s.grid;
        let lateral = g.lateral();
        self.load.resize(g.lateral_len(), 0.0);
        self.forcing.sample_into(t, &lateral, &mut self.load);
        let inv_h2 = 1.0 / (s.h * s.h);
        let body = s.h.powf(s.alpha - 2.0);
        for k in 0..g.n3 {
            let m = g.node_volume(k);
            for q in 0..g.lateral_len() {
                let node = q + k * g.lateral_len();
                let mut a = self.force[node] * (inv_h2 / m);
                a[2] += body * self.load[q];
                s.w[node] += a * half_dt;
            }
        }
    }

    /// One step; returns the work `dt h^alpha int g w3` at the half step.
    pub fn step(&mut self, s: &mut SlabState, dt: f64) -> Result<f64> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be > 0 (got {dt})")));
        }
        if !self.fresh {
            self.update_force(s)?;
        }
        let t0 = s.t;
        self.accelerate(s, t0, 0.5 * dt);
        for (d, w) in s.d.iter_mut().zip(&s.w) {
            *d += w * dt;
        }
        let work = dt * self.load_power(s, t0 + 0.5 * dt);
        s.t = t0 + dt;
        if !s.is_finite() {
            return Err(Error::BlowUp { time: s.t, reason: "non-finite slab field".into() });
        }
        self.update_force(s)?;
        self.accelerate(s, s.t, 0.5 * dt);
        Ok(work)
    }

    fn load_power(&mut self, s: &SlabState, t: f64) -> f64 {
        if self.forcing.is_zero() {
            return 0.0;
        }
        let g = s.grid;
        self.forcing.sample_into(t, &g.lateral(), &mut self.load);
        let scale = s.h.powf(s.alpha);
        let mut p = 0.0;
        for k in 0..g.n3 {
            let m = g.node_volume(k);
            for q in 0..g.lateral_len() {
                p += m * self.load[q] * s.w[q + k * g.lateral_len()][2];
            }
        }
        scale * p
    }
}

/// One velocity-Verlet step on a copy of `state`.
pub fn slab_step(state: &SlabState, model: &MaterialModel, g: &Forcing2, dt: f64) -> Result<SlabState> {
    let mut next = state.clone();
    SlabIntegrator::new(*model, g.clone()).step(&mut next, dt)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabSample {
    pub t: f64,
    pub kinetic: f64,
    pub elastic: f64,
    pub work: f64,
    /// `||grad_h y - Id||_{L2}` over the slab.
    pub grad_dev: f64,
}

#[derive(Debug, Clone)]
pub struct SlabRunOptions {
    pub dt: f64,
    pub t_end: f64,
    pub c_safe: f64,
    /// Number of equal output intervals; samples fall exactly on `k t_end / samples`.
    pub samples: usize,
    pub blow_up_factor: f64,
}

impl Default for SlabRunOptions {
    fn default() -> Self {
        Self { dt: f64::INFINITY, t_end: 1.0, c_safe: DEFAULT_C_SAFE, samples: 50, blow_up_factor: 1e3 }
    }
}

/// `||grad_h y - Id||_{L2}` with the quadrature of the energy.
pub fn gradient_deviation(s: &SlabState) -> f64 {
    let half = 0.5 * s.grid.cell_volume();
    let sum: f64 = super::mechanics::cell_gradients(s)
        .iter()
        .flatten()
        .map(|f| (f - crate::tensor::Mat3::identity()).norm_squared())
        .sum();
    (half * sum).sqrt()
}

#[derive(Debug, Clone)]
pub struct SlabRun {
    pub step: StepChoice,
    pub samples: Vec<SlabSample>,
    pub states: Vec<SlabState>,
    pub final_state: SlabState,
}

/// Runs to `t_end`, calling `observe` with every sampled state.
pub fn run_slab<F>(initial: &SlabState, model: &MaterialModel, forcing: &Forcing2, opts: &SlabRunOptions, mut observe: F) -> Result<SlabRun>
where
    F: FnMut(&SlabState, &SlabSample) -> Result<()>,
{
    let samples_n = opts.samples.max(1);
    let cap = stable_dt(&initial.grid, initial.h, model, opts.c_safe);
    let interval = opts.t_end / samples_n as f64;
    let per = choose_step(opts.dt.min(f64::MAX), cap, interval)?;
    if opts.dt.is_finite() && per.capped {
        warn!("dt {} exceeds the slab stability cap; using {}", opts.dt, per.used);
    }
    let step = StepChoice { requested: opts.dt, used: per.used, steps: per.steps * samples_n, capped: per.capped };

    let mut integ = SlabIntegrator::new(*model, forcing.clone());
    let mut s = initial.clone();
    let mut work = 0.0;
    let sample = |s: &SlabState, work: f64| -> Result<SlabSample> {
        let e = slab_energy(s, model, work)?;
        Ok(SlabSample { t: s.t, kinetic: e.kinetic, elastic: e.elastic, work, grad_dev: gradient_deviation(s) })
    };
    let first = sample(&s, 0.0)?;
    let e0 = first.kinetic + first.elastic;
    observe(&s, &first)?;
    let mut samples = vec![first];
    let mut states = vec![s.clone()];
    for n in 1..=samples_n {
        for _ in 0..per.steps {
            work += integ.step(&mut s, per.used)?;
        }
        s.t = n as f64 * interval;
        let rec = sample(&s, work)?;
        let total = rec.kinetic + rec.elastic;
        if total > opts.blow_up_factor * (e0 + work.abs()) + 1e-200 {
            return Err(Error::BlowUp { time: s.t, reason: format!("energy {total:e} exceeds {}x the initial budget", opts.blow_up_factor) });
        }
        observe(&s, &rec)?;
        samples.push(rec);
        states.push(s.clone());
    }
    Ok(SlabRun { step, samples, states, final_state: s })
}

pub fn write_series<W: Write>(mut out: W, samples: &[SlabSample]) -> Result<()> {
    writeln!(out, "t,kinetic,elastic,work,grad_dev_L2")?;
    for s in samples {
        writeln!(out, "{:e},{:e},{:e},{:e},{:e}", s.t, s.kinetic, s.elastic, s.work, s.grad_dev)?;
    }
    Ok(())
}
