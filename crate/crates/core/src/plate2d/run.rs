//! Whole-trajectory plate runs with a sampled energy series.

use std::io::Write;

use log::warn;
use serde::Serialize;

use super::stepper::{PlateSolver, PlateState};
use crate::error::{Error, Result};
use crate::forcing::Forcing2;

/// A known exact deflection `cos(omega t) shape(x)`, reported as an error column.
#[derive(Debug, Clone)]
pub struct ExactMode {
    pub shape: Vec<f64>,
    pub omega: f64,
}

/// Time step actually used for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepChoice {
    pub requested: f64,
    pub used: f64,
    pub steps: usize,
    pub capped: bool,
}

/// Chooses `steps` so that `steps * dt = t_end` with `dt <= min(requested, cap)`.
pub fn choose_step(requested: f64, cap: f64, t_end: f64) -> Result<StepChoice> {
    if !(requested > 0.0 && requested.is_finite()) {
        return Err(Error::Domain(format!("dt must be > 0 (got {requested})")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("T must be > 0 (got {t_end})")));
    }
    let capped = requested > cap;
    let target = requested.min(cap);
    let steps = (t_end / target * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok(StepChoice { requested, used: t_end / steps as f64, steps, capped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlateSample {
    pub t: f64,
    pub kinetic: f64,
    pub membrane: f64,
    pub bending: f64,
    pub work_integral: f64,
    #[serde(rename = "L2_norm_v")]
    pub l2_norm_v: f64,
    pub sup_norm_v: f64,
    /// Largest membrane residual over the steps since the previous sample.
    pub membrane_residual: f64,
    pub error_l2: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PlateRun {
    pub step: StepChoice,
    pub samples: Vec<PlateSample>,
    pub final_state: PlateState,
    /// States at every sample time, kept when requested.
    pub trajectory: Vec<PlateState>,
}

#[derive(Debug, Clone)]
pub struct PlateRunOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Record a sample every this many steps (the final step is always recorded).
    pub sample_every: usize,
    pub keep_states: bool,
    pub exact: Option<ExactMode>,
}

impl PlateSolver {
    fn sample(&self, s: &PlateState, forcing: &Forcing2, work: f64, residual: f64, exact: Option<&ExactMode>) -> PlateSample {
        let e = self.energy(s, forcing);
        let grid = self.grid();
        let error_l2 = exact.map(|m| {
            let c = (m.omega * s.t).cos();
            let diff: Vec<f64> = s.v.iter().zip(&m.shape).map(|(v, e)| v - c * e).collect();
            grid.l2_norm(&diff)
        });
        PlateSample {
            t: s.t,
            kinetic: e.kinetic,
            membrane: e.membrane,
            bending: e.bending,
            work_integral: work,
            l2_norm_v: grid.l2_norm(&s.v),
            sup_norm_v: s.v.iter().fold(0.0, |m, x| m.max(x.abs())),
            membrane_residual: residual,
            error_l2,
        }
    }

    /// Integrates from `initial` to `opts.t_end`.
    pub fn run(&self, initial: &PlateState, forcing: &Forcing2, opts: &PlateRunOptions) -> Result<PlateRun> {
        let step = choose_step(opts.dt, self.dt_cap(), opts.t_end)?;
        if step.capped {
            warn!("dt {} exceeds the stability cap; using {}", step.requested, step.used);
        }
        let every = opts.sample_every.max(1);
        let mut s = initial.clone();
        let mut work = 0.0;
        let mut residual = 0.0f64;
        let mut samples = vec![self.sample(&s, forcing, 0.0, 0.0, opts.exact.as_ref())];
        let mut trajectory = Vec::new();
        if opts.keep_states {
            trajectory.push(s.clone());
        }
        for k in 1..=step.steps {
            let report = self.step(&mut s, forcing, step.used)?;
            s.t = initial.t + k as f64 * step.used;
            work += report.work;
            residual = residual.max(report.membrane_residual);
            if k % every == 0 || k == step.steps {
                samples.push(self.sample(&s, forcing, work, residual, opts.exact.as_ref()));
                residual = 0.0;
                if opts.keep_states {
                    trajectory.push(s.clone());
                }
            }
        }
        Ok(PlateRun { step, samples, final_state: s, trajectory })
    }
}

/// Writes `t, kinetic, membrane, bending, work_integral, L2_norm_v, sup_norm_v`
/// and, when present, `error_L2`.
pub fn write_series<W: Write>(mut out: W, samples: &[PlateSample]) -> Result<()> {
    let with_error = samples.first().is_some_and(|s| s.error_l2.is_some());
    write!(out, "t,kinetic,membrane,bending,work_integral,L2_norm_v,sup_norm_v")?;
    if with_error {
        write!(out, ",error_L2")?;
    }
    writeln!(out)?;
    for s in samples {
        write!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            s.t, s.kinetic, s.membrane, s.bending, s.work_integral, s.l2_norm_v, s.sup_norm_v
        )?;
        if let Some(e) = s.error_l2 {
            write!(out, ",{e:e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_choice_aligns_with_final_time() {
        let c = choose_step(0.3, 1.0, 1.0).unwrap();
        assert_eq!(c.steps, 4);
        assert!((c.used * 4.0 - 1.0).abs() < 1e-15);
        assert!(!c.capped);
        let c = choose_step(0.1, 0.01, 1.0).unwrap();
        assert!(c.capped && c.steps == 100);
        let c = choose_step(1e-3, 1.0, 1.0).unwrap();
        assert_eq!(c.steps, 1000);
        assert!(choose_step(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn series_header() {
        let mut buf = Vec::new();
        write_series(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,kinetic,membrane,bending,work_integral,L2_norm_v,sup_norm_v\n");
    }
}
