use std::thread;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::fit::{endpoint_ratio, fit_slope};
use crate::elasto3d::{
    averages, bending_moment_error, build_initial_data, cell_gradient, kirchhoff_gradient, membrane_moment_error,
    rigidity_diagnostics, run_slab, slab_energy, stress_moments, Grid3, InitialDataSpec, LimitFields, SlabRunOptions,
    DEFAULT_C_SAFE,
};
use crate::error::{Error, Result};
use crate::forcing::Forcing2;
use crate::material::MaterialModel;
use crate::plate2d::{choose_step, Grid2, PlateSolver, PlateState, Regime};
use crate::reduction::reduce;

fn default_samples() -> usize {
    50
}

fn default_c_safe() -> f64 {
    DEFAULT_C_SAFE
}

fn default_dt2() -> f64 {
    1e-3
}

fn default_true() -> bool {
    true
}

/// Acceptance-rule constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Fitted slopes must reach the predicted exponent minus this margin.
    pub slope_margin: f64,
    /// Required factor between the first and last ladder entry of decreasing metrics.
    pub decrease_factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { slope_margin: 0.5, decrease_factor: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderGrid {
    pub half_width: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

/// An `h`-ladder experiment: one plate reference run and one slab run per `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub h: Vec<f64>,
    pub alpha: f64,
    pub material: MaterialModel,
    #[serde(default)]
    pub initial: InitialDataSpec,
    #[serde(default)]
    pub forcing: Forcing2,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub grid: LadderGrid,
    /// Plate reference time step (capped by the plate stability bound).
    #[serde(default = "default_dt2")]
    pub dt2: f64,
    /// Slab time step; the stability cap is used when absent.
    #[serde(default)]
    pub dt3: Option<f64>,
    #[serde(default = "default_c_safe")]
    pub c_safe: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Estimate the plate discretization floor with a run on a twice finer grid.
    #[serde(default = "default_true")]
    pub floor_estimate: bool,
    /// Run ladder entries on separate threads.
    #[serde(default = "default_true")]
    pub parallel: bool,
}

impl LadderConfig {
    pub fn regime(&self) -> Regime {
        if self.alpha == 3.0 {
            Regime::VonKarman
        } else {
            Regime::Linear
        }
    }

    pub fn grid3(&self) -> Result<Grid3> {
        Grid3::new(self.grid.half_width, self.grid.n1, self.grid.n2, self.grid.n3)
    }

    /// Range violations as `(path, message)` pairs relative to the ladder section.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if self.h.len() < 3 {
            out.push(("h".to_string(), format!("needs at least 3 entries (got {})", self.h.len())));
        }
        for (i, h) in self.h.iter().enumerate() {
            if !(*h > 0.0) {
                out.push((format!("h[{i}]"), "must be > 0".into()));
            } else if *h >= 0.5 {
                out.push((format!("h[{i}]"), "must be < 0.5".into()));
            }
            if i > 0 && !(self.h[i] < self.h[i - 1]) {
                out.push((format!("h[{i}]"), "must be strictly decreasing".into()));
            }
        }
        if !(self.alpha >= 3.0 && self.alpha.is_finite()) {
            out.push(("alpha".into(), format!("must be >= 3 (got {})", self.alpha)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            out.push(("T".into(), "must be > 0".into()));
        }
        if !(self.dt2 > 0.0) {
            out.push(("dt2".into(), "must be > 0".into()));
        }
        if let Some(dt) = self.dt3 {
            if !(dt > 0.0) {
                out.push(("dt3".into(), "must be > 0".into()));
            }
        }
        if !(self.c_safe > 0.0 && self.c_safe <= 1.0) {
            out.push(("c_safe".into(), "must lie in (0, 1]".into()));
        }
        if self.samples == 0 {
            out.push(("samples".into(), "must be >= 1".into()));
        }
        if !(self.thresholds.decrease_factor > 0.0) {
            out.push(("thresholds.decrease_factor".into(), "must be > 0".into()));
        }
        for (f, m) in self.material.violations() {
            out.push((format!("material.{f}"), m));
        }
        if let Ok(g) = self.grid3() {
            let lateral = g.lateral();
            if let Err(e) = self.initial.check(&lateral) {
                out.push(("initial".into(), e.to_string()));
            }
            if let Err(e) = self.forcing.check(&lateral) {
                out.push(("forcing".into(), e.to_string()));
            }
        } else {
            let g = Grid3 { half_width: self.grid.half_width, n1: self.grid.n1, n2: self.grid.n2, n3: self.grid.n3 };
            for m in g.violations() {
                out.push(("grid".into(), m));
            }
        }
        out
    }
}

/// Metrics of one ladder entry. Optional fields are absent when they do not
/// apply to the regime or the sub-run failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HRecord {
    pub h: f64,
    pub status: String,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    /// Initial total energy divided by `h^(2 alpha - 2)`.
    pub energy_ratio: Option<f64>,
    pub sup_elastic: Option<f64>,
    /// `sup_t 1/2 h^2 int |w|^2`.
    pub sup_kinetic: Option<f64>,
    /// `sup_t int |w|^2`.
    pub sup_velocity_sq: Option<f64>,
    pub sup_v_error: Option<f64>,
    /// `sup_t ||u_h - u||` (von Karman regime).
    pub sup_u_error: Option<f64>,
    /// `sup_t ||u_h||` (linear regime).
    pub sup_u_norm: Option<f64>,
    pub sup_grad_dev: Option<f64>,
    pub sup_sym_ratio: Option<f64>,
    pub sup_e3_norm: Option<f64>,
    /// Initial-state `||E_bar'' - L2(sym Du0 + Dv0 (x) Dv0 / 2)||` (von Karman regime).
    pub membrane_moment_error: Option<f64>,
    /// Initial-state `||E_hat'' + L2(D^2 v0) / 12||` (von Karman regime).
    pub bending_moment_error: Option<f64>,
}

impl HRecord {
    fn failed(h: f64, reason: String) -> Self {
        Self {
            h,
            status: format!("failed: {reason}"),
            steps: None,
            dt: None,
            energy_ratio: None,
            sup_elastic: None,
            sup_kinetic: None,
            sup_velocity_sq: None,
            sup_v_error: None,
            sup_u_error: None,
            sup_u_norm: None,
            sup_grad_dev: None,
            sup_sym_ratio: None,
            sup_e3_norm: None,
            membrane_moment_error: None,
            bending_moment_error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slopes {
    pub elastic: Option<f64>,
    pub kinetic: Option<f64>,
    pub velocity_sq: Option<f64>,
    pub v_error: Option<f64>,
    pub grad_dev: Option<f64>,
}

/// Plate discretization error: the reference against a twice finer grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloorEstimate {
    pub v: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialLimit {
    pub h: f64,
    pub v_deviation_h1: f64,
    pub vhat_deviation_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceInfo {
    pub regime: Regime,
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub alpha: f64,
    pub material: MaterialModel,
    pub reference: ReferenceInfo,
    pub records: Vec<HRecord>,
    pub slopes: Slopes,
    pub floor: Option<FloorEstimate>,
    pub initial_limits: Vec<InitialLimit>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Plate reference states at the common sample times.
struct Reference {
    info: ReferenceInfo,
    states: Vec<PlateState>,
}

fn plate_reference(cfg: &LadderConfig, fields: &LimitFields, grid: Grid2) -> Result<Reference> {
    let l2 = reduce(&cfg.material.tangent_at_identity())?;
    let solver = PlateSolver::new(grid, l2, cfg.regime());
    let interval = cfg.t_end / cfg.samples as f64;
    let per = choose_step(cfg.dt2, solver.dt_cap(), interval)?;
    if per.capped {
        warn!("plate dt {} capped to {}", cfg.dt2, per.used);
    }
    let mut s = solver.initial_state(&fields.v0, &fields.vhat0)?;
    let mut states = vec![s.clone()];
    for n in 1..=cfg.samples {
        for _ in 0..per.steps {
            solver.step(&mut s, &cfg.forcing, per.used)?;
        }
        s.t = n as f64 * interval;
        states.push(s.clone());
    }
    Ok(Reference {
        info: ReferenceInfo { regime: cfg.regime(), dt: per.used, steps: per.steps * cfg.samples },
        states,
    })
}

fn l2_diff(grid: &Grid2, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    grid.l2_norm(&d)
}

fn mean_free(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - m).collect()
}

fn run_entry(cfg: &LadderConfig, h: f64, fields: &LimitFields, reference: &Reference) -> Result<HRecord> {
    let grid = cfg.grid3()?;
    let lateral = grid.lateral();
    let model = cfg.material;
    let mut state = crate::elasto3d::from_limit_fields(fields, h, cfg.alpha, grid)?;
    if cfg.initial.relax_transverse {
        crate::elasto3d::state::relax_transverse_strain(&mut state, fields, &model.tangent_at_identity())?;
    }
    let e0 = slab_energy(&state, &model, 0.0)?.total();
    let coupled = cfg.regime() == Regime::VonKarman;

    let (mut mm, mut bm) = (None, None);
    if coupled {
        let rig = rigidity_diagnostics(&state)?;
        let mom = stress_moments(&state, &rig, &model)?;
        mm = Some(membrane_moment_error(&mom, &grid, &model, &fields.u1, &fields.u2, &fields.v0)?);
        let (t1, t2) = kirchhoff_gradient(&lateral, &fields.v0);
        bm = Some(bending_moment_error(&mom, &grid, &model, &t1, &t2)?);
    }

    let opts = SlabRunOptions {
        dt: cfg.dt3.unwrap_or(f64::INFINITY),
        t_end: cfg.t_end,
        c_safe: cfg.c_safe,
        samples: cfg.samples,
        ..Default::default()
    };
    let mut index = 0usize;
    let (mut v_err, mut u_metric, mut sym, mut e3) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let run = run_slab(&state, &model, &cfg.forcing, &opts, |s, _| {
        let av = averages(s);
        let r = &reference.states[index];
        v_err = v_err.max(l2_diff(&lateral, &av.v, &r.v));
        u_metric = u_metric.max(if coupled {
            let e1 = l2_diff(&lateral, &mean_free(&av.u1), &r.u1);
            let e2 = l2_diff(&lateral, &mean_free(&av.u2), &r.u2);
            e1.hypot(e2)
        } else {
            lateral.l2_norm(&av.u1).hypot(lateral.l2_norm(&av.u2))
        });
        let rig = rigidity_diagnostics(s)?;
        sym = sym.max(rig.sym_ratio);
        e3 = e3.max(stress_moments(s, &rig, &model)?.e3_norm);
        index += 1;
        Ok(())
    })?;
    let sup = |f: &dyn Fn(&crate::elasto3d::SlabSample) -> f64| run.samples.iter().map(f).fold(0.0f64, f64::max);
    let sup_kinetic = sup(&|s| s.kinetic);
    Ok(HRecord {
        h,
        status: "ok".into(),
        steps: Some(run.step.steps),
        dt: Some(run.step.used),
        energy_ratio: Some(e0 / h.powf(2.0 * cfg.alpha - 2.0)),
        sup_elastic: Some(sup(&|s| s.elastic)),
        sup_kinetic: Some(sup_kinetic),
        sup_velocity_sq: Some(2.0 * sup_kinetic / (h * h)),
        sup_v_error: Some(v_err),
        sup_u_error: coupled.then_some(u_metric),
        sup_u_norm: (!coupled).then_some(u_metric),
        sup_grad_dev: Some(sup(&|s| s.grad_dev)),
        sup_sym_ratio: Some(sym),
        sup_e3_norm: Some(e3),
        membrane_moment_error: mm,
        bending_moment_error: bm,
    })
}

/// Deviation of the initial thickness averages from the limit data.
pub fn check_initial_limits(cfg: &LadderConfig) -> Result<Vec<InitialLimit>> {
    let grid = cfg.grid3()?;
    let lateral = grid.lateral();
    let fields = cfg.initial.sample(&lateral, &cfg.material)?;
    cfg.h
        .iter()
        .map(|&h| {
            let s = build_initial_data(&cfg.initial, h, cfg.alpha, grid, &cfg.material)?;
            let av = averages(&s);
            let (v_dev, vhat_dev) = initial_deviation(&lateral, &av.v, &av.dv, &fields);
            Ok(InitialLimit { h, v_deviation_h1: v_dev, vhat_deviation_l2: vhat_dev })
        })
        .collect()
}

/// Discrete `H^1` deviation of `v` and `L^2` deviation of `dv` from the limit data.
pub fn initial_deviation(lateral: &Grid2, v: &[f64], dv: &[f64], fields: &LimitFields) -> (f64, f64) {
    let diff: Vec<f64> = v.iter().zip(&fields.v0).map(|(a, b)| a - b).collect();
    let area = lateral.dx1() * lateral.dx2();
    let grad2: f64 = cell_gradient(lateral, &diff).iter().map(|g| area * (g[0] * g[0] + g[1] * g[1])).sum();
    let v_dev = (lateral.l2_norm(&diff).powi(2) + grad2).sqrt();
    (v_dev, l2_diff(lateral, dv, &fields.vhat0))
}

fn floor_estimate(cfg: &LadderConfig, coarse: &Reference) -> Result<FloorEstimate> {
    let g = cfg.grid3()?.lateral();
    let fine = Grid2::periodic(g.half_width, 2 * g.n1, 2 * g.n2)?;
    let fields = cfg.initial.sample(&fine, &cfg.material)?;
    let refined = plate_reference(cfg, &fields, fine)?;
    let restrict = |f: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; g.len()];
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                out[g.index(i, j)] = f[fine.index(2 * i, 2 * j)];
            }
        }
        out
    };
    let mut floor = FloorEstimate { v: 0.0, u: 0.0 };
    for (c, f) in coarse.states.iter().zip(&refined.states) {
        floor.v = floor.v.max(l2_diff(&g, &c.v, &restrict(&f.v)));
        let du = l2_diff(&g, &c.u1, &restrict(&f.u1)).hypot(l2_diff(&g, &c.u2, &restrict(&f.u2)));
        floor.u = floor.u.max(du);
    }
    Ok(floor)
}

fn decrease_check(name: &str, values: Vec<Option<f64>>, factor: f64) -> Check {
    let value = endpoint_ratio(&values);
    Check { name: name.into(), value, threshold: factor, passed: value.is_some_and(|v| v >= factor) }
}

fn slope_check(name: &str, slope: Option<f64>, exponent: f64, margin: f64) -> Check {
    let threshold = exponent - margin;
    Check { name: name.into(), value: slope, threshold, passed: slope.is_some_and(|s| s >= threshold) }
}

/// Runs the plate reference and every slab entry, then fits and checks.
pub fn run_ladder(cfg: &LadderConfig) -> Result<ConvergenceReport> {
    let problems = cfg.violations();
    if !problems.is_empty() {
        return Err(Error::Config(problems.into_iter().map(|(p, m)| format!("ladder.{p} {m}")).collect()));
    }
    let grid = cfg.grid3()?;
    let lateral = grid.lateral();
    let fields = cfg.initial.sample(&lateral, &cfg.material)?;
    info!("plate reference ({:?})", cfg.regime());
    let reference = plate_reference(cfg, &fields, lateral)?;
    let mut notes = Vec::new();

    let entry = |h: f64| -> HRecord {
        info!("slab run h = {h}");
        run_entry(cfg, h, &fields, &reference).unwrap_or_else(|e| HRecord::failed(h, e.to_string()))
    };
    let records: Vec<HRecord> = if cfg.parallel {
        thread::scope(|scope| {
            let handles: Vec<_> = cfg.h.iter().map(|&h| scope.spawn(move || entry(h))).collect();
            handles
                .into_iter()
                .zip(&cfg.h)
                .map(|(j, &h)| j.join().unwrap_or_else(|_| HRecord::failed(h, "worker panicked".into())))
                .collect()
        })
    } else {
        cfg.h.iter().map(|&h| entry(h)).collect()
    };
    for r in records.iter().filter(|r| r.status != "ok") {
        notes.push(format!("h = {}: {}", r.h, r.status));
    }

    let mut fit = |label: &str, pick: &dyn Fn(&HRecord) -> Option<f64>| -> Option<f64> {
        let pts: Vec<(f64, f64)> = records.iter().filter_map(|r| pick(r).map(|v| (r.h, v))).collect();
        match fit_slope(&pts) {
            Ok(f) => {
                if !f.excluded.is_empty() {
                    notes.push(format!("{label} slope: excluded non-positive values at h = {:?}", f.excluded));
                }
                Some(f.slope)
            }
            Err(e) => {
                notes.push(format!("{label} slope not fitted: {e}"));
                None
            }
        }
    };
    let slopes = Slopes {
        elastic: fit("elastic", &|r| r.sup_elastic),
        kinetic: fit("kinetic", &|r| r.sup_kinetic),
        velocity_sq: fit("velocity_sq", &|r| r.sup_velocity_sq),
        v_error: fit("v_error", &|r| r.sup_v_error),
        grad_dev: fit("grad_dev", &|r| r.sup_grad_dev),
    };

    let floor = if cfg.floor_estimate {
        match floor_estimate(cfg, &reference) {
            Ok(f) => Some(f),
            Err(e) => {
                notes.push(format!("floor estimate failed: {e}"));
                None
            }
        }
    } else {
        None
    };

    let t = &cfg.thresholds;
    let col = |pick: &dyn Fn(&HRecord) -> Option<f64>| records.iter().map(pick).collect::<Vec<_>>();
    let mut checks = vec![
        slope_check("elastic_slope", slopes.elastic, 2.0 * cfg.alpha - 2.0, t.slope_margin),
        slope_check("velocity_sq_slope", slopes.velocity_sq, 2.0 * cfg.alpha - 4.0, t.slope_margin),
        decrease_check("v_error_decrease", col(&|r| r.sup_v_error), t.decrease_factor),
        decrease_check("grad_dev_decrease", col(&|r| r.sup_grad_dev), t.decrease_factor),
        decrease_check("e3_norm_decrease", col(&|r| r.sup_e3_norm), t.decrease_factor),
        decrease_check("sym_ratio_decrease", col(&|r| r.sup_sym_ratio), t.decrease_factor),
    ];
    if cfg.regime() == Regime::Linear {
        checks.push(decrease_check("u_norm_decrease", col(&|r| r.sup_u_norm), t.decrease_factor));
    } else {
        checks.push(decrease_check("membrane_moment_decrease", col(&|r| r.membrane_moment_error), t.decrease_factor));
    }

    Ok(ConvergenceReport {
        alpha: cfg.alpha,
        material: cfg.material,
        reference: reference.info,
        records,
        slopes,
        floor,
        initial_limits: check_initial_limits(cfg)?,
        checks,
        notes,
    })
}
