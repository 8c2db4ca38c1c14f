//! JSON run configuration shared by the subcommands.
//!
//! Parsing rejects unknown keys and reports the JSON path of the first
//! structural error; range validation then collects every violation.

use serde::{Deserialize, Serialize};

use crate::elasto3d::{Grid3, InitialDataSpec, DEFAULT_C_SAFE};
use crate::error::{Error, Result};
use crate::fields::FieldExpr;
use crate::forcing::Forcing2;
use crate::harness::{LadderConfig, LadderGrid, Thresholds};
use crate::material::MaterialModel;
use crate::plate2d::{Boundary, Grid2, Regime};

fn default_boundary() -> Boundary {
    Boundary::Periodic
}

fn default_regime() -> Regime {
    Regime::VonKarman
}

fn default_one() -> usize {
    1
}

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

/// How a requested time step above the stability bound is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtPolicy {
    /// Reduce to the bound and log a warning.
    #[default]
    Cap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2Section {
    pub half_width: f64,
    pub n1: usize,
    pub n2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid3Section {
    pub half_width: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// Requested step; the stability bound is used when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: f64,
    #[serde(default)]
    pub dt_policy: DtPolicy,
}

/// Exact solution `cos(omega t) shape(x)` for an error column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSection {
    pub shape: FieldExpr,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateSection {
    #[serde(default = "default_regime")]
    pub regime: Regime,
    #[serde(default)]
    pub damping: f64,
    #[serde(default = "default_one")]
    pub sample_every: usize,
    #[serde(default)]
    pub exact: Option<ExactSection>,
}

impl Default for PlateSection {
    fn default() -> Self {
        Self { regime: default_regime(), damping: 0.0, sample_every: 1, exact: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabSection {
    pub h: f64,
    pub alpha: f64,
    #[serde(default = "default_c_safe")]
    pub c_safe: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Times at which thickness averages are written to the fields file.
    #[serde(default)]
    pub field_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSection {
    pub h: Vec<f64>,
    pub alpha: f64,
    #[serde(default = "default_dt2")]
    pub dt2: f64,
    #[serde(default)]
    pub dt3: Option<f64>,
    #[serde(default = "default_c_safe")]
    pub c_safe: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_true")]
    pub floor_estimate: bool,
    #[serde(default = "default_true")]
    pub parallel: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub series: Option<String>,
    #[serde(default)]
    pub fields: Option<String>,
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub table: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialModel,
    #[serde(default = "default_boundary")]
    pub bc: Boundary,
    #[serde(default)]
    pub grid2: Option<Grid2Section>,
    #[serde(default)]
    pub grid3: Option<Grid3Section>,
    #[serde(default)]
    pub forcing: Forcing2,
    #[serde(default)]
    pub initial: InitialDataSpec,
    #[serde(default)]
    pub time: Option<TimeSection>,
    #[serde(default)]
    pub plate: PlateSection,
    #[serde(default)]
    pub slab: Option<SlabSection>,
    #[serde(default)]
    pub ladder: Option<LadderSection>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl RunConfig {
    pub fn grid2(&self) -> Result<Grid2> {
        let g = self.grid2.ok_or_else(|| Error::Config(vec!["grid2 is required".into()]))?;
        Grid2::new(g.half_width, g.n1, g.n2, self.bc)
    }

    pub fn grid3(&self) -> Result<Grid3> {
        let g = self.grid3.ok_or_else(|| Error::Config(vec!["grid3 is required".into()]))?;
        Grid3::new(g.half_width, g.n1, g.n2, g.n3)
    }

    pub fn time(&self) -> Result<TimeSection> {
        self.time.ok_or_else(|| Error::Config(vec!["time is required".into()]))
    }

    /// The ladder experiment described by the `ladder`, `grid3`, `time` and shared sections.
    pub fn ladder_config(&self) -> Result<LadderConfig> {
        let l = self.ladder.as_ref().ok_or_else(|| Error::Config(vec!["ladder is required".into()]))?;
        self.grid3.ok_or_else(|| Error::Config(vec!["grid3 is required".into()]))?;
        self.time()?;
        Ok(self.ladder_section_config(l))
    }

    /// As [`RunConfig::ladder_config`], with placeholders for absent `grid3` and `time`.
    fn ladder_section_config(&self, l: &LadderSection) -> LadderConfig {
        let g = self.grid3.unwrap_or(Grid3Section { half_width: 1.0, n1: 8, n2: 8, n3: 3 });
        LadderConfig {
            h: l.h.clone(),
            alpha: l.alpha,
            material: self.material,
            initial: self.initial.clone(),
            forcing: self.forcing.clone(),
            t_end: self.time.map_or(1.0, |t| t.t_end),
            grid: LadderGrid { half_width: g.half_width, n1: g.n1, n2: g.n2, n3: g.n3 },
            dt2: l.dt2,
            dt3: l.dt3,
            c_safe: l.c_safe,
            samples: l.samples,
            thresholds: l.thresholds,
            floor_estimate: l.floor_estimate,
            parallel: l.parallel,
        }
    }

    /// Every range violation as `"<path> <message>"`.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |path: &str, msg: String| out.push(format!("{path} {msg}"));
        for (f, m) in self.material.violations() {
            push(&format!("material.{f}"), m);
        }
        if let Some(g) = &self.grid2 {
            if !positive(g.half_width) {
                push("grid2.half_width", "must be > 0".into());
            }
            if g.n1 < 8 {
                push("grid2.n1", format!("must be >= 8 (got {})", g.n1));
            }
            if g.n2 < 8 {
                push("grid2.n2", format!("must be >= 8 (got {})", g.n2));
            }
        }
        if let Some(g) = &self.grid3 {
            if !positive(g.half_width) {
                push("grid3.half_width", "must be > 0".into());
            }
            if g.n1 < 8 {
                push("grid3.n1", format!("must be >= 8 (got {})", g.n1));
            }
            if g.n2 < 8 {
                push("grid3.n2", format!("must be >= 8 (got {})", g.n2));
            }
            if g.n3 < 3 {
                push("grid3.n3", format!("must be >= 3 (got {})", g.n3));
            }
        }
        if let Some(t) = &self.time {
            if !positive(t.t_end) {
                push("time.T", format!("must be > 0 (got {})", t.t_end));
            }
            if let Some(dt) = t.dt {
                if !positive(dt) {
                    push("time.dt", format!("must be > 0 (got {dt})"));
                }
            }
        }
        if !(self.plate.damping >= 0.0 && self.plate.damping.is_finite()) {
            push("plate.damping", "must be >= 0".into());
        }
        if self.plate.sample_every == 0 {
            push("plate.sample_every", "must be >= 1".into());
        }
        if let Some(s) = &self.slab {
            if !(s.h > 0.0 && s.h <= 1.0) {
                push("slab.h", format!("must lie in (0, 1] (got {})", s.h));
            }
            if !(s.alpha >= 3.0 && s.alpha.is_finite()) {
                push("slab.alpha", format!("must be >= 3 (got {})", s.alpha));
            }
            if !(s.c_safe > 0.0 && s.c_safe <= 1.0) {
                push("slab.c_safe", "must lie in (0, 1]".into());
            }
            if s.samples == 0 {
                push("slab.samples", "must be >= 1".into());
            }
        }
        if let Some(l) = &self.ladder {
            // shared sections are validated above under their own paths
            let probe = self.ladder_section_config(l);
            for (p, m) in probe.violations() {
                let shared = p.starts_with("material.") || ["initial", "forcing", "grid", "T"].contains(&p.as_str());
                if !shared {
                    push(&format!("ladder.{p}"), m);
                }
            }
            if self.grid3.is_none() {
                push("grid3", "is required with ladder".into());
            }
            if self.time.is_none() {
                push("time", "is required with ladder".into());
            }
        }
        // fields and forcing must fit the grid they will be sampled on
        let sample_grid = self
            .grid3
            .and_then(|g| Grid2::periodic(g.half_width, g.n1, g.n2).ok())
            .or_else(|| self.grid2.and_then(|g| Grid2::new(g.half_width, g.n1, g.n2, self.bc).ok()));
        if let Some(grid) = sample_grid {
            if let Err(e) = self.initial.check(&grid) {
                push("initial", e.to_string());
            }
            if let Err(e) = self.forcing.check(&grid) {
                push("forcing", e.to_string());
            }
        }
        out
    }

    /// Canonical JSON of the parsed configuration (defaults written out).
    pub fn to_canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::Config(vec![format!("malformed JSON: {inner}")])
        } else {
            Error::Config(vec![format!("{path}: {inner}")])
        }
    })?;
    let problems = cfg.violations();
    if problems.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(problems))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_2D: &str = r#"{
        "material": {"model": "svk", "mu": 1.0, "lambda": 1.0},
        "grid2": {"half_width": 3.14159, "n1": 16, "n2": 16},
        "time": {"T": 1.0}
    }"#;

    fn messages(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(Error::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL_2D).unwrap();
        assert_eq!(cfg.bc, Boundary::Periodic);
        assert_eq!(cfg.plate.regime, Regime::VonKarman);
        assert_eq!(cfg.time.unwrap().dt_policy, DtPolicy::Cap);
        assert_eq!(cfg.forcing, Forcing2::Zero);
        assert!(cfg.initial.is_zero());
    }

    #[test]
    fn ladder_h_out_of_range() {
        let text = r#"{
            "material": {"model": "dist_so3", "kappa": 1.0},
            "grid3": {"half_width": 1.0, "n1": 8, "n2": 8, "n3": 3},
            "time": {"T": 0.5},
            "ladder": {"h": [0.7, 0.1, 0.05], "alpha": 3}
        }"#;
        assert_eq!(messages(text), vec!["ladder.h[0] must be < 0.5".to_string()]);
    }

    #[test]
    fn negative_lambda_is_reported_at_its_path() {
        let m = messages(r#"{"material": {"model": "svk", "mu": 1.0, "lambda": -1.0}}"#);
        assert_eq!(m.len(), 1);
        assert!(m[0].starts_with("material.lambda"), "{m:?}");
    }

    #[test]
    fn all_violations_are_collected() {
        let m = messages(
            r#"{"material": {"model": "svk", "mu": 0.0, "lambda": -1.0},
                "grid2": {"half_width": 1.0, "n1": 4, "n2": 16}}"#,
        );
        assert_eq!(m.len(), 3, "{m:?}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let m = messages(r#"{"material": {"model": "svk", "mu": 1.0, "lambda": 1.0}, "time": {"T": 1, "tt": 2}}"#);
        assert!(m[0].starts_with("time"), "{m:?}");
        assert!(m[0].contains("tt"));
    }

    #[test]
    fn malformed_json() {
        let m = messages("{\"material\": ");
        assert!(m[0].starts_with("malformed JSON"));
    }

    #[test]
    fn canonical_round_trip() {
        let cfg = parse_config(MINIMAL_2D).unwrap();
        let once = cfg.to_canonical_json().unwrap();
        let again = parse_config(&once).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_canonical_json().unwrap(), once);
    }
}
