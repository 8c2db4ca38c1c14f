//! `h`-ladder experiments comparing slab averages with the plate limit.

pub mod fit;
pub mod ladder;

use std::io::Write;

pub use fit::{endpoint_ratio, fit_slope, SlopeFit};
pub use ladder::{
    check_initial_limits, initial_deviation, run_ladder, Check, ConvergenceReport, FloorEstimate, HRecord,
    InitialLimit, LadderConfig, LadderGrid, ReferenceInfo, Slopes, Thresholds,
};

use crate::error::Result;

/// Pretty JSON with a trailing newline; identical input gives identical bytes.
pub fn report_json(report: &ConvergenceReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

const TABLE_COLUMNS: [&str; 16] = [
    "h",
    "status",
    "steps",
    "dt",
    "energy_ratio",
    "sup_elastic",
    "sup_kinetic",
    "sup_velocity_sq",
    "sup_v_error",
    "sup_u_error",
    "sup_u_norm",
    "sup_grad_dev",
    "sup_sym_ratio",
    "sup_e3_norm",
    "membrane_moment_error",
    "bending_moment_error",
];

/// One row per ladder entry; inapplicable metrics are left empty.
pub fn write_table<W: Write>(mut out: W, report: &ConvergenceReport) -> Result<()> {
    writeln!(out, "{}", TABLE_COLUMNS.join(","))?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for r in &report.records {
        let status = if r.status == "ok" { "ok" } else { "failed" };
        let cells = [
            format!("{:e}", r.h),
            status.to_string(),
            r.steps.map(|s| s.to_string()).unwrap_or_default(),
            opt(r.dt),
            opt(r.energy_ratio),
            opt(r.sup_elastic),
            opt(r.sup_kinetic),
            opt(r.sup_velocity_sq),
            opt(r.sup_v_error),
            opt(r.sup_u_error),
            opt(r.sup_u_norm),
            opt(r.sup_grad_dev),
            opt(r.sup_sym_ratio),
            opt(r.sup_e3_norm),
            opt(r.membrane_moment_error),
            opt(r.bending_moment_error),
        ];
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
