//! A full thickness ladder: slab runs at h = 0.2, 0.1, 0.05 compared with the
//! von Karman limit. Prints the per-h table and the convergence checks.

use std::f64::consts::PI;

use vonkarman::harness::{run_ladder, write_table, LadderConfig};

fn main() -> vonkarman::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map_or(Ok(3.0), |a| a.parse()).expect("alpha must be a number");
    let cfg: LadderConfig = serde_json::from_str(&format!(
        r#"{{"h": [0.2, 0.1, 0.05], "alpha": {alpha},
            "material": {{"model": "dist_so3", "kappa": 1.0}},
            "initial": {{"v0": {{"kind": "cos_product", "amplitude": 0.1, "k1": 1, "k2": 1}},
                         "relax_transverse": true}},
            "T": 0.5,
            "grid": {{"half_width": {PI}, "n1": 16, "n2": 16, "n3": 5}}}}"#
    ))?;
    let report = run_ladder(&cfg)?;
    write_table(std::io::stdout().lock(), &report)?;
    println!();
    for c in &report.checks {
        println!("{:5} {:<26} {:?} (threshold {})", if c.passed { "pass" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    if let Some(f) = &report.floor {
        println!("plate discretization floor: v {:.2e}, u {:.2e}", f.v, f.u);
    }
    Ok(())
}
