//! The thin slab started from plate data at three thicknesses: energy
//! scaling, energy conservation and the distance of the averaged deflection
//! from its initial value.

use std::f64::consts::PI;

use vonkarman::elasto3d::{
    averages, build_initial_data, rigidity_diagnostics, run_slab, Grid3, InitialDataSpec, SlabRunOptions,
};
use vonkarman::fields::FieldExpr;
use vonkarman::forcing::Forcing2;
use vonkarman::MaterialModel;

fn main() -> vonkarman::Result<()> {
    let model = MaterialModel::dist_so3(1.0)?;
    let grid = Grid3::new(PI, 16, 16, 5)?;
    let spec = InitialDataSpec {
        v0: FieldExpr::cos_product(0.1, 1.0, 1.0),
        relax_transverse: true,
        ..InitialDataSpec::default()
    };
    let alpha = 3.0;
    for h in [0.2, 0.1, 0.05] {
        let s = build_initial_data(&spec, h, alpha, grid, &model)?;
        let opts = SlabRunOptions { t_end: 0.25, samples: 5, ..SlabRunOptions::default() };
        let run = run_slab(&s, &model, &Forcing2::Zero, &opts, |_, _| Ok(()))?;
        let first = &run.samples[0];
        let last = run.samples.last().expect("samples");
        let scale = h.powf(2.0 * alpha - 2.0);
        let drift = (last.kinetic + last.elastic - first.kinetic - first.elastic) / (first.kinetic + first.elastic);
        let av = averages(&run.final_state);
        let rig = rigidity_diagnostics(&run.final_state)?;
        println!(
            "h = {h:4}: {} steps of {:.2e}, E0 / h^4 = {:.4e}, relative drift {drift:+.1e}, max |v_h| {:.4}, sym ratio {:.2e}",
            run.step.steps,
            run.step.used,
            (first.kinetic + first.elastic) / scale,
            av.v.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            rig.sym_ratio,
        );
    }
    Ok(())
}
