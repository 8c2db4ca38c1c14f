use std::f64::consts::PI;

use vonkarman::harness::{report_json, run_ladder, write_table, LadderConfig};
use vonkarman::Error;

fn small(alpha: f64) -> LadderConfig {
    serde_json::from_str(&format!(
        r#"{{"h": [0.2, 0.1, 0.05], "alpha": {alpha},
            "material": {{"model": "dist_so3", "kappa": 1.0}},
            "initial": {{"v0": {{"kind": "cos_product", "amplitude": 0.1, "k1": 1, "k2": 1}}, "relax_transverse": true}},
            "T": 0.05, "samples": 5, "floor_estimate": false,
            "grid": {{"half_width": {PI}, "n1": 8, "n2": 8, "n3": 3}}}}"#
    ))
    .unwrap()
}

#[test]
fn coupled_regime_reports_moment_checks() {
    let r = run_ladder(&small(3.0)).unwrap();
    assert_eq!(r.records.len(), 3);
    assert!(r.check("membrane_moment_decrease").is_some());
    assert!(r.check("u_norm_decrease").is_none());
    for rec in &r.records {
        assert_eq!(rec.status, "ok");
        for v in [rec.sup_elastic, rec.sup_v_error, rec.sup_u_error, rec.sup_grad_dev, rec.membrane_moment_error] {
            assert!(v.is_some_and(f64::is_finite), "{rec:?}");
        }
    }
    for lim in &r.initial_limits {
        assert!(lim.v_deviation_h1 < 1e-12 && lim.vhat_deviation_l2 < 1e-12);
    }
}

#[test]
fn linear_regime_checks_vanishing_in_plane_motion() {
    let r = run_ladder(&small(4.0)).unwrap();
    assert!(r.check("u_norm_decrease").is_some());
    assert!(r.check("membrane_moment_decrease").is_none());
    assert!(r.records.iter().all(|rec| rec.sup_u_error.is_none() && rec.sup_u_norm.is_some()));
}

#[test]
fn report_and_table_are_reproducible() {
    let mut cfg = small(3.0);
    cfg.parallel = true;
    let a = report_json(&run_ladder(&cfg).unwrap()).unwrap();
    cfg.parallel = false;
    let report = run_ladder(&cfg).unwrap();
    assert_eq!(a, report_json(&report).unwrap());
    let mut table = Vec::new();
    write_table(&mut table, &report).unwrap();
    let text = String::from_utf8(table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.split(',').count() == 16));
}

#[test]
fn thick_ladders_are_rejected() {
    let mut cfg = small(3.0);
    cfg.h = vec![0.7, 0.1, 0.05];
    match run_ladder(&cfg) {
        Err(Error::Config(m)) => assert_eq!(m, vec!["ladder.h[0] must be < 0.5".to_string()]),
        other => panic!("{other:?}"),
    }
}
