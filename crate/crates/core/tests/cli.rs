use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vonkarman"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vonkarman-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = run(&mut bin());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_subcommand_and_flag_exit_2() {
    assert_eq!(run(bin().arg("simulate")).status.code(), Some(2));
    assert_eq!(run(bin().args(["reduce", "--nu", "0.3"])).status.code(), Some(2));
}

#[test]
fn reduce_prints_the_plate_tensor() {
    let out = run(bin().args(["reduce", "--mu", "1", "--lambda", "1"]));
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let l2 = &json["L2"];
    assert!((l2[0][1].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((l2[0][0].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-15);
    assert_eq!(l2[2][2].as_f64().unwrap(), 1.0);
    assert!((json["lambda_star"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn invalid_material_is_rejected_with_its_path() {
    let dir = scratch("bad");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"material": {"model": "svk", "mu": 1.0, "lambda": -2.0}}"#).unwrap();
    let out = run(bin().args(["reduce", "--config"]).arg(&cfg));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("material.lambda"));
}

#[test]
fn run2d_writes_series_with_error_column() {
    let dir = scratch("run2d");
    let cfg = dir.join("plate.json");
    std::fs::write(
        &cfg,
        r#"{"material": {"model": "svk", "mu": 1.0, "lambda": 1.0},
            "grid2": {"half_width": 3.141592653589793, "n1": 16, "n2": 16},
            "initial": {"v0": {"kind": "cos_product", "amplitude": 1.0, "k1": 1.0, "k2": 1.0}},
            "time": {"dt": 0.01, "T": 0.5},
            "plate": {"regime": "linear", "sample_every": 10,
                      "exact": {"shape": {"kind": "cos_product", "amplitude": 1.0, "k1": 1.0, "k2": 1.0},
                                "omega": 0.9428090415820634}}}"#,
    )
    .unwrap();
    let series = dir.join("series.csv");
    let out = run(bin().args(["--quiet", "run2d", "--config"]).arg(&cfg).arg("--out").arg(&series));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&series).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,kinetic,membrane,bending,work_integral,L2_norm_v,sup_norm_v,error_L2");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 6);
    let last = rows.last().unwrap();
    assert!((last[0] - 0.5).abs() < 1e-12);
    assert!(last[7] > 0.0 && last[7] < 5e-2, "error {}", last[7]);
}

#[test]
fn run3d_writes_series_and_field_snapshots() {
    let dir = scratch("run3d");
    let cfg = dir.join("slab.json");
    std::fs::write(
        &cfg,
        r#"{"material": {"model": "dist_so3", "kappa": 1.0},
            "grid3": {"half_width": 3.141592653589793, "n1": 8, "n2": 8, "n3": 3},
            "initial": {"v0": {"kind": "cos_product", "amplitude": 0.1, "k1": 1, "k2": 1}},
            "time": {"T": 0.02},
            "slab": {"h": 0.2, "alpha": 3, "samples": 4, "field_times": [0.0, 0.02]}}"#,
    )
    .unwrap();
    let (series, fields) = (dir.join("s.csv"), dir.join("f.json"));
    let out = run(bin()
        .args(["run3d", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&series)
        .arg("--fields")
        .arg(&fields));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&series).unwrap();
    assert!(text.starts_with("t,kinetic,elastic,work,grad_dev_L2\n"));
    assert_eq!(text.lines().count(), 6);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fields).unwrap()).unwrap();
    let snaps = json["snapshots"].as_array().unwrap();
    assert_eq!(snaps.len(), 2);
    let v0 = snaps[0]["v"].as_array().unwrap();
    assert_eq!(v0.len(), 64);
    assert!((v0[0].as_f64().unwrap() - 0.1).abs() < 1e-12);
}
