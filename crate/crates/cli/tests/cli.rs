use std::process::{Command, Output};

fn wirenoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wirenoise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn point_classical_h() {
    let o = wirenoise(&[
        "point",
        "--m",
        "0.8",
        "--omega-r",
        "1e-6",
        "--t",
        "1",
        "--quantity",
        "H",
    ]);
    assert!(o.status.success());
    let h = json(&o)["results"]["H"]["value"].as_f64().unwrap();
    assert!((h - 1.0 / 0.72).abs() < 1e-4, "{h}");
}

#[test]
fn point_trivial_zeros() {
    let o = wirenoise(&[
        "point",
        "--m",
        "0",
        "--t",
        "1",
        "--omega-r",
        "1",
        "--quantity",
        "F",
    ]);
    assert!(o.status.success());
    assert_eq!(json(&o)["results"]["F_int"]["value"].as_f64(), Some(0.0));
    let o = wirenoise(&[
        "point",
        "--m",
        "0.8",
        "--omega-r",
        "0",
        "--t",
        "1",
        "--quantity",
        "H",
    ]);
    assert_eq!(json(&o)["results"]["H"]["value"].as_f64(), Some(0.0));
}

#[test]
fn point_si_inputs() {
    let o = wirenoise(&[
        "point",
        "--si",
        "--inductance",
        "1e-6",
        "--mutual",
        "5e-7",
        "--resistance",
        "1e-3",
        "--temperature",
        "300",
        "--quantity",
        "H,F_int",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["results"]["H"]["value"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
    assert!(v["results"]["F_int"]["si_value"].as_f64().unwrap() > 0.0);
    assert_eq!(
        v["unit_scale"]["omega_ref"].as_f64().unwrap().round(),
        1000.0
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        wirenoise(&["point", "--m", "0.5", "--t", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        wirenoise(&["point", "--m", "1.5", "--omega-r", "1", "--t", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(wirenoise(&["point", "--bogus"]).status.code(), Some(2));
    assert_eq!(wirenoise(&["fig1", "--points", "1"]).status.code(), Some(2));
    let o = wirenoise(&[
        "oracle", "--l", "1", "--m", "0.8", "--r", "0.1", "--kt", "1", "--dt", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig1_default_table() {
    let a = wirenoise(&["fig1"]);
    assert!(a.status.success());
    let text = stdout(&a);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,F_int,F_self,S_int,S_total"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 400);
    assert_eq!(rows[0][0], 0.005);
    assert_eq!(rows[399][0], 2.0);
    assert!(rows.windows(2).any(|w| w[1][1] > w[0][1]));
    assert!(rows.iter().any(|r| r[3] < 0.0));
    assert!(rows.iter().all(|r| r[4] >= -1e-6));
    // the t^6 law with omega_R = 5 t^2 gives F ~ -(16 pi^5/63) m^2 5 t^8
    let ratio = |r: &Vec<f64>| r[1] / (-77.719_285_024_833_38 * 0.64 * 5.0 * r[0].powi(8));
    assert!((ratio(&rows[0]) - 1.0).abs() < (ratio(&rows[30]) - 1.0).abs());
    assert!((ratio(&rows[0]) - 1.0).abs() < 1e-2);
    // bit-stable
    assert_eq!(a.stdout, wirenoise(&["fig1"]).stdout);
    let e = stdout(&wirenoise(&["fig1", "--points", "3", "--with-errors"]));
    assert!(e.starts_with("t,F_int,F_self,S_int,S_total,F_int_err,S_int_err,S_total_err\n"));
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let o = wirenoise(&["fig1", "--points", "2"]);
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    for field in line.split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
    }
}

#[test]
fn sweep_classical_coupling() {
    let o = wirenoise(&[
        "sweep",
        "--variable",
        "m",
        "--from",
        "0.1",
        "--to",
        "0.9",
        "--points",
        "9",
        "--omega-r",
        "1",
        "--t",
        "1e6",
        "--quantity",
        "H",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,m,H,H_err,error"));
    for (k, l) in lines.enumerate() {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[0], k.to_string());
        let m: f64 = f[1].parse().unwrap();
        let h: f64 = f[2].parse().unwrap();
        assert!((h * 2.0 * (1.0 - m * m) - 1.0).abs() < 1e-4, "m = {m}");
        assert_eq!(f[4], "");
    }
}

#[test]
fn sweep_resistance_restores_ideal_limit() {
    let o = wirenoise(&[
        "sweep",
        "--variable",
        "omega_r",
        "--from",
        "1e-6",
        "--to",
        "1",
        "--points",
        "13",
        "--scale",
        "log",
        "--m",
        "0.8",
        "--t",
        "0.1",
        "--omega-c",
        "1",
        "--quantity",
        "H,F_int",
    ]);
    let rows: Vec<Vec<String>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 13);
    let h: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    // flat near omega_r = 0, approaching the lossless normal-mode value
    assert!((h[0] - h[1]).abs() < 1e-3 * h[0].abs());
    assert!((h[0] + 7.5015e-4).abs() < 1e-7);
}

#[test]
fn sweep_degenerate_and_failures() {
    let o = wirenoise(&[
        "sweep",
        "--variable",
        "t",
        "--from",
        "0.5",
        "--to",
        "1",
        "--points",
        "2",
        "--m",
        "0.3",
        "--omega-r",
        "1",
    ]);
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = wirenoise(&[
        "sweep",
        "--variable",
        "t",
        "--from",
        "-1",
        "--to",
        "1",
        "--points",
        "3",
        "--m",
        "0.3",
        "--omega-r",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("domain error"));
    assert!(text.lines().nth(3).unwrap().ends_with(','));
    let o = wirenoise(&[
        "sweep",
        "--variable",
        "t",
        "--from",
        "-2",
        "--to",
        "-1",
        "--points",
        "2",
        "--m",
        "0.3",
        "--omega-r",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = wirenoise(&[
        "sweep",
        "--variable",
        "t",
        "--from",
        "1",
        "--to",
        "0.5",
        "--points",
        "2",
        "--m",
        "0.3",
        "--omega-r",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_resumes_and_ignores_worker_count() {
    let args = [
        "sweep",
        "--variable",
        "t",
        "--from",
        "0.05",
        "--to",
        "2",
        "--points",
        "8",
        "--scale",
        "log",
        "--m",
        "0.8",
        "--omega-r",
        "0.01",
        "--omega-c",
        "1",
        "--quantity",
        "F_int,S_total",
        "--rm-coefficient",
        "5",
    ];
    let full = wirenoise(&args);
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    assert_eq!(full.stdout, wirenoise(&one).stdout);
    let mut resumed = args.to_vec();
    resumed.extend(["--start-row", "5"]);
    let tail = stdout(&wirenoise(&resumed));
    let full = stdout(&full);
    let full_lines: Vec<&str> = full.lines().collect();
    let tail_lines: Vec<&str> = tail.lines().collect();
    assert_eq!(tail_lines[0], full_lines[0]);
    assert_eq!(&tail_lines[1..], &full_lines[6..]);
    let mut env = Command::new(env!("CARGO_BIN_EXE_wirenoise"));
    env.args(args).env("WIRENOISE_WORKERS", "1");
    assert_eq!(env.output().unwrap().stdout, full.as_bytes());
}

#[test]
fn oracle_reference_and_determinism() {
    let args = [
        "oracle", "--l", "1", "--m", "0.8", "--r", "0.1", "--kt", "1", "--seed", "42", "--steps",
        "2e6",
    ];
    let a = wirenoise(&args);
    assert!(a.status.success());
    let v = json(&a);
    let est = &v["estimate"];
    let c = est["corr_12"].as_f64().unwrap();
    let se = est["stderr_corr"].as_f64().unwrap();
    assert!((c + 0.8 / 0.36).abs() < 3.0 * se, "{c} +- {se}");
    assert_eq!(v["seed"].as_u64(), Some(42));
    assert!(est["rng_algorithm"].as_str().unwrap().contains("ChaCha8"));
    assert_eq!(a.stdout, wirenoise(&args).stdout);

    let o = wirenoise(&[
        "oracle",
        "--l",
        "1",
        "--m-henry",
        "0",
        "--r",
        "0.1",
        "--kt",
        "1",
        "--steps",
        "1e6",
    ]);
    let v = json(&o);
    let c = v["estimate"]["corr_12"].as_f64().unwrap();
    assert!(c.abs() < 3.0 * v["estimate"]["stderr_corr"].as_f64().unwrap());
}

#[test]
fn oracle_force_output() {
    let o = wirenoise(&[
        "oracle",
        "--l",
        "1",
        "--m",
        "0.5",
        "--r",
        "1",
        "--kt",
        "1",
        "--steps",
        "1e6",
        "--grad-m=-0.2,0,0",
    ]);
    let v = json(&o);
    let f = v["force"][0].as_f64().unwrap();
    let se = v["force_stderr"][0].as_f64().unwrap();
    assert!((f - 0.5 * 0.2 / 0.75).abs() < 3.0 * se);
    assert_eq!(v["force"][1].as_f64(), Some(0.0));
}

#[test]
fn validate_filter_and_tightening() {
    let o = wirenoise(&["validate", "--filter", "nernst"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let list = v["criteria"].as_array().unwrap();
    assert_eq!(list.len(), 1);
    assert_eq!(list[0]["key"], "nernst");

    let o = wirenoise(&["validate", "--filter", "classical", "--tighten", "1e6"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let list = v["criteria"].as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert!(list
        .iter()
        .all(|c| c["passed"] == false && c["checks"].as_array().unwrap().len() >= 5));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.contains("FAIL")).count(), 2);
}
