use std::io::Write;
use std::process::{Command, Output};

fn lctk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lctk"))
        .args(args)
        .env_remove("LCTK_SWEEP_PPD")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn laplace_with_check() {
    let o = lctk(&["laplace", "(exp -1)", "--check", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("1/(s + 1)  ROC: Re s > -1"));
    let v = json(&lctk(&["laplace", "(exp -1)", "--check", "1", "--format", "json"]));
    assert!(v["check"]["abs_diff"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["roc"], -1.0);
}

#[test]
fn laplace_domain_errors_exit_1() {
    let o = lctk(&["laplace", "(exp 2)", "--check", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ConvergenceMargin"));
    let o = lctk(&["laplace", "(exp 2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("SyntaxError"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lctk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lctk(&["margins"]).status.code(), Some(2));
    let o = lctk(&["margins", "K1/(s*(s + K2))"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("K1") && err.contains("K2"), "{err}");
    assert_eq!(lctk(&["bode", "1/s", "--bind", "oops"]).status.code(), Some(2));
}

#[test]
fn margins_json() {
    let o = lctk(&["margins", "1/(s*(s+1))"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["pm_deg"].as_f64().unwrap() - 51.83).abs() < 0.1);
    let v = json(&lctk(&["margins", "K/(s*(s+1)*(s+2))", "--bind", "K=1"]));
    assert!((v["gm_db_signed"].as_f64().unwrap() + 15.563).abs() < 0.01);
    assert!((v["gm_db_conventional"].as_f64().unwrap() - 15.563).abs() < 0.01);
    let text = stdout(&lctk(&["margins", "1/(s*(s+1))", "--format", "text"]));
    assert!(text.contains("phase margin (deg): 51.8273"), "{text}");
}

#[test]
fn bode_csv_and_ppd_env() {
    let o = lctk(&["bode", "1/(s + 1)", "--wmin", "0.01", "--wmax", "100", "--ppd", "10"]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("w,re,im,mag_db,phase_deg"));
    assert_eq!(lines.count(), 41);
    let o = Command::new(env!("CARGO_BIN_EXE_lctk"))
        .args(["bode", "1/(s + 1)", "--wmin", "1", "--wmax", "10"])
        .env("LCTK_SWEEP_PPD", "20")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).lines().count(), 22);
}

#[test]
fn output_is_deterministic() {
    let args = ["bode", "(s + 3)/(s^3 + 2*s^2 + 5*s + 1)", "--format", "json"];
    assert_eq!(lctk(&args).stdout, lctk(&args).stdout);
}

#[test]
fn tf_from_ode_and_netlist() {
    let o = lctk(&["tf", "from-ode", r#"{"alpha": [1, 1], "beta": [1]}"#]);
    assert_eq!(stdout(&o).trim(), "1/(s + 1)");
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "# inverting amplifier\nR R1 in a R1\nR R2 a out R2\nOPAMP U gnd a out\nVIN in\nVOUT out"
    )
    .unwrap();
    let path = f.path().to_str().unwrap();
    let o = lctk(&["tf", "from-netlist", path]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-R2/R1");
    let o = lctk(&["tf", "from-netlist", path, "--trace"]);
    assert!(stdout(&o).contains("KCL at a"));
}

#[test]
fn verify_exit_status() {
    let ode = r#"{"alpha": [1, 1], "beta": [1]}"#;
    let ok = lctk(&["verify", ode, "--tf", "1/(s + 1)"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["passed"], true);
    let bad = lctk(&["verify", ode, "--tf", "1/(s + 2)", "--s", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["passed"], false);
}

#[test]
fn case_ufss() {
    let o = lctk(&["case", "ufss", "--k1", "1", "--k2", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "(0.25*s + 0.1088)/(s^4 + 3.456*s^3 + 3.457*s^2 + 0.9694*s + 0.1504)"
    );
    let sym = lctk(&["case", "ufss", "--k1", "K1", "--k2", "K2"]);
    assert!(stdout(&sym).contains("(0.25*K1 + 0.1088*K2 + 0.6106)*s"));
    let v = json(&lctk(&[
        "case",
        "ufss",
        "--k1",
        "1",
        "--k2",
        "1",
        "--margins",
        "--format",
        "json",
    ]));
    assert!(v["open_loop"].is_object() && v["closed_loop"]["margins"].is_object());
    assert_eq!(lctk(&["case", "ufss", "--k1", "1"]).status.code(), Some(2));
}

#[test]
fn realize_netlists() {
    let o = lctk(&["realize", "controller", "pid"]);
    let net = stdout(&o);
    assert!(net.contains("OPAMP U1 gnd a out"));
    let v = json(&lctk(&[
        "realize",
        "controller",
        "p",
        "R1=1000",
        "R2=5000",
        "--format",
        "json",
    ]));
    assert_eq!(v["tf"]["text"], "-5");
    let o = lctk(&["realize", "compensator", "lag", "R1=1", "C1=1", "R2=1", "C2=2"]);
    assert!(stdout(&o).starts_with("# acts as a lag compensator"));
    let o = lctk(&["realize", "compensator", "laglead"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("UnsupportedCombination"));
    assert_eq!(lctk(&["realize", "controller", "pidd"]).status.code(), Some(2));
}
