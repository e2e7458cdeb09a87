use std::process::{Command, Output};

fn capnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("capnet-cli-test-{name}"));
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn network_ln(v: &serde_json::Value) -> f64 {
    v["rows"][0]["network"]["ln"].as_f64().unwrap()
}

#[test]
fn triangle_capacity_is_three_halves() {
    let p = write_temp(
        "tri.net",
        "vertices: 3\nterminals: 0 1\nedge 0 1 1\nedge 1 2 1\nedge 2 0 1\n",
    );
    let v = json_of(&capnet(&["network", "--input", &p]));
    assert!((network_ln(&v).exp() - 1.5).abs() < 1e-12);
    // unit flux splits 2/3 direct, 1/3 around
    let edges = v["rows"][0]["edges"].as_array().unwrap();
    assert!((edges[0]["current"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((edges[1]["current"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn series_pair_is_harmonic_mean() {
    let p = write_temp(
        "series.net",
        "vertices: 3\nterminals: 0 2\nedge 0 1 2\nedge 1 2 3\n",
    );
    let v = json_of(&capnet(&["network", "--input", &p]));
    // 1/(1/2 + 1/3) = 6/5
    assert!((network_ln(&v).exp() - 1.2).abs() < 1e-12);
}

#[test]
fn dangling_block_is_pruned_without_changing_capacity() {
    // path 0-1-2 between the terminals plus a triangle hanging off 1
    let p = write_temp(
        "prune.net",
        "vertices: 5\nterminals: 0 2\n\
         edge 0 1 1\nedge 1 2 1\n\
         edge 1 3 5\nedge 3 4 5\nedge 4 1 5\n",
    );
    let v = json_of(&capnet(&["network", "--input", &p]));
    assert!((network_ln(&v).exp() - 0.5).abs() < 1e-12);
    let prune = &v["prune"];
    assert_eq!(prune["blocks_removed"].as_u64().unwrap(), 1);
    assert_eq!(prune["edges_kept"].as_u64().unwrap(), 2);
    assert!(prune["capacity_rel_diff"].as_f64().unwrap() < 1e-12);
}

#[test]
fn log_weights_survive_underflow() {
    let p = write_temp(
        "logw.net",
        "vertices: 2\nterminals: 0 1\nedge 0 1 logw:-2000\n",
    );
    let v = json_of(&capnet(&["network", "--input", &p]));
    assert!((network_ln(&v) + 2000.0).abs() < 1e-9);
    assert_eq!(v["rows"][0]["network"]["sci"].as_str().unwrap(), "2.576536e-869");
}

#[test]
fn landscape_capacity_from_catalog() {
    let v = json_of(&capnet(&[
        "capacity",
        "--catalog",
        "double-well",
        "--eps",
        "0.2,0.1",
        "--grid",
        "64",
    ]));
    assert_eq!(v["islands"].as_array().unwrap().len(), 2);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    // single saddle of height 1: ln cap ≈ ln ε + ½ln 2 − 1/ε
    for (row, eps) in rows.iter().zip([0.2f64, 0.1]) {
        let want = eps.ln() + 0.5 * 2.0f64.ln() - 1.0 / eps;
        let got = row["network"]["ln"].as_f64().unwrap();
        assert!((got - want).abs() < 0.03 / eps, "eps {eps}: {got} vs {want}");
    }
}

#[test]
fn landscape_file_with_inline_potential() {
    let p = write_temp(
        "dw.run",
        "potential: (x^2 - 1)^2 + y^2\n\
         domain: -1.8 -1.4 1.8 1.4\n\
         a: -1 0\nb: 1 0\neps: 0.2\ngrid: 64\n",
    );
    let v = json_of(&capnet(&["capacity", "--input", &p]));
    let want = 0.2f64.ln() + 0.5 * 2.0f64.ln() - 1.0 / 0.2;
    assert!((network_ln(&v) - want).abs() < 0.15);
}

#[test]
fn reports_are_byte_deterministic() {
    let run = || {
        capnet(&[
            "capacity",
            "--catalog",
            "double-well",
            "--eps",
            "0.2",
            "--grid",
            "64",
        ])
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_format_has_frozen_header() {
    let out = capnet(&[
        "capacity",
        "--catalog",
        "double-well",
        "--eps",
        "0.2",
        "--grid",
        "64",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eps,network_ln,network_sci,oracle_ln,oracle_sci,ratio,oracle_residual,oracle_iterations"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("0.2,"), "{row}");
}

#[test]
fn out_flag_writes_the_file() {
    let dest = std::env::temp_dir().join("capnet-cli-test-out.json");
    let _ = std::fs::remove_file(&dest);
    let p = write_temp(
        "tri2.net",
        "vertices: 3\nterminals: 0 1\nedge 0 1 1\nedge 1 2 1\nedge 2 0 1\n",
    );
    let out = capnet(&["network", "--input", &p, "--out", dest.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert!((network_ln(&v).exp() - 1.5).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    // usage: missing input source
    assert_eq!(capnet(&["capacity"]).status.code(), Some(1));
    // usage: both sources
    let p = write_temp("dummy.run", "catalog: double-well\n");
    assert_eq!(
        capnet(&["capacity", "--input", &p, "--catalog", "double-well"])
            .status
            .code(),
        Some(1)
    );
    // usage: unknown flag (clap)
    assert_eq!(capnet(&["capacity", "--bogus"]).status.code(), Some(1));
    // usage: unreadable input
    assert_eq!(
        capnet(&["network", "--input", "/no/such/file.net"]).status.code(),
        Some(1)
    );
    // parse: malformed network file
    let bad = write_temp("bad.net", "vertices: 2\nterminals: 0 1\nedge 0 oops 1\n");
    assert_eq!(capnet(&["network", "--input", &bad]).status.code(), Some(2));
    // parse: malformed potential expression
    let badrun = write_temp(
        "bad.run",
        "potential: (x^2 - 1\ndomain: -2 -2 2 2\na: -1 0\nb: 1 0\n",
    );
    assert_eq!(capnet(&["capacity", "--input", &badrun]).status.code(), Some(2));
    // numeric: both terminals in the same well
    let degen = write_temp(
        "degen.run",
        "potential: (x^2 - 1)^2 + y^2\ndomain: -1.8 -1.4 1.8 1.4\n\
         a: -1 0\nb: -1 0.1\neps: 0.2\ngrid: 64\n",
    );
    assert_eq!(capnet(&["capacity", "--input", &degen]).status.code(), Some(3));
    // help exits 0
    assert_eq!(capnet(&["--help"]).status.code(), Some(0));
}

#[test]
fn timing_flag_adds_the_field() {
    let without = json_of(&capnet(&[
        "capacity", "--catalog", "double-well", "--eps", "0.2", "--grid", "64",
    ]));
    let with = json_of(&capnet(&[
        "capacity", "--catalog", "double-well", "--eps", "0.2", "--grid", "64", "--timing",
    ]));
    assert!(without.get("timing_ms").is_none());
    assert!(with["timing_ms"].as_u64().is_some());
    assert_ne!(without["config_hash"], with["config_hash"]);
}

#[test]
fn verify_reports_an_oracle_ratio() {
    let v = json_of(&capnet(&[
        "verify", "--catalog", "double-well", "--eps", "0.1", "--grid", "128",
    ]));
    let row = &v["rows"][0];
    let ratio = row["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 0.15, "ratio {ratio}");
    assert!(row["oracle_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn report_mode_includes_edges_and_prune() {
    let v = json_of(&capnet(&[
        "report", "--catalog", "double-well", "--eps", "0.1", "--grid", "128",
    ]));
    let edges = v["rows"][0]["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 1);
    let e = &edges[0];
    // unit flux over the single bridge
    assert!((e["current"].as_f64().unwrap().abs() - 1.0).abs() < 1e-12);
    let z = e["saddle_location"].as_array().unwrap();
    assert!(z[0].as_f64().unwrap().abs() < 1e-6);
    assert!((e["saddle_height"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["prune"]["blocks_removed"].as_u64().unwrap(), 0);
}
