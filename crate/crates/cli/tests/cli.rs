use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn netflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netflux"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Snapshot values keyed by (time, edge) in file order.
fn snapshots(dir: &Path) -> BTreeMap<(String, u32), Vec<f64>> {
    let mut map = BTreeMap::new();
    for line in read(&dir.join("snapshots.csv")).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        map.entry((f[0].to_string(), f[1].parse().unwrap()))
            .or_insert_with(Vec::new)
            .push(f[3].parse().unwrap());
    }
    map
}

#[test]
fn burgers_run_writes_deterministic_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = netflux(&[
            "run",
            "--preset",
            "burgers",
            "--m",
            "50",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["snapshots.csv", "diagnostics.csv", "summary.json"] {
        assert_eq!(read(&a.join(name)), read(&b.join(name)), "{name}");
    }
    let snaps = read(&a.join("snapshots.csv"));
    assert!(snaps.starts_with("time,edge,x,u\n"));
    // t = 0, 0.2, 0.5, 0.75 on two edges of 50 cells
    assert_eq!(snaps.lines().count(), 1 + 4 * 2 * 50);
    let diag = read(&a.join("diagnostics.csv"));
    assert!(diag.starts_with("step,time,total_mass,node_residual,tv,flux_1,flux_2\n"));
    let summary: serde_json::Value = serde_json::from_str(&read(&a.join("summary.json"))).unwrap();
    assert_eq!(summary["status"], "ok");
}

#[test]
fn zero_final_time_reproduces_initial_data() {
    let tmp = tempfile::tempdir().unwrap();
    let out = netflux(&[
        "run",
        "--preset",
        "traffic-congestion",
        "--t-end",
        "0",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let s = snapshots(tmp.path());
    assert_eq!(s.len(), 3);
    let expect = [0.6, 0.35, 0.35];
    for ((_, edge), values) in &s {
        assert!(values
            .iter()
            .all(|&u| (u - expect[*edge as usize - 1]).abs() <= 1e-15));
    }
    assert_eq!(read(&tmp.path().join("diagnostics.csv")).lines().count(), 1);
}

#[test]
fn echoed_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let out = netflux(&[
        "run",
        "--preset",
        "buckley-leverett",
        "--t-end",
        "0.1",
        "--m",
        "40",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let second = tmp.path().join("second");
    let out = netflux(&[
        "run",
        "--config",
        first.join("config.toml").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        read(&first.join("snapshots.csv")),
        read(&second.join("snapshots.csv"))
    );
}

#[test]
fn right_of_way_changes_the_second_incoming_road() {
    let tmp = tempfile::tempdir().unwrap();
    let mut edge2 = Vec::new();
    for beta in ["0.2", "0.5"] {
        let dir = tmp.path().join(beta);
        let out = netflux(&[
            "run",
            "--preset",
            "traffic-congestion",
            "--coupling",
            "flowmax",
            "--beta",
            beta,
            "--t-end",
            "0.5",
            "--m",
            "100",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let s = snapshots(&dir);
        let last = s
            .keys()
            .map(|k| k.0.clone())
            .max_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse().unwrap()))
            .unwrap();
        edge2.push(s[&(last, 2)].clone());
    }
    // near-junction half; the closed outer end sends its own wave
    let disturbed = |u: &[f64]| u[50..].iter().any(|&x| (x - 0.35).abs() > 1e-3);
    assert!(!disturbed(&edge2[0]));
    assert!(disturbed(&edge2[1]));
}

#[test]
fn configuration_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("o");
    let o = out_dir.to_str().unwrap();
    let missing = netflux(&["run", "--preset", "traffic-free-flow", "--out", o]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("t_end"));

    let too_large = netflux(&[
        "run", "--preset", "burgers", "--scheme", "muscl", "--cfl", "0.7", "--out", o,
    ]);
    assert_eq!(too_large.status.code(), Some(2));

    let file = tmp.path().join("bad.toml");
    std::fs::write(&file, "preset = \"burgers\"\nresolution = 3\n").unwrap();
    let unknown = netflux(&["run", "--config", file.to_str().unwrap(), "--out", o]);
    assert_eq!(unknown.status.code(), Some(2));

    let file = tmp.path().join("custom.toml");
    std::fs::write(&file, "preset = \"custom\"\n").unwrap();
    let custom = netflux(&["run", "--config", file.to_str().unwrap(), "--out", o]);
    assert_eq!(custom.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&custom.stderr);
    assert!(
        msg.contains("edges") && msg.contains("m,") && msg.contains("cfl or dt"),
        "{msg}"
    );
}

#[test]
fn numerical_failure_exits_with_3_and_keeps_a_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = netflux(&[
        "run",
        "--preset",
        "burgers",
        "--m",
        "20",
        "--dt",
        "0.2",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let summary: serde_json::Value =
        serde_json::from_str(&read(&tmp.path().join("summary.json"))).unwrap();
    assert!(summary["status"].as_str().unwrap().starts_with("failed"));
    assert!(tmp.path().join("diagnostics.csv").exists());
}

#[test]
fn custom_network_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("net.toml");
    std::fs::write(
        &file,
        r#"preset = "custom"
m = 30
t_end = 0.2
cfl = 0.4
scheme = "muscl-tvd"

[[edges]]
direction = "incoming"
lambda = 1.0
boundary = "neumann"
flux = { kind = "lwr", u_max = 1.0 }
initial = { kind = "step", left = 0.2, right = 0.4, at = -0.5 }

[[edges]]
direction = "outgoing"
lambda = 1.0
boundary = "neumann"
flux = { kind = "lwr", u_max = 1.0 }
initial = { kind = "constant", value = 0.1 }

[[edges]]
direction = "outgoing"
lambda = 1.5
boundary = "zero-flux"
flux = { kind = "burgers" }
initial = { kind = "constant", value = 0.3 }
"#,
    )
    .unwrap();
    let dir = tmp.path().join("out");
    let out = netflux(&[
        "run",
        "--config",
        file.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.join("summary.json"))).unwrap();
    assert!(summary["max_node_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(summary["edges"].as_array().unwrap().len(), 3);
}

#[test]
fn convergence_writes_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = netflux(&[
        "convergence",
        "--resolutions",
        "20,40",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = read(&tmp.path().join("table.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "inv_dx,scheme,l1,eoc_l1,linf,eoc_linf");
    assert_eq!(lines.len(), 1 + 4 * 2);
    assert!(lines[1].starts_with("20,central,"));
    assert_eq!(lines[1].split(',').nth(3), Some(""));
    let eoc: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!(eoc > 0.5);
    assert!(tmp.path().join("table.json").exists());
    assert!(read(&tmp.path().join("config.toml")).contains("resolutions = [20, 40]"));
}
