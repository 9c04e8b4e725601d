use std::path::Path;
use std::process::{Command, Output};

use trimer_cli::config::RunConfig;

fn trimer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trimer"))
        .args(args)
        .env_remove("TRIMER_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn semiclassical_csv_schema() {
    let out = trimer(&["simulate-semiclassical", "--r", "0.506", "--t-max", "1", "--dt-out", "0.25"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,x2,y2,z1,z2"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, -2.0 / 3.0, 0.0, 0.0, 0.0]);
    assert_eq!(text.lines().count(), 1 + 5);
}

#[test]
fn quantum_defaults_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = trimer(&[
            "simulate-quantum", "--n-atoms", "12", "--r", "0.506", "--initial", "e1", "--t-max", "2",
            "--dt-out", "0.05", "--output", path_str(p),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().next(), Some("tau,x1_over_n,x2_over_n,ys_over_n,energy,norm"));
    assert_eq!(text.lines().count(), 1 + 41);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn selected_observables_only() {
    let out = trimer(&[
        "simulate-quantum", "--n-atoms", "6", "--t-max", "1", "--dt-out", "0.5", "--observables", "z1_over_n,number",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("tau,z1_over_n,number"));
    for line in text.lines().skip(1) {
        let number: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((number - 6.0).abs() < 1e-12);
    }
}

#[test]
fn json_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("run.json");
    let out = trimer(&[
        "simulate-semiclassical", "--r", "0.3333333333333333", "--t-max", "0.5",
        "--dt-out", "0.1", "--format", "json", "--output", path_str(&json_path),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let embedded: RunConfig = serde_json::from_value(doc["config"].clone()).unwrap();
    assert_eq!(embedded.r, 0.3333333333333333);
    assert_eq!(doc["tau"].as_array().unwrap().len(), 6);
    assert_eq!(doc["columns"][0]["label"], "x2");

    // feeding the embedded config back reproduces the run exactly
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string(&doc["config"]).unwrap()).unwrap();
    let args = trimer_cli::RunArgs {
        config: Some(cfg_path.clone()),
        ..Default::default()
    };
    let reparsed = args.resolve(trimer_cli::config::Mode::Semiclassical).unwrap();
    assert_eq!(reparsed, embedded);
    let first = std::fs::read(&json_path).unwrap();
    let again = trimer(&["simulate-semiclassical", "--config", path_str(&cfg_path)]);
    assert!(again.status.success(), "{}", stderr(&again));
    assert_eq!(std::fs::read(&json_path).unwrap(), first);
}

#[test]
fn fixed_point_tables() {
    let out = trimer(&["fixed-points", "--r", "1.0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,x2,z2,kind,residual24,residual25"));
    let kinds: Vec<String> = lines.map(|l| l.split(',').nth(3).unwrap().to_string()).collect();
    assert_eq!(kinds, ["center", "center"]);

    let text = stdout(&trimer(&["fixed-points", "--r", "0.45"]));
    let kinds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(kinds.len(), 4);
    assert_eq!(kinds.iter().filter(|k| **k == "saddle").count(), 1);
}

#[test]
fn sweep_flags_and_empty_grid() {
    let out = trimer(&["sweep", "--r-grid", "0.2,0.283,1/3,0.506,0.52", "--workers", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("r,x2,z2,kind,residual24,residual25,max_x2,localized\n"));
    let mut flags: Vec<(String, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[7].to_string())
        })
        .collect();
    flags.dedup();
    let flags: Vec<&str> = flags.iter().map(|(_, f)| f.as_str()).collect();
    assert_eq!(flags, ["localized", "localized", "boundary", "delocalized", "delocalized"]);

    let single = trimer(&["sweep", "--r-grid", "0.2,0.283,1/3,0.506,0.52", "--workers", "1"]);
    assert_eq!(single.stdout, out.stdout);

    let empty = trimer(&["sweep", "--r-grid", ""]);
    assert!(empty.status.success());
    assert_eq!(stdout(&empty), "r,x2,z2,kind,residual24,residual25,max_x2,localized\n");
}

#[test]
fn invalid_inputs_name_the_field() {
    let cases: [(&[&str], &str); 6] = [
        (&["simulate-quantum", "--r", "-0.1"], "`r`"),
        (&["simulate-quantum", "--dt-out", "0"], "`dt_out`"),
        (&["simulate-quantum", "--n-atoms", "0"], "`n_atoms`"),
        (&["simulate-quantum", "--n-atoms", "600"], "`n_atoms`"),
        (&["simulate-semiclassical", "--initial", "g2"], "`initial`"),
        (&["sweep", "--r-grid", "0.2,-1"], "`r_grid`"),
    ];
    for (args, field) in cases {
        let out = trimer(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(field), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"r": 0.5, "horizon": 3}"#).unwrap();
    let out = trimer(&["simulate-semiclassical", "--config", path_str(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("horizon"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"r": 0.283, "t_max": 0.2, "dt_out": 0.1}"#).unwrap();
    let out = trimer(&["simulate-semiclassical", "--config", path_str(&p), "--t-max", "0.3", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["config"]["r"], 0.283);
    assert_eq!(doc["config"]["t_max"], 0.3);
    assert_eq!(doc["tau"].as_array().unwrap().len(), 4);
}

#[test]
fn raising_the_cap_warns() {
    let out = trimer(&["simulate-quantum", "--n-atoms", "3", "--max-atoms", "600", "--t-max", "0.1", "--dt-out", "0.1"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn unwritable_output_is_reported() {
    let out = trimer(&["fixed-points", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn verify_report() {
    let out = trimer(&["verify", "--n-atoms", "10"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("N =  10"));
    assert_eq!(text.matches(" ok").count(), 4 + 3);
}
