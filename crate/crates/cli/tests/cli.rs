use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dzd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dzd"))
        .args(args)
        .output()
        .expect("run dzd")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    csv::Reader::from_reader(out.stdout.as_slice())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn verify_all_c_is_absorbed_in_cc() {
    let out = dzd(&["verify-tft", "--opponent", "all_c"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let row = &doc["rows"][0];
    let pi: Vec<f64> = row["pi"].as_array().unwrap().iter().map(f).collect();
    assert!((pi[0] - 1.0).abs() < 1e-12 && pi[1..].iter().all(|p| p.abs() < 1e-12));
    for dev in row["moment_deviations"].as_array().unwrap() {
        assert_eq!(f(&dev[1]), 0.0);
    }
    assert_eq!(doc["manifest"]["payoffs"]["T"], 5.0);
    assert_eq!(doc["manifest"]["strategies"][0], "tft");
}

#[test]
fn verify_tft_mirror_from_cd_averages_the_cycle() {
    let out = dzd(&["verify-tft", "--opponent", "tft", "--initial", "cd"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)["rows"][0];
    let pi: Vec<f64> = row["pi"].as_array().unwrap().iter().map(f).collect();
    for (got, want) in pi.iter().zip([0.0, 0.5, 0.5, 0.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert_eq!(row["passed"], true);
}

#[test]
fn verify_random_opponents_pass_and_fail_on_impossible_tolerance() {
    let out = dzd(&[
        "verify-tft",
        "--random",
        "100",
        "--seed",
        "42",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&out).len(), 100);
    let manifest: Value = serde_json::from_slice(&out.stderr).expect("manifest on stderr");
    assert_eq!(manifest["prng"], "xoshiro256starstar-splitmix64");

    let out = dzd(&[
        "verify-tft",
        "--random",
        "100",
        "--seed",
        "42",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify-tft"][..],
        &["verify-tft", "--opponent", "grim"],
        &["verify-tft", "--opponent", "1.5,0,0,0"],
        &["verify-tft", "--opponent", "tft", "--k-max", "21"],
        &["verify-tft", "--opponent", "tft", "--payoffs", "3,0,6,1"],
        &["simulate", "tft", "all_d", "--epsilon", "0.7"],
        &[
            "simulate",
            "tft",
            "all_d",
            "--rounds",
            "10",
            "--burn-in",
            "10",
        ],
        &["decompose", "tft", "--basis", "fourier"],
        &["sweep", "--wsls-coeffs", "--payoff-grid", "T="],
        &["sweep"],
    ] {
        let out = dzd(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn decompose_examples() {
    let doc = json(&dzd(&["decompose", "tft", "--basis", "zd"]));
    let r = &doc["result"];
    assert_eq!(r["exact"], true);
    let c: Vec<f64> = r["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| f(&c["value"]))
        .collect();
    for (got, want) in c.iter().zip([0.0, 0.2, -0.2]) {
        assert!((got - want).abs() < 1e-12);
    }

    let doc = json(&dzd(&["decompose", "wsls", "--basis", "zd"]));
    assert_eq!(doc["result"]["exact"], false);

    let doc = json(&dzd(&["decompose", "wsls", "--basis", "wsls4"]));
    let r = &doc["result"];
    assert_eq!(r["exact"], true);
    assert!(f(&r["residual_norm"]) < 1e-12);
    let c: Vec<f64> = r["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| f(&c["value"]))
        .collect();
    for (got, want) in c
        .iter()
        .zip([-51.0 / 140.0, -79.0 / 140.0, 3.0 / 28.0, 51.0 / 28.0])
    {
        assert!((got - want).abs() < 1e-12);
    }

    // degenerate payoffs are reported, not fatal
    let out = dzd(&[
        "decompose",
        "wsls",
        "--basis",
        "wsls4",
        "--payoffs",
        "1,0,5,1",
        "--permissive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["rank"], 3);

    let doc = json(&dzd(&[
        "decompose",
        "0.3,0.6,0.2,0.9",
        "--basis",
        "monomial:3",
    ]));
    assert_eq!(doc["result"]["rank"], 4);
    assert_eq!(doc["result"]["basis_size"], 10);
    assert_eq!(doc["result"]["exact"], true);
}

#[test]
fn simulate_tft_vs_all_d_locks_into_dd() {
    let out = dzd(&[
        "simulate", "tft", "all_d", "--rounds", "1000", "--seed", "7", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let dd = rows.iter().find(|r| r[0] == "DD").unwrap();
    assert!(dd[2].parse::<f64>().unwrap() >= 0.997);

    let doc = json(&dzd(&[
        "simulate",
        "tft",
        "all_d",
        "--rounds",
        "1000",
        "--seed",
        "7",
        "--burn-in",
        "0",
    ]));
    assert!(f(&doc["result"]["report"]["frequencies"][3]) >= 0.997);
    assert_eq!(doc["manifest"]["prng"], "xoshiro256starstar-splitmix64");
}

fn read_pair(dir: &Path, name: &str) -> (Vec<u8>, Vec<u8>) {
    let out = dir.join(name);
    let mut sidecar = out.clone().into_os_string();
    sidecar.push(".manifest.json");
    (
        std::fs::read(&out).unwrap(),
        std::fs::read(sidecar).unwrap_or_default(),
    )
}

#[test]
fn seeded_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let args = [
            "simulate",
            "wsls",
            "0.2,0.7,0.4,0.9",
            "--rounds",
            "100000",
            "--seed",
            "5",
            "--out",
        ];
        let out = dzd(&[&args[..], &[path.to_str().unwrap()]].concat());
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(
        read_pair(dir.path(), "a.json"),
        read_pair(dir.path(), "b.json")
    );

    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let args = [
            "verify-tft",
            "--random",
            "30",
            "--seed",
            "1",
            "--format",
            "csv",
            "--out",
        ];
        assert_eq!(
            dzd(&[&args[..], &[path.to_str().unwrap()]].concat())
                .status
                .code(),
            Some(0)
        );
    }
    let (a, a_manifest) = read_pair(dir.path(), "a.csv");
    assert_eq!((a, a_manifest.clone()), read_pair(dir.path(), "b.csv"));
    let manifest: Value = serde_json::from_slice(&a_manifest).unwrap();
    assert_eq!(manifest["parameters"]["seed"], 1);
}

#[test]
fn sweep_examples() {
    let out = dzd(&[
        "sweep",
        "--wsls-coeffs",
        "--payoff-grid",
        "R=3;S=0;T=4.5,5,5.5;P=1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    let coeffs: Vec<&[String]> = rows.iter().map(|r| &r[4..8]).collect();
    assert!(coeffs[0] != coeffs[1] && coeffs[1] != coeffs[2] && coeffs[0] != coeffs[2]);

    let out = dzd(&["sweep", "--tft-k-range", "1..10", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 10);
    assert!(rows
        .iter()
        .all(|r| r[6].parse::<f64>().unwrap() <= 1e-12 && r[7] == "true"));

    let out = dzd(&["sweep", "--h-range=-1,0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rows"].as_array().unwrap().len(), 2);

    // a degenerate point is flagged while the rest of the grid completes
    let out = dzd(&[
        "sweep",
        "--wsls-coeffs",
        "--permissive",
        "--payoff-grid",
        "R=1,3;S=0;T=5;P=1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows[0][10], "rank<4");
    assert_eq!(rows[1][10], "ok");

    let out = dzd(&["sweep", "--wsls-coeffs", "--payoff-grid", "T=5,9"]);
    let rows = csv_rows(&out);
    assert!(rows[1][10].starts_with("invalid"));
}
