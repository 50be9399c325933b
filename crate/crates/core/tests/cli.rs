use std::process::{Command, Output};

use dressed_emission::cli::format_float;
use dressed_emission::dressed::{uaa_quasi_energy, ModelParams, Parity, Solver};
use dressed_emission::emission::{state_linewidth, OverlapMode, VModelParams};

fn dressed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dressed")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header pairs and data rows of a CSV written by the CLI.
type Csv = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

fn parse_csv(text: &str) -> Csv {
    let mut header = Vec::new();
    let mut lines = text.lines();
    let mut columns = Vec::new();
    for line in lines.by_ref() {
        match line.strip_prefix("# ") {
            Some(kv) => {
                let (k, v) = kv.split_once(" = ").expect("key = value");
                header.push((k.to_string(), v.to_string()));
            }
            None => {
                columns = line.split(',').map(String::from).collect();
                break;
            }
        }
    }
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, columns, rows)
}

fn cell<'a>(columns: &[String], row: &'a [String], name: &str) -> &'a str {
    &row[columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"))]
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"delta": 1.0, "n0": 225, "omega_r_grid": [0.1, 0.5, 1.0]}"#).unwrap();
    let config = config.to_str().unwrap();
    for cmd in ["linewidth-sweep", "sodium"] {
        let a = dressed(&[cmd, "--config", config]);
        let b = dressed(&[cmd, "--config", config]);
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn header_lists_each_parameter_once() {
    let out = dressed(&["linewidth", "--preset", "fig3d", "--solver", "rwa"]);
    assert!(out.status.success());
    let (header, columns, rows) = parse_csv(&stdout(&out));
    let keys: Vec<&str> = header.iter().map(|(k, _)| k.as_str()).collect();
    for key in [
        "command",
        "version",
        "preset",
        "delta",
        "n0",
        "e0",
        "gamma_up",
        "gamma_down",
        "omega_r",
        "coupling",
        "solver",
        "overlap",
    ] {
        assert_eq!(keys.iter().filter(|k| **k == key).count(), 1, "{key}");
    }
    assert_eq!(columns, ["parity", "energy", "gamma", "d_up", "d_down", "d_cross"]);
    assert_eq!(rows.len(), 2);
}

#[test]
fn single_point_output_matches_library() {
    let out =
        dressed(&["linewidth", "--delta", "0.5", "--n0", "100", "--omega-r", "0.6", "--overlap", "exact"]);
    assert!(out.status.success());
    let (_, columns, rows) = parse_csv(&stdout(&out));
    let v = VModelParams::new(50.0, 0.10, 0.05, 0.5, 0.0, 100).unwrap().with_omega_r(0.6).unwrap();
    for row in &rows {
        let p = Parity::from_sign(cell(&columns, row, "parity").parse().unwrap());
        let lib = state_linewidth(&v, p, Solver::Uaa, OverlapMode::Exact).unwrap();
        assert_eq!(cell(&columns, row, "gamma"), format_float(lib.gamma));
        assert_eq!(cell(&columns, row, "energy"), format_float(lib.energy));
    }

    let out = dressed(&["quasi-energy", "--coupling", "0.02", "--n", "10:12"]);
    let (_, columns, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 6);
    let params = ModelParams::new(1.0, 0.02).unwrap();
    for row in &rows {
        let n: usize = cell(&columns, row, "n").parse().unwrap();
        let p = Parity::from_sign(cell(&columns, row, "parity").parse().unwrap());
        assert_eq!(cell(&columns, row, "e_uaa"), format_float(uaa_quasi_energy(&params, n, p).unwrap()));
    }
}

#[test]
fn zero_coupling_quasi_energies() {
    let out = dressed(&["quasi-energy", "--delta", "1", "--coupling", "0", "--n", "5"]);
    let (_, columns, rows) = parse_csv(&stdout(&out));
    for row in &rows {
        let expected =
            if cell(&columns, row, "parity") == "1" { "4.500000000000e0" } else { "5.500000000000e0" };
        for col in ["e_uaa", "e_rwa", "e_exact"] {
            assert_eq!(cell(&columns, row, col), expected);
        }
    }
}

#[test]
fn spectrum_writes_peaks_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig3d.csv");
    let out = dressed(&["spectrum", "--preset", "fig3d", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, columns, rows) = parse_csv(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(columns, ["omega", "intensity_uaa", "intensity_rwa"]);
    assert_eq!(rows.len(), 2001);

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig3d.peaks.json")).unwrap()).unwrap();
    assert_eq!(sidecar["parameters"]["preset"], "fig3d");
    for solver in ["uaa", "rwa"] {
        let peaks = sidecar[solver]["peaks"].as_array().unwrap();
        assert_eq!(peaks.len(), 4);
        for p in peaks {
            assert!(p["weight"].as_f64().unwrap() > 0.0);
            assert!(p["fwhm_extracted"].as_f64().is_some());
        }
    }
}

#[test]
fn json_format_carries_the_same_rows() {
    let csv = dressed(&["sodium", "--omega-r-grid", "0,0.5,1"]);
    let json = dressed(&["sodium", "--omega-r-grid", "0,0.5,1", "--format", "json"]);
    let (_, columns, rows) = parse_csv(&stdout(&csv));
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["columns"].as_array().unwrap().len(), columns.len());
    for (i, row) in rows.iter().enumerate() {
        for (j, text) in row.iter().enumerate() {
            let x = v["rows"][i][j].as_f64().unwrap();
            assert_eq!(&format_float(x), text);
        }
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| dressed(args).status.code().unwrap();
    assert_eq!(code(&["linewidth", "--gamma-up", "-0.1"]), 1);
    assert_eq!(code(&["linewidth", "--coupling", "0.1", "--omega-r", "1"]), 1);
    assert_eq!(code(&["linewidth-sweep", "--omega-r-grid", "0.5,0.1"]), 1);
    assert_eq!(code(&["linewidth-sweep", "--omega-r-grid", "0.5"]), 1);
    assert_eq!(code(&["linewidth-sweep", "--omega-r", "0.5"]), 0);
    assert_eq!(code(&["quasi-energy", "--n", "0", "--bogus"]), 1);
    assert_eq!(code(&["spectrum", "--omega-r", "0.5", "--omega-grid", "49.9:50.1:50"]), 2);
    assert_eq!(code(&["linewidth", "--config", "/nonexistent/run.json"]), 1);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"detla": 1.0}"#).unwrap();
    assert_eq!(code(&["linewidth", "--config", bad.to_str().unwrap()]), 1);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"delta": 0.5, "omega_r": 0.3}"#).unwrap();
    let out = dressed(&["linewidth", "--config", config.to_str().unwrap(), "--delta", "1.5"]);
    let (header, _, _) = parse_csv(&stdout(&out));
    let get = |k: &str| header.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone()).unwrap();
    assert_eq!(get("delta"), "1.5");
    assert_eq!(get("omega_r"), "0.3");
}

#[test]
fn validate_passes() {
    let out = dressed(&["validate"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!text.lines().any(|l| l.starts_with("FAIL")));
}
