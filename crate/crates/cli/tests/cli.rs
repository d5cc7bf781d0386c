//! End-to-end runs of the `gdo` binary and the report renderer.

use std::process::{Command, Output};

use gdo_cli::args::Format;
use gdo_cli::render::{render, report_render, Cell, Output as Rendered, Table};
use gdo_core::{CheckEntry, CheckReport};

fn gdo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdo"))
        .args(args)
        .env_remove("GDO_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn isos_rep_check_passes_with_json_report() {
    let o = gdo(&["rep", "check", "--structure", "isos", "--dim", "32"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["pass"] == true));
}

#[test]
fn limit_sweep_emits_csv_table() {
    let o = gdo(&["phase", "limit-sweep", "--family", "q_abs", "--S", "99,199,399", "--nmax", "8", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "S,eta,K,n,band_value,oscillator_value,abs_deviation");
    assert_eq!(lines.len(), 1 + 3 * 8);
    assert!(lines[1].starts_with("99,1.000000000000000e-2,,0,"));
}

#[test]
fn negative_custom_structure_is_a_usage_error() {
    let o = gdo(&["rep", "build", "--expr", "x-2", "--dim", "8"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("negative"));
    assert!(o.stdout.is_empty());
}

#[test]
fn failing_check_exits_two() {
    let o = gdo(&["phase", "ladder", "--S", "4", "--alpha", "2", "--format", "csv"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).lines().any(|l| l.starts_with("\"<[a_PB, a_PB^dag]> = 1\",") && l.contains(",false,")));
    let o = gdo(&["structure", "check", "--structure", "q_symmetric", "--S", "5", "--eta", "0.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&gdo(&[])), 1);
    assert_eq!(code(&gdo(&["rep", "check", "--bogus"])), 1);
    assert_eq!(code(&gdo(&["rep", "check", "--dim", "8", "--format", "xml"])), 1);
    assert_eq!(code(&gdo(&["states", "coherent"])), 1);
    assert_eq!(code(&gdo(&["phase", "build", "--S", "3,4"])), 1);
    assert_eq!(code(&gdo(&["rep", "build", "--structure", "q_symmetric", "--dim", "8"])), 1);
    assert_eq!(code(&gdo(&["rep", "check", "--structure", "q_abs", "--S", "8", "--eta", "0.5"])), 1);
    assert_eq!(code(&gdo(&["--help"])), 0);
}

#[test]
fn dimension_cap_is_configurable() {
    let o = Command::new(env!("CARGO_BIN_EXE_gdo"))
        .args(["rep", "check", "--dim", "16"])
        .env("GDO_MAX_DIM", "8")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds the cap 8"));
    assert_eq!(code(&gdo(&["rep", "check", "--dim", "5000"])), 1);
}

#[test]
fn config_file_runs_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "rep check", "structure": {"family": "q_symmetric", "q": {"re": 2.0, "im": 0.0}}, "dim": 12, "format": "csv"}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = gdo(&["--config", cfg]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("name,residual,"));
    assert!(text.contains("boundary defect row 11 = -F(12)"));
    let o = gdo(&["rep", "check", "--config", cfg, "--dim", "7", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("boundary defect row 6 = -F(7)"));
    let o = gdo(&["phase", "build", "--config", cfg]);
    assert_eq!(code(&o), 1);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = gdo(&["states", "coherent", "--draws", "4", "--seed", "11", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = gdo(&["states", "coherent", "--draws", "4", "--seed", "12"]);
    assert_ne!(other.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn tolerance_override_applies_to_upper_bounds() {
    let o = gdo(&["rep", "check", "--dim", "16", "--tol", "1e-17", "--format", "csv"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains(",1.000000000000000e-17,"));
}

#[test]
fn every_command_runs() {
    let runs: &[&[&str]] = &[
        &["structure", "check", "--structure", "q_symmetric", "--q", "2"],
        &["structure", "eval", "--structure", "self_similar", "--q", "1.2", "--omegas", "1,2", "--x", "0,1,2"],
        &["rep", "build", "--structure", "q_abs", "--S", "3", "--eta", "0.5"],
        &["states", "squeezed", "--z", "0.3,0.1"],
        &["states", "displaced-squeezed", "--alpha", "0.3", "--z", "0.2"],
        &["states", "identities", "--structure", "q_symmetric", "--q", "2", "--alpha", "0.4", "--z", "0.3"],
        &["multiphoton", "sector", "--m", "2", "--i", "1", "--dim", "10"],
        &["multiphoton", "broken-vacuum", "--q", "2", "--m", "3", "--i", "2"],
        &["multiphoton", "two-mode", "--m", "1", "--n", "2", "--z", "0.2"],
        &["isos", "rep", "--dim", "12"],
        &["isos", "coherent", "--alpha", "0.5"],
        &["isos", "squeezed", "--z", "0.3"],
        &["isos", "intertwine", "--alpha", "0.5"],
        &["phase", "build", "--S", "5", "--theta0", "0.3"],
        &["phase", "ladder", "--S", "20"],
        &["phase", "shift-check", "--S", "3"],
    ];
    for args in runs {
        for format in ["json", "csv", "text"] {
            let mut full = args.to_vec();
            full.extend(["--format", format]);
            let o = gdo(&full);
            assert_eq!(code(&o), 0, "{full:?}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(!o.stdout.is_empty());
        }
    }
}

#[test]
fn render_contract() {
    assert_eq!(report_render(&CheckReport::new(), Format::Json), b"{\"entries\":[]}\n");
    let mut r = CheckReport::new();
    r.push(CheckEntry::new("A Adag = F(N+1)", 2.5e-16, 1e-10));
    let csv = String::from_utf8(report_render(&r, Format::Csv)).unwrap();
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "A Adag = F(N+1),2.500000000000000e-16,1.000000000000000e-10,true,false,at_most,"
    );
    r.push(CheckEntry::above("break", 0.4714, 1e-12).with_note("expected"));
    for f in [Format::Json, Format::Csv, Format::Text] {
        assert_eq!(report_render(&r, f), report_render(&r, f));
    }
    let json: serde_json::Value = serde_json::from_slice(&report_render(&r, Format::Json)).unwrap();
    assert_eq!(json["entries"][1]["expect"], "above");
    let mut t = Table::new(&["S", "x"]);
    t.rows.push(vec![Cell::Int(3), Cell::Float(0.5)]);
    t.rows.push(vec![Cell::Int(4), Cell::Empty]);
    let out = Rendered {
        report: CheckReport::new(),
        data: None,
        table: Some(t),
    };
    assert_eq!(render(&out, Format::Csv), b"S,x\n3,5.000000000000000e-1\n4,\n");
}
