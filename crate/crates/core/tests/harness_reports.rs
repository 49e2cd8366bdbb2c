use dro_core::fock::Statistics;
use dro_core::gl_reps::TensorRepSpec;
use dro_core::harness::*;
use dro_core::realization::FieldSpec;
use dro_core::scalar::{rat, rint};
use serde_json::Value;

fn small_config() -> SuiteConfig {
    SuiteConfig {
        grid: vec![
            FieldSpec::new(TensorRepSpec::scalar(1, rint(0)), 0, Statistics::Boson, rint(0), rint(0)),
            FieldSpec::new(TensorRepSpec::vector(2), 1, Statistics::Fermion, rat(1, 2), rint(1)),
        ],
        gauge_grid: vec![FieldSpec::new(TensorRepSpec::scalar(1, rint(0)), 0, Statistics::Boson, rint(0), rint(2))],
        algebras: vec!["u1".into()],
        property_cases: 2,
        seed: 7,
        suites: Suites { charges: true, gauge: true, properties: true, ..Suites::none() },
        ..SuiteConfig::default()
    }
}

fn no_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_u64() || n.is_i64(),
        Value::Array(a) => a.iter().all(no_floats),
        Value::Object(o) => o.values().all(no_floats),
        _ => true,
    }
}

#[test]
fn report_round_trips_and_is_exact() {
    let report = run_suite(&small_config()).unwrap();
    assert!(report.passed(), "{:?}", report.failures());
    let json = render(&report, Format::Json).unwrap();
    let back: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    assert!(no_floats(&serde_json::from_str(&json).unwrap()));
}

#[test]
fn renders_are_deterministic() {
    let a = run_suite(&small_config()).unwrap();
    let b = run_suite(&small_config()).unwrap();
    for f in [Format::Json, Format::Csv, Format::Text] {
        assert_eq!(render(&a, f).unwrap(), render(&b, f).unwrap());
    }
}

#[test]
fn csv_has_one_line_per_row() {
    let report = run_suite(&small_config()).unwrap();
    let csv = render_csv(&report).unwrap();
    let mut rd = csv::Reader::from_reader(csv.as_bytes());
    let header = rd.headers().unwrap().clone();
    assert_eq!(&header[0], "n");
    assert_eq!(&header[header.len() - 1], "pass");
    let recs: Vec<_> = rd.records().map(Result::unwrap).collect();
    assert_eq!(recs.len(), report.rows.len());
    assert!(recs.iter().all(|r| &r[r.len() - 1] == "true"));
}

#[test]
fn emitted_files_match_renders() {
    let report = run_suite(&SuiteConfig { suites: Suites { charges: true, ..Suites::none() }, ..small_config() }).unwrap();
    let dir = std::env::temp_dir().join(format!("dro-report-{}", std::process::id()));
    let paths = emit_report(&report, &[Format::Json, Format::Csv, Format::Text], &dir).unwrap();
    assert_eq!(paths.len(), 3);
    for (p, f) in paths.iter().zip([Format::Json, Format::Csv, Format::Text]) {
        assert_eq!(std::fs::read_to_string(p).unwrap(), render(&report, f).unwrap());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_summary_reports_failures() {
    let mut report = Report::empty(0);
    report.checks.push(CheckRecord { suite: "x".into(), name: "y".into(), passed: false, detail: "z".into() });
    assert!(render_text(&report).trim_end().ends_with("overall FAIL"));
    assert_eq!(report.exit_code(), 1);
}
