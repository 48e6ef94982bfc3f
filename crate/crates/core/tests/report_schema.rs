use groupforge::io::{read_report, write_outcome, Report, ReportFormat};
use groupforge::{fixtures, grd_form_groups, AlgorithmConfig, Aggregation, Semantics};

fn ex1_report() -> Report {
    let ex1 = fixtures::ex1();
    let config = AlgorithmConfig::new(Semantics::Lm, Aggregation::Min, 1, 3);
    let outcome = grd_form_groups(&ex1, &config).unwrap();
    Report::new(&ex1, &outcome, &config, "grd", None).unwrap()
}

#[test]
fn json_matches_golden_file() {
    let golden = include_str!("golden/ex1_grd_lm_min_k1.json");
    let json = ex1_report().to_json().unwrap();
    assert_eq!(json, golden, "report JSON changed:\n{json}");
}

#[test]
fn csv_matches_golden_file() {
    let golden = include_str!("golden/ex1_grd_lm_min_k1.csv");
    let csv = ex1_report().to_csv().unwrap();
    assert_eq!(csv, golden, "report CSV changed:\n{csv}");
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let report = ex1_report();
    write_outcome(&report, &path, ReportFormat::Json).unwrap();
    let back = read_report(&path).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.objective, 11.0);
}

#[test]
fn unwritable_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("report.json");
    let err = write_outcome(&ex1_report(), &path, ReportFormat::Json).unwrap_err();
    assert!(matches!(err, groupforge::Error::Io { .. }));
}
