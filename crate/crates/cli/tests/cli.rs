use std::path::PathBuf;
use std::process::{Command, Output};

use dsc_cli::bundle::parse_locals;
use dsc_cli::{parse_bundle, serialize_bundle, Report};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn dsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsc"))
        .args(args)
        .env_remove("DSC_BUDGET")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn workcell() -> String {
    fixture("workcell.dsc").display().to_string()
}

#[test]
fn synth_prints_supervisor_size() {
    let o = dsc(&["synth", &workcell()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("supervisor (70, 153)"), "{}", stdout(&o));
}

#[test]
fn robust_case_exits_zero_and_critical_case_exits_one() {
    let o = dsc(&["check-robust", &workcell(), "--channels", "case1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: delay-robust"));
    let o = dsc(&["check-robust", &workcell(), "--channels", "case3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict: delay-critical"));
}

#[test]
fn explicit_channel_list_matches_preset() {
    let a = dsc(&["check-robust", &workcell(), "--channels", "13:FEEDER"]);
    let b = dsc(&["check-robust", &workcell(), "--channels", "case1"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn report_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for p in &paths {
        let o = dsc(&[
            "pipeline",
            &workcell(),
            "--channels",
            "case4",
            "--report",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let reports: Vec<Report> = paths
        .iter()
        .map(|p| Report::from_json(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect();
    assert_eq!(reports[0].without_timing(), reports[1].without_timing());
    let b = reports[0].blocking.iter().find(|b| b.event == 12).unwrap();
    assert_eq!(b.classification, "1-bounded");
    assert_eq!(b.witness.as_deref(), Some(&[11, 12, 11, 12][..]));
}

#[test]
fn explain_annotates_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("case3.json");
    let o = dsc(&[
        "check-robust",
        &workcell(),
        "--channels",
        "case3",
        "--report",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = dsc(&["explain", p.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("19    LATHE loads part from LBUF and starts working"), "{text}");
    assert!(text.contains("learns of"), "{text}");
}

#[test]
fn localize_output_loads_back() {
    let o = dsc(&["localize", &workcell()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let base = parse_bundle(&std::fs::read_to_string(fixture("workcell.dsc")).unwrap()).unwrap();
    let locals = parse_locals(&text, &base).unwrap();
    assert_eq!(locals.len(), 3);
    let sizes: Vec<(usize, usize)> = locals.iter().map(|l| l.generator.size()).collect();
    let saved = parse_locals(
        &std::fs::read_to_string(fixture("workcell_locals.dsc")).unwrap(),
        &base,
    )
    .unwrap();
    let saved: Vec<(usize, usize)> = saved.iter().map(|l| l.generator.size()).collect();
    assert_eq!(sizes, saved);
}

#[test]
fn external_locals_are_used() {
    let o = dsc(&[
        "check-robust",
        &workcell(),
        "--channels",
        "case1",
        "--locals",
        fixture("workcell_locals.dsc").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("controllers (bundle)"));
}

#[test]
fn bound_reports_recurrence() {
    let o = dsc(&["bound", &workcell(), "--event", "12,16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("12: 1"), "{text}");
}

#[test]
fn unblocked_event_in_case5() {
    let o = dsc(&["check-blocked", &workcell(), "--channels", "case5"]);
    assert!(stdout(&o).contains("event 16 -> LATHE: unbounded"), "{}", stdout(&o));
}

#[test]
fn parse_errors_exit_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.dsc");
    std::fs::write(&p, "agent A\n  states 2\n  0 11 5\nend\n").unwrap();
    let o = dsc(&["synth", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn tiny_budget_is_an_error() {
    let o = dsc(&["check-robust", &workcell(), "--channels", "case6", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixtures_round_trip() {
    for name in [
        "workcell.dsc",
        "example1.dsc",
        "example2.dsc",
        "example2a.dsc",
        "example3.dsc",
    ] {
        let b = parse_bundle(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let text = serialize_bundle(&b);
        let back = parse_bundle(&text).unwrap();
        assert_eq!(back, b, "{name}");
        assert_eq!(serialize_bundle(&back), text, "{name}");
    }
}
