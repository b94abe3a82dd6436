use std::path::PathBuf;

use finjury_core::harness::{
    load_scenario, replay, replay_file, run, run_to_dir, save_scenario, Engine, Scenario,
};
use finjury_core::Error;

fn fixtures() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("finjury-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn every_fixture_passes_and_replays() {
    let paths = fixtures();
    assert!(paths.len() >= 14);
    for p in paths {
        let s = load_scenario(&p).unwrap();
        let out = run(&s).unwrap();
        assert!(
            out.report.passed(false),
            "{}: {:?}",
            s.name,
            out.report.verification
        );
        let back = replay(&out.trace, Some(s.engine)).unwrap();
        assert_eq!(
            back.render_machine(),
            out.report.render_machine(),
            "{}",
            s.name
        );
    }
}

#[test]
fn scenario_save_load_keeps_digest() {
    let dir = scratch("save");
    for p in fixtures() {
        let s = load_scenario(&p).unwrap();
        let copy = dir.join(p.file_name().unwrap());
        save_scenario(&s, &copy).unwrap();
        let t = load_scenario(&copy).unwrap();
        assert_eq!(t, s);
        assert_eq!(t.digest(), s.digest());
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn digest_tracks_content() {
    let a = Scenario::new(Engine::Sads, 64, 1);
    let mut b = a.clone();
    assert_eq!(a.digest(), b.digest());
    b.seed = 2;
    assert_ne!(a.digest(), b.digest());
    assert_eq!(a.digest().len(), 64);
}

#[test]
fn persisted_files_replay_to_the_same_report() {
    let dir = scratch("persist");
    let mut s = Scenario::new(Engine::Sdnr, 40, 9);
    s.name = "persisted".into();
    let p = run_to_dir(&s, &dir).unwrap();
    let stored = std::fs::read_to_string(&p.report_path).unwrap();
    let again = replay_file(&p.trace_path, Some(Engine::Sdnr)).unwrap();
    assert_eq!(again.render_machine(), stored);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn truncated_trace_is_rejected() {
    let s = Scenario::new(Engine::Sads, 48, 3);
    let out = run(&s).unwrap();
    let lines: Vec<&str> = out.trace.lines().collect();
    let cut = lines.len() * 2 / 3;
    let text = lines[..cut].join("\n");
    match replay(&text, None) {
        Err(Error::TruncatedTrace(stage)) => assert!(stage < 48),
        other => panic!("expected truncation, got {other:?}"),
    }
}

#[test]
fn foreign_engine_is_rejected() {
    let out = run(&Scenario::new(Engine::Sts, 64, 0)).unwrap();
    assert!(matches!(
        replay(&out.trace, Some(Engine::Sads)),
        Err(Error::EngineMismatch { .. })
    ));
}

#[test]
fn edited_record_is_reported_with_its_line() {
    let out = run(&Scenario::new(Engine::Cohesive, 128, 4)).unwrap();
    let mut lines: Vec<String> = out.trace.lines().map(String::from).collect();
    let last = lines.len() - 1;
    lines[last].push_str(" extra=1");
    match replay(&lines.join("\n"), None) {
        Err(Error::CorruptTrace { line, .. }) => assert_eq!(line, last + 1),
        other => panic!("expected corrupt trace, got {other:?}"),
    }
}

#[test]
fn runs_are_deterministic() {
    for engine in [
        Engine::Sts,
        Engine::Sads,
        Engine::Sdnr,
        Engine::Collapse,
        Engine::Cohesive,
    ] {
        let s = Scenario::new(engine, 96, 17);
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.report.render_machine(), b.report.render_machine());
    }
}
