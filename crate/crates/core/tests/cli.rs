//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use surgctx::synth::{write_trial, SynthOptions};
use surgctx::trial_io::{read_context_transcript, write_pgm, ContextCode, ContextSchema, Mask, ObjectClass, Task};

fn surgctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surgctx"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, seed: &str) -> PathBuf {
    let trials = dir.join("trials");
    let out = surgctx(&["synth", "--seed", seed, "--trials", "2", "--gestures", "5", "--out", s(&trials)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    trials
}

#[test]
fn pipeline_runs_through_every_subcommand() {
    let tmp = tempfile::tempdir().unwrap();
    let trials = synth(tmp.path(), "11");
    let pred = tmp.path().join("pred");
    let report = tmp.path().join("report");

    let out = surgctx(&["infer-context", "--manifest", s(&trials), "--out", s(&pred), "--jobs", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = surgctx(&["translate", s(&pred), "--out", s(&pred)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = surgctx(&["evaluate", "--manifest", s(&trials), "--pred", s(&pred), "--out", s(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["context_report.csv", "gesture_report.csv", "context_report.txt", "gesture_report.txt"] {
        assert!(report.join(f).is_file(), "{f} missing");
    }

    let gestures: Vec<PathBuf> = fs::read_dir(&pred)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".gestures.txt"))
        .collect();
    assert_eq!(gestures.len(), 2);
    let svg = tmp.path().join("timeline.svg");
    let out = surgctx(&["render-timeline", s(&gestures[0]), "--out", s(&svg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<svg") && text.trim_end().ends_with("</svg>"));
}

#[test]
fn inference_output_does_not_depend_on_job_count() {
    let tmp = tempfile::tempdir().unwrap();
    let trials = synth(tmp.path(), "5");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&surgctx(&["infer-context", "--manifest", s(&trials), "--out", s(&a), "--jobs", "1"])), 0);
    assert_eq!(code(&surgctx(&["infer-context", "--manifest", s(&trials), "--out", s(&b), "--jobs", "3"])), 0);
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 2);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap());
    }
}

#[test]
fn empty_masks_give_all_zero_context() {
    let tmp = tempfile::tempdir().unwrap();
    let contexts: Vec<ContextCode> = vec!["00000".parse().unwrap(); 10];
    let trial = write_trial(&tmp.path().join("t"), "empty", &contexts, None, &SynthOptions::default()).unwrap();
    let masks = trial.dir.join("masks");
    for class in fs::read_dir(&masks).unwrap() {
        for f in fs::read_dir(class.unwrap().path()).unwrap() {
            let p = f.unwrap().path();
            fs::remove_file(&p).unwrap();
            write_pgm(&Mask::empty(640, 480, ObjectClass::Needle, 0), &p).unwrap();
        }
    }
    let pred = tmp.path().join("pred");
    let out = surgctx(&["infer-context", "--manifest", s(&trial.manifest), "--out", s(&pred)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let frames = read_context_transcript(pred.join("empty.context.csv"), &ContextSchema::new(Task::Suturing)).unwrap();
    assert_eq!(frames.len(), 10);
    assert!(frames.iter().all(|f| f.values == [0; 5]));
}

#[test]
fn malformed_rules_exit_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let trials = synth(tmp.path(), "1");
    let rules = tmp.path().join("bad.rules");
    fs::write(&rules, "task = Suturing\n\n[left_hold]\n2: D(LG,N) <\n").unwrap();
    let out = surgctx(&[
        "infer-context", "--manifest", s(&trials), "--rules", s(&rules), "--out", s(&tmp.path().join("o")),
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_grammar_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let grammar = tmp.path().join("bad.grammar");
    fs::write(&grammar, "task = Suturing\n\n[states]\nStart G1\n\n[transitions]\nStart, G99, contexts=[00000]\n").unwrap();
    let ctx = tmp.path().join("x.context.csv");
    fs::write(&ctx, "sample_index,LH,LC,RH,RC,S5\n0,0,0,0,0,0\n").unwrap();
    let out = surgctx(&["translate", s(&ctx), "--grammar", s(&grammar), "--out", s(tmp.path())]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_context_values_exit_with_data_code() {
    let tmp = tempfile::tempdir().unwrap();
    let ctx = tmp.path().join("x.context.csv");
    fs::write(&ctx, "sample_index,LH,LC,RH,RC,S5\n0,7,0,0,0,0\n").unwrap();
    let out = surgctx(&["translate", s(&ctx), "--out", s(tmp.path())]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_mask_frame_exits_with_data_code() {
    let tmp = tempfile::tempdir().unwrap();
    let trials = synth(tmp.path(), "2");
    let manifest = fs::read_dir(&trials).unwrap().next().unwrap().unwrap().path().join("manifest.toml");
    let lg = manifest.parent().unwrap().join("masks/lg");
    let victim = fs::read_dir(&lg).unwrap().nth(3).unwrap().unwrap().path();
    fs::remove_file(victim).unwrap();
    let out = surgctx(&["infer-context", "--manifest", s(&manifest), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn non_positive_rate_exits_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let ctx = tmp.path().join("x.context.csv");
    fs::write(&ctx, "sample_index,LH,LC,RH,RC,S5\n0,0,0,0,0,0\n").unwrap();
    let out = surgctx(&["translate", s(&ctx), "--rate", "0", "--out", s(tmp.path())]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}
