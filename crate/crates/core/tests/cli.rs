//! Runs the installed binary end to end on synthetic data.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn curvetext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvetext"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_connect_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let out = curvetext(&["--seed", "7", "synth", "--cases", "4", "--out-dir", path(&data)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(data.join("gt/synth_7.txt").exists());
    assert!(data.join("scores/synth_7_L0.sgrd").exists());

    let det = dir.path().join("det.txt");
    let svg = dir.path().join("svg");
    let dump = data.join("segments.txt");
    let out = curvetext(&[
        "--jobs", "2", "connect", "--dump", path(&dump), "--out", path(&det), "--svg-out", path(&svg),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(svg.join("synth_7.svg")).unwrap().contains("<path"));

    // Same input, different worker count, to stdout.
    let again = curvetext(&["--jobs", "1", "connect", "--dump", path(&dump)]);
    assert_eq!(again.stdout, fs::read(&det).unwrap());

    let out = curvetext(&["evaluate", "--det", path(&det), "--gt", path(&data.join("gt")), "--per-image"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("1.000000 1.000000 1.000000 "), "{text}");
    assert_eq!(text.lines().count(), 5);

    let out = curvetext(&["evaluate", "--det", path(&det), "--gt", path(&data.join("gt")), "--iou", "0.99", "--min-f", "0.5"]);
    assert_eq!(out.status.code(), Some(1));

    let gt = data.join("gt/synth_7.txt");
    let out = curvetext(&["iou", path(&gt), path(&gt)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let first: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
    assert_eq!(first[0], "1.000000");

    let out = curvetext(&["label-anchors", "--gt", path(&gt), "--width", "512", "--height", "512"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().lines().count() >= 3);
}

#[test]
fn binary_dump_matches_text_dump() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (d, extra) in [(&a, None), (&b, Some("--binary"))] {
        let mut args = vec!["synth", "--cases", "2", "--out-dir", path(d)];
        args.extend(extra);
        assert_eq!(curvetext(&args).status.code(), Some(0));
    }
    let ta = curvetext(&["connect", "--dump", path(&a.join("segments.txt"))]);
    let tb = curvetext(&["connect", "--dump", path(&b.join("segments.bin"))]);
    assert!(!ta.stdout.is_empty());
    assert_eq!(ta.stdout, tb.stdout);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    assert_eq!(curvetext(&["synth", "--cases", "1", "--out-dir", path(&data)]).status.code(), Some(0));
    let cfg = dir.path().join("high.cfg");
    fs::write(&cfg, "# nothing passes\ns3=1.0\n").unwrap();
    let dump = data.join("segments.txt");
    let out = curvetext(&["--config", path(&cfg), "connect", "--dump", path(&dump)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = curvetext(&["--config", path(&cfg), "connect", "--dump", path(&dump), "--s3", "0.4"]);
    assert!(!out.stdout.is_empty());

    fs::write(&cfg, "speed=3\n").unwrap();
    let out = curvetext(&["--config", path(&cfg), "connect", "--dump", path(&dump)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(curvetext(&["connect", "--dump", path(&missing)]).status.code(), Some(2));
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "SEG a 1 2 3 2\n0.1 0.2\n").unwrap();
    let out = curvetext(&["connect", "--dump", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte offset"));
    assert_eq!(curvetext(&["connect", "--dump", path(&bad), "--s1", "3"]).status.code(), Some(2));
}

#[test]
fn loss_check_passes() {
    let out = curvetext(&["loss-check", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("spot_values ok"));
}
