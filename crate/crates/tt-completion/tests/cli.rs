//! End-to-end tests of the `ttc` binary: subcommand pipelines, file
//! formats, diagnostics, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn ttc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn ttc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn synth_then_approx_round_trips_through_files() {
    let dir = tempdir().unwrap();
    let out = ttc(
        &[
            "synth", "--shape", "8,8,8,8", "--rank", "1,2,4,2,1", "--seed", "7", "--out",
            "x.tns",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let out = ttc(
        &[
            "approx", "--rank", "1,2,4,2,1", "--in", "x.tns", "--out-reme", "-",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let value: f64 = stdout(&out).trim().parse().expect("a single number");
    assert!(value <= 1e-10, "relative error {value}");
}

#[test]
fn complete_fully_observed_exact_rank_reports_one_iteration() {
    let dir = tempdir().unwrap();
    let out = ttc(
        &[
            "synth", "--shape", "6,6,6", "--rank", "1,2,2,1", "--seed", "3", "--out", "x.tns",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let out = ttc(
        &[
            "complete", "--in", "x.tns", "--rank", "1,2,2,1", "--out", "xr.tns", "--truth",
            "x.tns",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("iterations: 1"), "{text}");
    assert!(text.contains("converged: true"), "{text}");
    assert!(text.contains("reme: "), "{text}");
}

#[test]
fn masked_completion_pipeline_recovers() {
    let dir = tempdir().unwrap();
    for cmd in [
        vec![
            "synth", "--shape", "8,8,8", "--rank", "1,2,2,1", "--seed", "5", "--out", "x.tns",
        ],
        vec![
            "mask", "--shape", "8,8,8", "--obs-ratio", "0.6", "--seed", "6", "--out", "m.msk",
        ],
        vec![
            "complete", "--in", "x.tns", "--mask", "m.msk", "--rank", "1,2,2,1", "--out",
            "xr.tns",
        ],
    ] {
        let out = ttc(&cmd, dir.path());
        assert!(out.status.success(), "{cmd:?}: {}", stderr(&out));
    }
    let out = ttc(
        &[
            "reme", "--truth", "x.tns", "--recovered", "xr.tns", "--mask", "m.msk",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let value: f64 = stdout(&out).trim().parse().expect("a single number");
    assert!(value < 1e-3, "recovery error {value}");
}

#[test]
fn tmm_method_and_binary_files_work() {
    let dir = tempdir().unwrap();
    let out = ttc(
        &[
            "synth", "--shape", "6,6,6", "--rank", "1,2,2,1", "--seed", "9", "--out", "x.tns",
            "--binary",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = ttc(
        &[
            "mask", "--shape", "6,6,6", "--obs-ratio", "0.8", "--seed", "10", "--out", "m.msk",
            "--binary",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = ttc(
        &[
            "complete", "--in", "x.tns", "--mask", "m.msk", "--rank", "1,2,2,1", "--method",
            "tmm", "--split", "2", "--max-iter", "500",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("iterations:"));
}

#[test]
fn sweep_is_deterministic_at_the_file_level() {
    let dir = tempdir().unwrap();
    std::fs::write(
        dir.path().join("plan.txt"),
        "shape = 5,5,5\nrank = 1,2,2,1\nratios = 0.7\ntrials = 2\nmethods = tcam-tt, tmm1\nseed = 13\n",
    )
    .unwrap();
    for out_name in ["a.csv", "b.csv"] {
        let out = ttc(
            &["sweep", "--plan", "plan.txt", "--out", out_name],
            dir.path(),
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let strip_seconds = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
            .collect()
    };
    assert_eq!(strip_seconds(&a), strip_seconds(&b));
    assert!(a.starts_with("method,obs_ratio,trial,iterations,reme,seconds\n"));
    assert_eq!(a.lines().count(), 1 + 4);
}

#[test]
fn diagnostics_and_exit_codes() {
    let dir = tempdir().unwrap();

    // Missing file: exit 1 with a one-line diagnostic.
    let out = ttc(
        &["complete", "--in", "nosuch.tns", "--rank", "1,2,1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "), "{err}");

    // Invalid rank vector.
    let out = ttc(
        &[
            "synth", "--shape", "4,4", "--rank", "2,2,2", "--seed", "1", "--out", "x.tns",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("boundary ranks"), "{}", stderr(&out));

    // Unknown flag: clap reports usage on stderr with exit 2.
    let out = ttc(&["synth", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // Invalid rank string.
    let out = ttc(
        &[
            "synth", "--shape", "4,4", "--rank", "1,x,1", "--seed", "1", "--out", "x.tns",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("invalid"), "{}", stderr(&out));

    // tmm without split.
    std::fs::write(dir.path().join("t.tns"), "ttensor v1\nshape 2 2\n1\n2\n3\n4\n").unwrap();
    let out = ttc(
        &[
            "complete", "--in", "t.tns", "--rank", "1,2,1", "--method", "tmm",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--split"), "{}", stderr(&out));

    // Help exists and exits 0.
    let out = ttc(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for sub in ["synth", "mask", "approx", "complete", "reme", "sweep"] {
        assert!(stdout(&out).contains(sub), "missing {sub} in help");
    }
}
