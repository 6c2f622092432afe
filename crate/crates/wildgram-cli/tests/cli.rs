//! End-to-end tests of the `wildgram` binary: flag handling, output
//! framing, exit codes.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wildgram"))
}

fn write_text(content: &[u8]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content).unwrap();
    f.flush().unwrap();
    f
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn occurrence_lines(out: &Output) -> Vec<usize> {
    stdout_of(out)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect()
}

#[test]
fn search_reports_positions_and_stats() {
    let text = write_text(b"ababa");
    let out = bin()
        .args(["search", "--pattern", "a?a", "--sigma", "2"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert_eq!(occurrence_lines(&out), [0, 2]);
    let stdout = stdout_of(&out);
    let stats = stdout.lines().last().unwrap();
    assert!(stats.starts_with("# stats: engine=wp "), "{stats}");
    assert!(stats.contains("occurrences=2"));
}

#[test]
fn search_auto_picks_wt_for_wildcard_text() {
    let text = write_text(b"a?bab");
    let out = bin()
        .args(["search", "--pattern", "ab"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(occurrence_lines(&out), [0, 1, 3]);
    assert!(stdout_of(&out).contains("engine=wt"));
}

#[test]
fn search_rejects_wildcards_on_both_sides() {
    let text = write_text(b"ab?ab");
    let out = bin()
        .args(["search", "--pattern", "a?a"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("oracle"), "{stderr}");
}

#[test]
fn oracle_handles_wildcards_on_both_sides() {
    let text = write_text(b"ab?ab");
    let out = bin()
        .args(["oracle", "--pattern", "a?a"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    // only position 0: "ab?" corresponds to "a?a"; at 2, "?ab" fails on b
    assert_eq!(occurrence_lines(&out), [0]);
}

#[test]
fn search_engines_agree_with_oracle_via_cli() {
    let text = write_text(b"abbabababbabab");
    for engine in ["wp", "greedy"] {
        let out = bin()
            .args(["search", "--pattern", "ab?b", "--engine", engine])
            .arg("--text-file")
            .arg(text.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{engine}: {out:?}");
        let oracle = bin()
            .args(["oracle", "--pattern", "ab?b"])
            .arg("--text-file")
            .arg(text.path())
            .output()
            .unwrap();
        assert_eq!(
            occurrence_lines(&out),
            occurrence_lines(&oracle),
            "{engine}"
        );
    }
}

#[test]
fn search_rejects_forced_sigma_below_observed() {
    let text = write_text(b"abcabc");
    let out = bin()
        .args(["search", "--pattern", "abc", "--sigma", "2"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn search_rejects_unknown_engine_and_missing_file() {
    let text = write_text(b"abab");
    let out = bin()
        .args(["search", "--pattern", "ab", "--engine", "bogus"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .args([
            "search",
            "--pattern",
            "ab",
            "--text-file",
            "/nonexistent/t.txt",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin().args(["search", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn search_accepts_forced_gram_length() {
    let text = write_text(b"bbbbbbbb");
    let out = bin()
        .args(["search", "--pattern", "aa", "--engine", "wt", "--q", "2"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert!(occurrence_lines(&out).is_empty());
    let stdout = stdout_of(&out);
    assert!(stdout.contains("verifications=0"), "{stdout}");
    assert!(stdout.contains("effective_q=2"), "{stdout}");

    // q beyond the pattern length is a flag error
    let out = bin()
        .args(["search", "--pattern", "aa", "--engine", "wt", "--q", "5"])
        .arg("--text-file")
        .arg(text.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inspect_prints_schedule_rows() {
    let out = bin()
        .args(["inspect", "--pattern", "aa", "--sigma", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        stdout_of(&out),
        "step,probe_position,expected_remaining\n0,-,2\n1,1,1\n"
    );
}

#[test]
fn inspect_bounds_prints_cover_numbers() {
    let out = bin()
        .args([
            "inspect",
            "--pattern",
            "abab??ab",
            "--sigma",
            "2",
            "--bounds",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let stdout = stdout_of(&out);
    assert!(stdout.contains("# lower_bound_k,"));
    assert!(stdout.contains("# dense_cover_total,"));
    assert!(stdout.contains("# G,1,"));
}

#[test]
fn bench_prints_deterministic_csv() {
    let run = || {
        bin()
            .args([
                "bench",
                "--engine",
                "wt",
                "--n",
                "512",
                "--m",
                "16",
                "--sigma",
                "2",
                "--wildcard-rate",
                "0.3333333333333333",
                "--trials",
                "4",
                "--seed",
                "7",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success(), "{a:?}");
    assert_eq!(stdout_of(&a), stdout_of(&b));
    let stdout = stdout_of(&a);
    assert!(stdout.starts_with("# rng:"));
    assert!(stdout
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("trial,engine,n,m,sigma,g,q_eff,"));
    assert_eq!(stdout.lines().count(), 2 + 4 + 1);
}

#[test]
fn bench_reads_config_file() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "# sweep").unwrap();
    writeln!(cfg, "engine = wp").unwrap();
    writeln!(cfg, "n = 256").unwrap();
    writeln!(cfg, "m = 48").unwrap();
    writeln!(cfg, "g = 4").unwrap();
    writeln!(cfg, "trials = 3").unwrap();
    writeln!(cfg, "seed = 11").unwrap();
    cfg.flush().unwrap();
    let out = bin()
        .arg("bench")
        .arg("--config")
        .arg(cfg.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let stdout = stdout_of(&out);
    assert!(stdout.contains("0,wp,256,48,2,4,"), "{stdout}");

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "frobnicate = 3").unwrap();
    bad.flush().unwrap();
    let out = bin()
        .arg("bench")
        .arg("--config")
        .arg(bad.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_rejects_invalid_engine_parameter_combinations() {
    let out = bin()
        .args(["bench", "--engine", "wt", "--g", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
