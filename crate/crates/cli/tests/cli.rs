use std::fs;
use std::path::Path;

use num_rational::BigRational;
use omegalab_cli::{dispatch_with, parse_points, Outcome};
use omegalab_core::enumerator::Workers;

fn cli(args: &[&str]) -> Outcome {
    let mut argv = vec!["omegalab"];
    argv.extend_from_slice(args);
    dispatch_with(argv, Workers::Serial)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn run_reports() {
    let o = cli(&["run", "--program", "01001", "--budget", "10"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "HALTED output=0 steps=1\n"));
    let o = cli(&["run", "--program", "1", "--budget", "0"]);
    assert_eq!(o.stdout, "HALTED output=- steps=0\n");
    let o = cli(&["run", "--program", "0101110010", "--budget", "50"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("RUNNING budget=50\nLOOP"));
    let o = cli(&["run", "--program", "10", "--budget", "5"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("INVALID Leftover"));
    assert_eq!(cli(&["run", "--program", "012", "--budget", "5"]).code, 2);
}

#[test]
fn enumerate_then_omega() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("census");
    let o = cli(&["enumerate", "--max-len", "5", "--budget", "100", "--checkpoint", p(&ck)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "ENUMERATED len<=5 budget 100: 4 halting, 0 pending, 58 invalid strings skipped\n");
    let o = cli(&["omega", "--checkpoint", p(&ck), "--bits", "5"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("OMEGA >= 19/32 = 0.10011..."));
    assert!(o.stdout.trim_end().ends_with("[lower bound only; bits not settled]"));
}

#[test]
fn resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = dir.path().join("fresh");
    let resumed = dir.path().join("resumed");
    cli(&["enumerate", "--max-len", "12", "--budget", "500", "--checkpoint", p(&fresh)]);
    cli(&["enumerate", "--max-len", "8", "--budget", "500", "--checkpoint", p(&resumed)]);
    let o = cli(&["enumerate", "--max-len", "12", "--budget", "500", "--checkpoint", p(&resumed), "--resume"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(fs::read(&fresh).unwrap(), fs::read(&resumed).unwrap());

    // A checkpoint at a smaller budget is refined before being extended.
    let low = dir.path().join("low");
    cli(&["enumerate", "--max-len", "10", "--budget", "3", "--checkpoint", p(&low)]);
    cli(&["enumerate", "--max-len", "12", "--budget", "500", "--checkpoint", p(&low), "--resume"]);
    assert_eq!(fs::read(&fresh).unwrap(), fs::read(&low).unwrap());

    // Resuming a finished census is a no-op.
    cli(&["enumerate", "--max-len", "12", "--budget", "500", "--checkpoint", p(&resumed), "--resume"]);
    assert_eq!(fs::read(&fresh).unwrap(), fs::read(&resumed).unwrap());
}

#[test]
fn enumerate_rejects_inconsistent_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("c");
    cli(&["enumerate", "--max-len", "6", "--budget", "100", "--checkpoint", p(&ck)]);
    let o = cli(&["enumerate", "--max-len", "6", "--budget", "10", "--checkpoint", p(&ck), "--resume"]);
    assert_eq!(o.code, 2);
    let o = cli(&["enumerate", "--max-len", "4", "--budget", "100", "--checkpoint", p(&ck), "--resume"]);
    assert_eq!(o.code, 2);
    fs::write(&ck, "OMEGALAB v0\n").unwrap();
    let o = cli(&["omega", "--checkpoint", p(&ck)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 1"), "{}", o.stderr);
    let o = cli(&["omega", "--checkpoint", p(&dir.path().join("missing"))]);
    assert_eq!(o.code, 2);
}

#[test]
fn elegant_and_compress() {
    let o = cli(&["elegant", "--target", "11111111", "--max-len", "6", "--budget", "100"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("NOT FOUND"));
    let o = cli(&["elegant", "--target", "0", "--max-len", "8", "--budget", "100"]);
    assert_eq!(
        o.stdout,
        "TARGET 0\nMINIMAL_LENGTH 5\nWITNESS 01001\nCERTIFIED (len<=8, budget 100)\n"
    );
    let o = cli(&["elegant", "--target", "000000", "--max-len", "17", "--budget", "100"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("UNCERTIFIED"));
    let o = cli(&["compress", "--facts", "-", "--max-len", "5", "--budget", "100"]);
    assert!(o.stdout.contains("BEST 1 bits 1\n"));
    assert!(o.stdout.contains("RATIO 1/1\n"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["run", "--program", "1"],
        vec!["run", "--program", "1", "--budget", "1", "--bogus"],
        vec!["theory", "prove", "--goal", "(halts 1)"],
    ] {
        let o = cli(&args);
        assert_eq!(o.code, 2, "{args:?}");
        assert!(o.stderr.contains("Usage"), "{args:?}: {}", o.stderr);
    }
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn points_files() {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    assert_eq!(parse_points("1/2\n1/3").unwrap(), vec![r(1, 2), r(1, 3)]);
    assert_eq!(parse_points("0/1").unwrap(), vec![r(0, 1)]);
    assert_eq!(parse_points("# points\n\n1\n").unwrap(), vec![r(1, 1)]);
    assert!(parse_points("0.5").unwrap_err().contains("line 1"));
    assert!(parse_points("1/2\n1/0").unwrap_err().contains("line 2"));
}

#[test]
fn cover_command() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts");
    fs::write(&pts, "1/2\n1/3\n0/1\n").unwrap();
    let o = cli(&["cover", "--points", p(&pts), "--epsilon", "1/4"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("TOTAL 7/32\n"));
    assert_eq!(cli(&["cover", "--points", p(&pts), "--epsilon", "0/1"]).code, 2);
    fs::write(&pts, "3/2\n").unwrap();
    assert_eq!(cli(&["cover", "--points", p(&pts), "--epsilon", "1/4"]).code, 2);
    fs::write(&pts, "1/2\n0.25\n").unwrap();
    let o = cli(&["cover", "--points", p(&pts), "--epsilon", "1/4"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 2"));
}

#[test]
fn diag_command() {
    let dir = tempfile::tempdir().unwrap();
    let progs = dir.path().join("progs");
    // Literal programs for "0101 0101" (digits 5,5) and "0001 0001" (1,1), then "1".
    fs::write(&progs, "# streams\n00010010110011001100110\n00010010101011001010110\n1\n").unwrap();
    let o = cli(&["diag", "--programs", p(&progs), "--digits", "3", "--budget", "100"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "0.655\nUNVERIFIED 3\n");
    assert_eq!(cli(&["diag", "--programs", p(&progs), "--digits", "4", "--budget", "100"]).code, 2);
    fs::write(&progs, "1\n10\n").unwrap();
    let o = cli(&["diag", "--programs", p(&progs), "--digits", "1", "--budget", "100"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains(":2:"), "{}", o.stderr);
}

#[test]
fn borel_command() {
    let o = cli(&["borel", "--prefix", "12", "--budget", "10"]);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[0], "1 H 0");
    assert_eq!(lines[11], "12 HO 0");
}

#[test]
fn theory_commands() {
    let dir = tempfile::tempdir().unwrap();
    let th = dir.path().join("theory");
    let o = cli(&["theory", "certify", "--max-len", "5", "--budget", "100"]);
    fs::write(&th, &o.stdout).unwrap();

    let o = cli(&["theory", "prove", "--theory", p(&th), "--goal", "(elegant 01001)"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("GOAL (elegant 01001)\nRULE ELEGANT-INTRO\n"));
    assert!(o.stdout.contains("CHECKED accept"));

    let o = cli(&["theory", "prove", "--theory", p(&th), "--goal", "(elegant 01000)"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("UNPROVABLE"));

    let o = cli(&["theory", "prove", "--theory", p(&th), "--goal", "(elegant )"]);
    assert_eq!(o.code, 2);

    let o = cli(&["theory", "frontier", "--theory", p(&th)]);
    assert_eq!(o.stdout.lines().next(), Some("N=992 FRONTIER=5"));

    fs::write(&th, "(outputs 01001 1)\n").unwrap();
    let o = cli(&["theory", "frontier", "--theory", p(&th)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("not certified"));
}
