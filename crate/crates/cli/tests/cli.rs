//! End-to-end runs of the command-line binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbitkit"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("orbitkit-cli-test-{}-{}", std::process::id(), name));
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn example_then_reparse_is_identical() {
    let path = tmp("case2.json");
    let p = path.to_str().unwrap();
    let o = run(&["example", "case2-single", "--out", p]);
    assert!(o.status.success(), "{o:?}");
    let first = std::fs::read_to_string(&path).unwrap();
    // Writing again from the parsed config gives identical bytes.
    let o = run(&["example", "case2-single", "--out", p]);
    assert!(o.status.success());
    let second = std::fs::read_to_string(&path).unwrap();
    assert_eq!(first, second);
    assert!(first.contains("\"designated\""));
    std::fs::remove_file(&path).ok();
}

#[test]
fn orbit_csv_has_expected_rows_and_reverifies() {
    let sys_path = tmp("case2-orbit.json");
    let csv_path = tmp("orbit.csv");
    let sp = sys_path.to_str().unwrap();
    let cp = csv_path.to_str().unwrap();
    assert!(run(&["example", "case2-single", "--out", sp]).status.success());
    let o = run(&[
        "orbit", "--system", sp, "--point", "1/2", "--max-word-len", "2", "--out", cp,
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 6, "header plus five points: {text}");
    assert_eq!(rows[0], "index,lo,hi,word");

    // Rows re-verify: each word applied to the base lands in [lo, hi].
    use orbitkit::action::eval_word;
    use orbitkit::catalog::{build_example, ExampleParams};
    use orbitkit::homeo::parse_word;
    use orbitkit::rational::{parse_rational, pow2, rat};
    let sys = build_example("case2-single", &ExampleParams::default()).unwrap();
    for row in &rows[1..] {
        let cols: Vec<&str> = row.splitn(4, ',').collect();
        let lo = parse_rational(cols[1]).unwrap();
        let hi = parse_rational(cols[2]).unwrap();
        let w = parse_word(cols[3]).unwrap();
        let e = eval_word(&sys, &w, &rat(1, 2), &pow2(-50)).unwrap();
        assert!(
            e.lo() >= &(&lo - pow2(-40)) && e.hi() <= &(&hi + pow2(-40)),
            "row {row} does not re-verify"
        );
    }
    std::fs::remove_file(&sys_path).ok();
    std::fs::remove_file(&csv_path).ok();
}

#[test]
fn classify_dense_example_prints_verdict() {
    let sys_path = tmp("case1.json");
    let sp = sys_path.to_str().unwrap();
    assert!(run(&["example", "case1-dense", "--out", sp]).status.success());
    let o = run(&[
        "classify", "--system", sp, "--point", "1/2", "--max-word-len", "24",
        "--max-points", "2000", "--budget-double", "--min-points", "100",
        "--eps-dense", "1/20",
    ]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("verdict: Dense"), "{out}");
    assert!(out.contains("evidence:"));
    assert!(out.contains("stable under one budget doubling"));
    std::fs::remove_file(&sys_path).ok();
}

#[test]
fn transport_prints_word() {
    let sys_path = tmp("level2.json");
    let sp = sys_path.to_str().unwrap();
    assert!(run(&["example", "level2-integer", "--out", sp]).status.success());
    let o = run(&[
        "transport", "--system", sp, "--from", "1", "--to", "3", "--max-word-len", "6",
        "--max-points", "500",
    ]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), "g^2");
    std::fs::remove_file(&sys_path).ok();
}

#[test]
fn witness_prints_certificates() {
    let sys_path = tmp("witness.json");
    let sp = sys_path.to_str().unwrap();
    assert!(run(&["example", "case2-single", "--out", sp]).status.success());
    let o = run(&["witness", "--system", sp]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("witness interval ["), "{out}");
    assert!(out.contains("condition:"));
    std::fs::remove_file(&sys_path).ok();
}

#[test]
fn plot_renders_svg_even_for_empty_orbit() {
    let sys_path = tmp("plot-sys.json");
    let csv_path = tmp("plot-empty.csv");
    let svg_path = tmp("plot.svg");
    let (sp, cp, vp) = (
        sys_path.to_str().unwrap(),
        csv_path.to_str().unwrap(),
        svg_path.to_str().unwrap(),
    );
    assert!(run(&["example", "cantor-ex2", "--out", sp]).status.success());
    std::fs::write(&csv_path, "index,lo,hi,word\n").unwrap();
    let o = run(&["plot", "--orbit", cp, "--system", sp, "--out", vp]);
    assert!(o.status.success(), "{o:?}");
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"), "generator graphs missing");
    assert!(!svg.contains("circle cx"), "no orbit markers expected");
    // Deterministic bytes: render again and compare.
    let o = run(&["plot", "--orbit", cp, "--system", sp, "--out", vp]);
    assert!(o.status.success());
    assert_eq!(svg, std::fs::read_to_string(&svg_path).unwrap());
    for p in [&sys_path, &csv_path, &svg_path] {
        std::fs::remove_file(p).ok();
    }
}

#[test]
fn exit_codes_follow_contract() {
    // Usage error: unknown flag.
    let o = run(&["orbit", "--bogus", "x"]);
    assert_eq!(o.status.code(), Some(2));
    // Usage error: unknown command.
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    // Domain error: missing input file.
    let o = run(&[
        "orbit", "--system", "/nonexistent.json", "--point", "1/2", "--out", "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(1));
    // Domain error: catalog name unknown.
    let o = run(&["example", "no-such-system", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(1));
    // Domain error: point outside the domain.
    let sys_path = tmp("exitcodes.json");
    let sp = sys_path.to_str().unwrap();
    assert!(run(&["example", "case2-single", "--out", sp]).status.success());
    let o = run(&["orbit", "--system", sp, "--point", "3/2", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_file(&sys_path).ok();
}

#[test]
fn as_printed_semigroup_differs_from_repaired() {
    let rep_path = tmp("semi-repaired.json");
    let printed_path = tmp("semi-printed.json");
    let (rp, pp) = (rep_path.to_str().unwrap(), printed_path.to_str().unwrap());
    assert!(run(&["example", "semigroup", "--out", rp]).status.success());
    assert!(run(&["example", "semigroup", "--as-printed", "--out", pp])
        .status
        .success());
    let repaired = std::fs::read_to_string(&rep_path).unwrap();
    let printed = std::fs::read_to_string(&printed_path).unwrap();
    assert_ne!(repaired, printed);
    assert!(printed.contains("as-printed"));
    std::fs::remove_file(&rep_path).ok();
    std::fs::remove_file(&printed_path).ok();
}
