use std::path::Path;

use gck::cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use gck::fixtures::{write_corpus, TABLE};

fn gck(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["gck"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn corpus() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path()).unwrap();
    dir
}

fn p(dir: &Path, rel: &str) -> String {
    dir.join(rel).to_string_lossy().into_owned()
}

#[test]
fn kth_on_e3_reports_vanishing_unit() {
    let d = corpus();
    let (code, out, _) = gck(&["kth", &p(d.path(), "fixtures/E3.graph")]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("K0 = Z\n") && out.contains("K1 = Z\n") && out.contains("unit class = (0)"), "{out}");
}

#[test]
fn analyses_of_finite_fixtures_exit_zero() {
    let d = corpus();
    for f in ["E1", "E2", "E3"] {
        for cmd in ["kth", "ideals", "classify"] {
            let (code, _, err) = gck(&[cmd, &p(d.path(), &format!("fixtures/{f}.graph"))]);
            assert_eq!(code, EXIT_PASS, "{cmd} {f}: {err}");
        }
    }
}

#[test]
fn table_rows_exit_one_naming_their_condition() {
    let d = corpus();
    for r in &TABLE {
        let (code, out, _) = gck(&["check", &p(d.path(), &format!("example-table/{}", r.file))]);
        assert_eq!(code, EXIT_FAIL, "{}", r.file);
        assert!(out.contains(&format!("(fails {})", r.fails)), "{}: {out}", r.file);
    }
}

#[test]
fn fixture_list_names_all_eight_graphs() {
    let (code, out, _) = gck(&["fixtures", "--list"]);
    assert_eq!(code, EXIT_PASS);
    for i in 1..=8 {
        assert!(out.contains(&format!("E{i} ")), "{out}");
    }
}

#[test]
fn parse_errors_are_usage_errors_with_line_numbers() {
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.graph");
    std::fs::write(&bad, "v a\ne a b 1\n").unwrap();
    let (code, _, err) = gck(&["kth", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, _) = gck(&["no-such-command"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn synthesize_writes_files_that_verify_again() {
    let d = corpus();
    let out_dir = d.path().join("out");
    let target = p(d.path(), "synthesis/compact-ideal-z2.inv");
    let (code, out, err) = gck(&["synthesize", &target, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{err}");
    assert!(out.contains("verification: PASS"));
    let (code, inv, _) = gck(&["augmented", &p(&out_dir, "synth.staged"), "--ideal", "i0"]);
    assert_eq!(code, EXIT_PASS);
    let rec = d.path().join("rec.inv");
    std::fs::write(&rec, inv).unwrap();
    let (code, out, _) = gck(&["iso", rec.to_str().unwrap(), &target, "--cert", &p(&out_dir, "synth.cert")]);
    assert_eq!(code, EXIT_PASS, "{out}");
}

#[test]
fn glue_worked_case() {
    let d = tempfile::tempdir().unwrap();
    let f = d.path().join("p.glue");
    std::fs::write(&f, "A 1,1:1\nB 2,2:1,1,2,2\nY 1,2:0,0\nZ 1,2:3,3\ndominance 0 1\n").unwrap();
    let (code, out, _) = gck(&["glue", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("c = 3") && out.contains("Y' = 1,2:3,3"), "{out}");
}
