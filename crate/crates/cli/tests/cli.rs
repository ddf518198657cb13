use std::path::{Path, PathBuf};
use std::process::Command;

use fliess_kit::run_with;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fliess-kit").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shuffle_of_letters() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.series", "1 x1\n");
    let r = run(&["shuffle", s(&a), s(&a), "--trunc", "5"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(
        r.out
            .starts_with("# alphabet m=1 components l=1 trunc L=5\n"),
        "{}",
        r.out
    );
    assert!(r.out.lines().any(|l| l == "2 x1x1"), "{}", r.out);
}

#[test]
fn printed_series_parse_unchanged() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.series", "1/3 x1\n-2 x0x1\n5/7 e\n");
    let b = file(&dir, "b.series", "1 x0\n-1/2 x1x1\n");
    let first = run(&["compose", s(&a), s(&b), "--trunc", "4"]);
    assert_eq!(first.code, 0, "{}", first.err);
    let printed = file(&dir, "c.series", &first.out);
    let one = file(
        &dir,
        "one.series",
        "# alphabet m=1 components l=1 trunc L=4\n1 e\n",
    );
    let again = run(&["shuffle", s(&printed), s(&one)]);
    assert_eq!(again.out, first.out);
}

#[test]
fn float_mode_prints_17_digits() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.series", "0.1 x1\n1 e\n");
    let r = run(&["shuffle-inv", s(&a), "--float", "--trunc", "2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(
        r.out.contains("-1.0000000000000001e-1 x1") || r.out.contains("-1.0000000000000000e-1 x1"),
        "{}",
        r.out
    );
}

#[test]
fn group_inverse_is_an_involution() {
    let dir = TempDir::new().unwrap();
    let a = file(
        &dir,
        "a.series",
        "# alphabet m=1 components l=1 trunc L=4\n1/2 x1\n-1 x0\n3 e\n",
    );
    let inv = run(&["group-inv", s(&a)]);
    assert_eq!(inv.code, 0, "{}", inv.err);
    let b = file(&dir, "b.series", &inv.out);
    let back = run(&["group-inv", s(&b)]);
    let original = run(&[
        "shuffle",
        s(&a),
        s(&file(
            &dir,
            "one",
            "# alphabet m=1 components l=1 trunc L=4\n1 e\n",
        )),
    ]);
    assert_eq!(back.out, original.out);
}

#[test]
fn domain_errors_exit_1_with_error_name() {
    let dir = TempDir::new().unwrap();
    let proper = file(&dir, "p.series", "1 x1\n");
    let r = run(&["shuffle-inv", s(&proper)]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("ProperSeriesError:"), "{}", r.err);

    let bad = file(&dir, "bad.series", "1 x1\nabc x0\n");
    let r = run(&["norm", s(&bad)]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("SyntaxError:"), "{}", r.err);

    let r = run(&["norm", s(&dir.path().join("missing.series"))]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("IoError:"), "{}", r.err);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["shuffle", "only-one"]).code, 2);
    assert_eq!(run(&["shuffle", "a", "b", "--rational", "--float"]).code, 2);
    let r = run(&["suite", "no-such-suite"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("group-axioms"), "{}", r.err);
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.series", "1 x1\n");
    assert_eq!(run(&["norm", s(&a), "--M", "-1"]).code, 2);
}

#[test]
fn help_exits_0() {
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("bk-table"));
}

#[test]
fn norm_of_a_letter() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.series", "3 x1x0\n");
    let r = run(&["norm", s(&a), "--M", "2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("norm=3/8\n"), "{}", r.out);
}

#[test]
fn verify_shuffle_bound_is_deterministic() {
    let args = [
        "verify",
        "shuffle-bound",
        "--M",
        "1",
        "--eps",
        "0.5",
        "--L",
        "5",
        "--samples",
        "200",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, 0, "{}", a.err);
    assert!(
        a.out.contains("lemma=shuffle-bound samples=200"),
        "{}",
        a.out
    );
    assert!(a.out.contains("pass=true"));
    assert_eq!(a.out, b.out);
}

#[test]
fn bk_table_prints_b7() {
    let r = run(&["bk-table", "--kmax", "7"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("# (cbar^-1, x0^k) = b_k(K) * K * M^k"));
    let b7 = r.out.lines().find(|l| l.starts_with("b_7(K) = ")).unwrap();
    assert!(b7.contains("-5040") && b7.contains("135135*K^7"), "{b7}");
}

#[test]
fn realize_exact_and_symbolic() {
    let dir = TempDir::new().unwrap();
    let r = file(&dir, "r.real", "state z\nparam a\ng1: a*z\nh: z\nz0: 1\n");
    let exact = run(&["realize", s(&r), "--param", "a=2", "--trunc", "3"]);
    assert_eq!(exact.code, 0, "{}", exact.err);
    assert!(exact.out.lines().any(|l| l == "8 x1x1x1"), "{}", exact.out);
    let symbolic = run(&["realize", s(&r), "--trunc", "2"]);
    assert!(symbolic.out.contains("# symbolic in a"), "{}", symbolic.out);
    assert!(
        symbolic.out.lines().any(|l| l == "(a^2) x1x1"),
        "{}",
        symbolic.out
    );
    assert_eq!(run(&["realize", s(&r), "--param", "a"]).code, 2);
}

#[test]
fn fliess_eval_of_x1() {
    let dir = TempDir::new().unwrap();
    let c = file(&dir, "c.series", "1 x1\n");
    let rows: String = (0..=10)
        .map(|k| format!("{} 1\n", k as f64 / 10.0))
        .collect();
    let u = file(&dir, "u.signal", &format!("# t0=0 t1=1 m=1\n{rows}"));
    let r = run(&["fliess-eval", s(&c), s(&u)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let y: f64 = r
        .out
        .split_whitespace()
        .find_map(|f| f.strip_prefix("y="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((y - 1.0).abs() < 1e-12, "{}", r.out);
}

#[test]
fn evolve_writes_manifest() {
    let dir = TempDir::new().unwrap();
    let c = file(
        &dir,
        "c.series",
        "# alphabet m=1 components l=1 trunc L=3\n1 x1\n",
    );
    let out = dir.path().join("path");
    let r = run(&[
        "evolve",
        s(&c),
        "--steps",
        "64",
        "--times",
        "0.5,1",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert_eq!(manifest, r.out);
    assert!(manifest.contains("file=gamma_000064.series"), "{manifest}");
    let end = std::fs::read_to_string(out.join("gamma_000064.series")).unwrap();
    assert!(
        end.lines()
            .any(|l| l.ends_with(" x0x1") && l.starts_with("5.0000000000000")),
        "{end}"
    );
    assert_eq!(
        run(&["evolve", s(&c), "--steps", "64", "--times", "0.3"]).code,
        1
    );
}

#[test]
fn volterra_reports_order() {
    let dir = TempDir::new().unwrap();
    let eta = file(
        &dir,
        "eta.series",
        "# alphabet m=1 components l=1 trunc L=3\n1 x1\n",
    );
    let r = run(&["volterra", s(&eta), "--t", "1"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(
        r.out.starts_with("# t=1.0000000000000000e0 orders="),
        "{}",
        r.out
    );
    let non_proper = file(
        &dir,
        "np.series",
        "# alphabet m=1 components l=1 trunc L=3\n1 e\n",
    );
    let r = run(&["volterra", s(&non_proper), "--cap", "4"]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("OrderCapExceeded:"), "{}", r.err);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.series", "1 x1\n");
    let target = dir.path().join("res.series");
    let r = run(&["pre-lie", s(&a), s(&a), "--trunc", "3", "--out", s(&target)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.is_empty());
    assert!(std::fs::read_to_string(target).unwrap().contains("x0x1"));
}

#[test]
fn suite_group_axioms_passes() {
    let r = run(&["suite", "group-axioms"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(
        r.out
            .ends_with("suite=group-axioms checks=5 failed=0 pass=true\n"),
        "{}",
        r.out
    );
}

#[test]
fn suite_bounds_reports_equality_case() {
    let r = run(&["suite", "bounds"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.contains("equality case ratio = 1"), "{}", r.out);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_fliess-kit");
    let ok = Command::new(exe)
        .args(["bk-table", "--kmax", "2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("b_2(K) = -2 + 5*K - 3*K^2"));
    let usage = Command::new(exe).arg("suite").arg("nope").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
