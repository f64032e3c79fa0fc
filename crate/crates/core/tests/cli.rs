use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twpoisson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_fixture(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_manifest(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("m.man");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn verify_exit_codes() {
    let o = run_fixture("verify", "golden_r4.man", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("structure  PASS") && out.contains("closed     PASS"), "{out}");

    let o = run_fixture("verify", "golden_r4_broken.man", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("at (1, 1, 1, 1)"), "{}", stdout(&o));
}

#[test]
fn gauge_not_invertible_is_runtime_error() {
    let o = run_fixture("gauge", "sympl2_degenerate_gauge.man", &["--B", "1*dx1^dx2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NotInvertible"), "{}", stderr(&o));

    let o = run_fixture("gauge", "sympl2.man", &["--B", "1*dx1^dx2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("(1/2)*d/dx1^d/dx2"));
}

#[test]
fn morita_check_echoes_attestations() {
    let o = run_fixture("morita-check", "product.man", &[]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("UNVERIFIED").count(), 3, "{out}");

    let o = run_fixture("morita-check", "product_flipped.man", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("residual[1,2]"));
}

#[test]
fn usage_and_manifest_errors_exit_2() {
    assert_eq!(run(&["no-such-command", "x.man"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    let o = run(&["verify", "/nonexistent/file.man"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[Io]"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let p = write_manifest(&dir, "");
    let o = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no chart defined"));

    let p = write_manifest(&dir, "chart C : x y\ntensor T on C kind mv deg 2 { (2,1) = x }\n");
    let o = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2") && stderr(&o).contains("indices must be strictly increasing"));

    let o = run_fixture("bracket", "golden_r4.man", &["--f", "x1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--g"));

    let o = run_fixture("verify", "product.man", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--target"));
    assert_eq!(run_fixture("verify", "product.man", &["--target", "SW"]).status.code(), Some(0));
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("weak-morita-check"));
}

#[test]
fn reports_are_deterministic_and_witnessed() {
    let dir = tempfile::tempdir().unwrap();
    let report = |tag: &str, cmd: &str, name: &str, extra: &[&str]| {
        let path = dir.path().join(format!("{tag}.txt"));
        let mut args = vec!["--report", path.to_str().unwrap(), "--seed", "7"];
        args.extend_from_slice(extra);
        run_fixture(cmd, name, &args);
        std::fs::read_to_string(path).unwrap()
    };
    for (cmd, name, extra) in [
        ("verify", "golden_r4_broken.man", &[][..]),
        ("morita-check", "product_flipped.man", &[][..]),
        ("leaf-trace", "product.man", &["--x0", "1,2,3,4"][..]),
        ("dirac-check", "golden_r4.man", &[][..]),
    ] {
        let a = report("a", cmd, name, extra);
        let b = report("b", cmd, name, extra);
        assert_eq!(a, b, "{cmd}");
        assert!(a.contains("meta.seed = 7"));
        let lines: Vec<&str> = a.lines().collect();
        for (i, l) in lines.iter().enumerate() {
            if l.ends_with("= FAIL") && !l.starts_with("verdict") {
                assert!(lines[i + 1].contains(".witness = "), "{cmd}: FAIL without witness: {l}");
            }
        }
    }
    let e = report("err", "gauge", "sympl2_degenerate_gauge.man", &["--B", "dx1^dx2"]);
    assert!(e.contains("error.kind = NotInvertible") && e.contains("exit = 3"), "{e}");
}

#[test]
fn flow_exports_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.txt");
    let o = run_fixture(
        "flow",
        "linear.man",
        &["--f", "(x1^2+x2^2)/2", "--x0", "1,0", "--step", "0.01", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = std::fs::read_to_string(out).unwrap();
    assert_eq!(table.lines().count(), 101);
    let last: Vec<f64> = table.lines().last().unwrap().split(' ').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!((last[1] - 1f64.cos()).abs() < 1e-8 && (last[2].abs() - 1f64.sin()).abs() < 1e-8);
}

#[test]
fn remaining_commands_run() {
    let ok = |cmd: &str, name: &str, extra: &[&str]| {
        let o = run_fixture(cmd, name, extra);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}{}", stdout(&o), stderr(&o));
        stdout(&o)
    };
    assert!(ok("bracket", "golden_r4.man", &["--f", "x1", "--g", "x2"]).contains("bracket  x3"));
    ok("hamiltonian", "golden_r4.man", &["--f", "x1*x2"]);
    ok("anomaly", "golden_r4.man", &["--f", "x1^2", "--g", "x2*x3", "--h", "x4"]);
    ok("algebroid-check", "golden_r4.man", &["--forms", "x2*dx1; x1*x3*dx4"]);
    let coh = ok("cohomology", "sympl2.man", &[]);
    assert!(coh.contains("H0.dim             1") && coh.contains("H1.dim             0"), "{coh}");
    ok("dirac-check", "golden_r4.man", &["--sample-set", "unit"]);
    ok("map-check", "product.man", &["--map", "J1"]);
    ok("weak-morita-check", "product.man", &[]);
    assert!(ok("leaf-dim", "golden_r4.man", &["--x0", "1,1,1,1"]).contains("numeric  4"));
    ok("leaf-dim", "golden_r4.man", &["--x0", "0,1,1,1"]);

    let o = run_fixture("anomaly", "golden_r4_broken.man", &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run_fixture("weak-morita-check", "reflexivity.man", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("action1.anchor"));
}
