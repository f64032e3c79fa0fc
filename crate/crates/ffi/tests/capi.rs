use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use twisted_poisson_ffi::*;

fn fixture(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let v = CStr::from_ptr(s).to_str().unwrap().to_owned();
    tp_string_free(s);
    v
}

unsafe fn last_error() -> String {
    CStr::from_ptr(tp_last_error()).to_str().unwrap().to_owned()
}

#[test]
fn manifest_structure_report_round_trip() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(tp_manifest_load(fixture("golden_r4.man").as_ptr(), TpConvention::TpConventionPairing, &mut m), TpStatus::TpOk);
        assert!(tp_manifest_len(m) > 0);

        let mut s = ptr::null_mut();
        let name = CString::new("P").unwrap();
        assert_eq!(tp_manifest_structure(m, name.as_ptr(), &mut s), TpStatus::TpOk);
        assert_eq!(tp_structure_dim(s), 4);

        let mut r = ptr::null_mut();
        assert_eq!(tp_structure_verify(s, &mut r), TpStatus::TpOk);
        assert!(tp_report_passed(r));
        let text = take(tp_report_machine(r));
        assert!(text.contains("structure = PASS"), "{text}");

        let (f, g) = (CString::new("x1").unwrap(), CString::new("x2").unwrap());
        let mut b = ptr::null_mut();
        assert_eq!(tp_structure_bracket(s, f.as_ptr(), g.as_ptr(), &mut b), TpStatus::TpOk);
        assert_eq!(take(b), "x3");

        let bad = CString::new("y9").unwrap();
        assert_eq!(tp_structure_bracket(s, f.as_ptr(), bad.as_ptr(), &mut b), TpStatus::TpInput);
        assert!(last_error().starts_with("UnknownVariable"), "{}", last_error());

        let missing = CString::new("Q").unwrap();
        let mut s2 = ptr::null_mut();
        assert_eq!(tp_manifest_structure(m, missing.as_ptr(), &mut s2), TpStatus::TpNotFound);
        assert!(s2.is_null());

        tp_report_free(r);
        tp_structure_free(s);
        tp_manifest_free(m);
    }
}

#[test]
fn broken_structure_fails_verification() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(tp_manifest_load(fixture("golden_r4_broken.man").as_ptr(), TpConvention::TpConventionPairing, &mut m), TpStatus::TpOk);
        let mut s = ptr::null_mut();
        let name = CString::new("P").unwrap();
        assert_eq!(tp_manifest_structure(m, name.as_ptr(), &mut s), TpStatus::TpOk);
        let mut r = ptr::null_mut();
        assert_eq!(tp_structure_verify(s, &mut r), TpStatus::TpOk);
        assert!(!tp_report_passed(r));
        assert!(take(tp_report_machine(r)).contains(".witness = "));
        tp_report_free(r);
        tp_structure_free(s);
        tp_manifest_free(m);
    }
}

#[test]
fn manifest_errors_carry_messages() {
    unsafe {
        let mut m = ptr::null_mut();
        let src = CString::new("chart C : x y\ntensor T on C kind mv deg 2 { (2,1) = x }\n").unwrap();
        assert_eq!(tp_manifest_parse(src.as_ptr(), TpConvention::TpConventionNormalized, &mut m), TpStatus::TpInput);
        assert!(m.is_null());
        assert!(last_error().contains("line 2"), "{}", last_error());

        let missing = CString::new("/nonexistent/x.man").unwrap();
        assert_eq!(tp_manifest_load(missing.as_ptr(), TpConvention::TpConventionPairing, &mut m), TpStatus::TpInput);
        assert!(last_error().starts_with("Io"));

        assert_eq!(tp_manifest_load(fixture("sympl2.man").as_ptr(), TpConvention::TpConventionPairing, &mut m), TpStatus::TpOk);
        let (name, w) = (CString::new("S").unwrap(), CString::new("w").unwrap());
        let mut s = ptr::null_mut();
        assert_eq!(tp_manifest_structure(m, name.as_ptr(), &mut s), TpStatus::TpOk);
        assert_eq!(tp_structure_dim(s), 2);
        tp_structure_free(s);
        assert_eq!(tp_manifest_structure(m, w.as_ptr(), &mut s), TpStatus::TpNotFound);
        assert!(last_error().contains("not a structure"));
        tp_manifest_free(m);
    }
}

#[test]
fn run_captures_cli_streams() {
    let path = fixture("golden_r4_broken.man");
    let args: Vec<CString> = ["twpoisson", "verify"].iter().map(|a| CString::new(*a).unwrap()).chain([path]).collect();
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    unsafe {
        let (mut out, mut err) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(tp_run(argv.len() as i32, argv.as_ptr(), &mut out, &mut err), 1);
        assert!(take(out).contains("verdict: FAIL"));
        assert_eq!(take(err), "");

        let usage: Vec<CString> = ["twpoisson", "verify"].iter().map(|a| CString::new(*a).unwrap()).collect();
        let argv: Vec<*const c_char> = usage.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(tp_run(argv.len() as i32, argv.as_ptr(), ptr::null_mut(), &mut err), 2);
        assert!(!take(err).is_empty());
        assert_eq!(tp_run(1, ptr::null(), ptr::null_mut(), ptr::null_mut()), -1);
    }
}

/// Builds the static library, then compiles and runs a C program against the generated header.
#[test]
fn header_links_from_c() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include/twisted_poisson.h");
    assert!(header.exists(), "header not generated");
    let target = root.join("../../target").join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let built = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "-p", "twisted-poisson-ffi"])
        .args(if cfg!(debug_assertions) { &[][..] } else { &["--release"][..] })
        .current_dir(&root)
        .status()
        .expect("cargo runs");
    assert!(built.success());
    let lib = target.join("libtwisted_poisson_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let st = Command::new(cc)
        .arg(root.join("tests/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(st.success());
    let o = Command::new(&exe).arg(fixture("golden_r4.man").to_str().unwrap()).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x3"));
    assert!(lines.next().unwrap().starts_with("UnknownVariable"));
}
