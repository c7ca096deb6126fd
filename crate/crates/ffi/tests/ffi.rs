use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use disco_ffi::*;

fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { disco_string_free(p) };
    s
}

fn exec(s: *mut DiscoSession, line: &str) -> (DiscoStatus, String) {
    let line = CString::new(line).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { disco_session_exec(s, line.as_ptr(), &mut out) };
    (st, if out.is_null() { String::new() } else { take(out) })
}

fn load(s: *mut DiscoSession, name: &str, src: &str) -> (DiscoStatus, String) {
    let (name, src) = (CString::new(name).unwrap(), CString::new(src).unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe { disco_session_load(s, name.as_ptr(), src.as_ptr(), &mut out) };
    (st, take(out))
}

#[test]
fn exec_and_load_round_trip() {
    let s = disco_session_new(true);
    assert_eq!(
        exec(s, ":type \\x. x - 2"),
        (DiscoStatus::Ok, "λx. x - 2 : ℤ → ℤ".into())
    );
    assert_eq!(exec(s, "(\\x. x - 2) (5/2)"), (DiscoStatus::Ok, "1/2".into()));

    let (st, report) = load(s, "sq.disco", "!!! sq(3) == 9\nsq : N -> N\nsq(n) = n * n\n");
    assert_eq!(st, DiscoStatus::Ok);
    assert!(report.contains("sq: OK"), "{report}");
    assert_eq!(exec(s, "sq(12)").1, "144");

    let (st, report) = load(s, "bad.disco", "!!! sq(3) == 10\nsq : N -> N\nsq(n) = n * n\n");
    assert_eq!(st, DiscoStatus::LoadFailed);
    assert!(report.contains("Certainly false"), "{report}");
    unsafe { disco_session_free(s) };
}

#[test]
fn errors_are_output_not_status() {
    let s = disco_session_new(true);
    let (st, text) = exec(s, "x + 3");
    assert_eq!(st, DiscoStatus::Ok);
    assert!(text.ends_with("reference/unbound.html"), "{text}");
    unsafe { disco_session_free(s) };
}

#[test]
fn json_blocks() {
    let s = disco_session_new(true);
    let line = CString::new("each(3, [1,2,3])").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { disco_session_exec_json(s, line.as_ptr(), &mut out) },
        DiscoStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v[0]["kind"], "error");
    assert_eq!(
        v[0]["docURL"],
        "https://disco-lang.readthedocs.io/en/latest/reference/shape-mismatch.html"
    );
    unsafe { disco_session_free(s) };
}

#[test]
fn settings() {
    let s = disco_session_new(true);
    assert_eq!(unsafe { disco_session_set_ascii(s, true) }, DiscoStatus::Ok);
    assert_eq!(exec(s, ":type \\x. x - 2").1, "\\x. x - 2 : Z -> Z");
    assert_eq!(unsafe { disco_session_set_seed(s, 9) }, DiscoStatus::Ok);
    unsafe { disco_session_free(s) };
}

#[test]
fn bad_arguments() {
    let mut out = ptr::null_mut();
    let st = unsafe { disco_session_exec(ptr::null_mut(), c"1".as_ptr(), &mut out) };
    assert_eq!(st, DiscoStatus::NullArgument);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(disco_last_error()) };
    assert!(msg.to_str().unwrap().contains("null"));

    let s = disco_session_new(true);
    let invalid = [0xffu8, 0xfe, 0];
    let st = unsafe { disco_session_exec(s, invalid.as_ptr().cast(), &mut out) };
    assert_eq!(st, DiscoStatus::InvalidUtf8);
    assert_eq!(
        unsafe { disco_session_set_seed(ptr::null_mut(), 1) },
        DiscoStatus::NullArgument
    );
    unsafe {
        disco_session_free(s);
        disco_session_free(ptr::null_mut());
        disco_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(disco_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Build a C program against the generated header and the static library.
#[test]
fn header_compiles_and_links() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libdisco_ffi.a");
    if !lib.exists() {
        panic!("static library not found at {}", lib.display());
    }
    let exe = profile_dir.join("disco_c_smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(dir.join("tests/c_smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap_or_else(|e| panic!("could not run {cc}: {e}"));
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
