use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use loj_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    loj_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = loj_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn parse_print_free() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(loj_poly_parse(c("(x+y)^2").as_ptr(), c("x,y").as_ptr(), &mut p), LojStatus::Ok);
        assert!(loj_last_error_message().is_null());
        assert_eq!(loj_poly_nvars(p), 2);
        let mut s = ptr::null_mut();
        assert_eq!(loj_poly_to_string(p, &mut s), LojStatus::Ok);
        let text = take(s);
        assert!(text.contains("2*x*y"), "{text}");
        loj_poly_free(p);
        loj_poly_free(ptr::null_mut());
        loj_string_free(ptr::null_mut());
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(loj_poly_parse(c("x +* y").as_ptr(), c("x,y").as_ptr(), &mut p), LojStatus::Parse);
        assert!(p.is_null());
        assert!(last_error().contains("syntax"));
        assert_eq!(loj_poly_parse(c("x + w").as_ptr(), c("x,y").as_ptr(), &mut p), LojStatus::Parse);
        assert!(last_error().contains('w'));
        assert_eq!(loj_poly_parse(ptr::null(), c("x").as_ptr(), &mut p), LojStatus::NullArgument);
        assert_eq!(loj_poly_parse(c("x").as_ptr(), c("x").as_ptr(), ptr::null_mut()), LojStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(loj_poly_parse(bad.as_ptr().cast(), c("x").as_ptr(), &mut p), LojStatus::InvalidUtf8);
        let mut s = ptr::null_mut();
        assert_eq!(loj_poly_to_string(ptr::null(), &mut s), LojStatus::NullArgument);
        assert_eq!(loj_exponent_wsqh(c("1/2,1/2,1/2,0").as_ptr(), &mut s), LojStatus::Parse);
    }
}

#[test]
fn milnor_through_the_abi() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(loj_poly_parse(c("x^3 + y^4").as_ptr(), c("x,y").as_ptr(), &mut p), LojStatus::Ok);
        let (mut mu, mut finite) = (0u64, false);
        assert_eq!(loj_milnor(p, 32, &mut mu, &mut finite), LojStatus::Ok);
        assert!(finite);
        assert_eq!(mu, 6);
        loj_poly_free(p);
        assert_eq!(loj_poly_parse(c("x^2*y").as_ptr(), c("x,y").as_ptr(), &mut p), LojStatus::Ok);
        assert_eq!(loj_milnor(p, 32, &mut mu, &mut finite), LojStatus::Ok);
        assert!(!finite);
        assert_eq!(mu, 0);
        loj_poly_free(p);
    }
}

#[test]
fn exponent_of_a_type() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(loj_exponent_wsqh(c("-2,3,1/3").as_ptr(), &mut s), LojStatus::Ok);
        assert_eq!(take(s), "2");
        assert_eq!(loj_exponent_wsqh(c("1/2,1/5,1/2").as_ptr(), &mut s), LojStatus::Ok);
        assert_eq!(take(s), "4");
    }
}

#[test]
fn analysis_json_is_deterministic() {
    unsafe {
        let mut p = ptr::null_mut();
        let f = c("x*y + x^4*y^3 + (z+y)^3");
        assert_eq!(loj_poly_parse(f.as_ptr(), c("x,y,z").as_ptr(), &mut p), LojStatus::Ok);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(loj_analyze_json(p, ptr::null(), 7, &mut a), LojStatus::Ok);
        assert_eq!(loj_analyze_json(p, ptr::null(), 7, &mut b), LojStatus::Ok);
        let (a, b) = (take(a), take(b));
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["agreement"]["value"], "2");
        let mut s = ptr::null_mut();
        assert_eq!(loj_analyze_json(p, c("1/2,1/2").as_ptr(), 0, &mut s), LojStatus::Parse);
        loj_poly_free(p);
        assert!(!CStr::from_ptr(loj_version()).to_str().unwrap().is_empty());
    }
}

fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/loj.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for name in ["loj_poly_parse", "loj_poly_free", "loj_analyze_json", "loj_milnor", "loj_last_error_message", "LOJ_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let lib = profile_dir().join("libloj_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping C link check: no C compiler or static library");
        return;
    }
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("loj_smoke.c");
    let bin = dir.join("loj_smoke");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "loj.h"
int main(void) {
    LojPoly *p = NULL;
    if (loj_poly_parse("x^2 + y^3", "x,y", &p) != LOJ_STATUS_OK) return 10;
    uint64_t mu = 0; bool finite = false;
    if (loj_milnor(p, 32, &mu, &finite) != LOJ_STATUS_OK || !finite || mu != 2) return 11;
    char *e = NULL;
    if (loj_exponent_wsqh("1/2,1/3", &e) != LOJ_STATUS_OK || strcmp(e, "2") != 0) return 12;
    loj_string_free(e);
    if (loj_poly_parse("x +", "x", &p) != LOJ_STATUS_PARSE) return 13;
    if (loj_last_error_message() == NULL) return 14;
    loj_poly_free(p);
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C smoke test exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
