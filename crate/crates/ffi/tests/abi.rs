use std::ffi::{CStr, CString};
use std::ptr;

use lpcc_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { lpcc_string_free(s) };
    out
}

fn named(name: &str) -> *mut LpccStateSet {
    let name = CString::new(name).unwrap();
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { lpcc_stateset_named(name.as_ptr(), 0, &mut set) }, LpccStatus::Ok);
    set
}

#[test]
fn set_round_trip() {
    let set = named("S1");
    let mut n = 0;
    assert_eq!(unsafe { lpcc_stateset_len(set, &mut n) }, LpccStatus::Ok);
    assert_eq!(n, 9);
    let mut ok = false;
    assert_eq!(unsafe { lpcc_check_orthogonality(set, &mut ok) }, LpccStatus::Ok);
    assert!(ok);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lpcc_stateset_to_json(set, &mut json) }, LpccStatus::Ok);
    let json = CString::new(take(json)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { lpcc_stateset_from_json(json.as_ptr(), &mut back) }, LpccStatus::Ok);
    let mut m = 0;
    unsafe { lpcc_stateset_len(back, &mut m) };
    assert_eq!(m, 9);
    unsafe {
        lpcc_stateset_free(set);
        lpcc_stateset_free(back);
    }
}

#[test]
fn errors_are_reported() {
    let mut set = ptr::null_mut();
    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { lpcc_stateset_named(bad.as_ptr(), 0, &mut set) }, LpccStatus::InvalidArgument);
    assert!(set.is_null());
    assert!(!lpcc_last_error().is_null());
    assert_eq!(unsafe { lpcc_stateset_named(ptr::null(), 0, &mut set) }, LpccStatus::NullPointer);
    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { lpcc_stateset_from_json(junk.as_ptr(), &mut set) }, LpccStatus::Parse);
    let mut n = 0;
    assert_eq!(unsafe { lpcc_stateset_len(ptr::null(), &mut n) }, LpccStatus::NullPointer);
    let s = named("S1");
    assert_eq!(unsafe { lpcc_stateset_len(s, &mut n) }, LpccStatus::Ok);
    assert!(lpcc_last_error().is_null());
    unsafe { lpcc_stateset_free(s) };
}

#[test]
fn solver_and_activation_json() {
    let s2 = named("S2");
    let c = CString::new("C").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { lpcc_solve_rank1_json(s2, c.as_ptr(), true, &mut out) }, LpccStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 3);

    let (g, pvm, p) = (CString::new("BC").unwrap(), CString::new("00,02,11;01,10,12").unwrap(), CString::new("A|BC").unwrap());
    assert_eq!(unsafe { lpcc_verify_activation_json(s2, g.as_ptr(), pvm.as_ptr(), p.as_ptr(), &mut out) }, LpccStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["activated"], true);

    assert_eq!(unsafe { lpcc_protocol_search_json(s2, ptr::null(), 3, &mut out) }, LpccStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["status"], "distinguishable");

    let bad = CString::new("B").unwrap();
    let wrong = CString::new("0;1").unwrap();
    let st = unsafe { lpcc_verify_activation_json(s2, bad.as_ptr(), wrong.as_ptr(), ptr::null(), &mut out) };
    assert_ne!(st, LpccStatus::Ok);
    unsafe { lpcc_stateset_free(s2) };
}

#[test]
fn classify_and_theorem() {
    let s1 = named("S1");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { lpcc_classify_json(s1, ptr::null(), &mut out) }, LpccStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["class"], "TYPE-I");
    unsafe { lpcc_stateset_free(s1) };

    let mut status = -1;
    assert_eq!(unsafe { lpcc_theorem(4, &mut status, &mut out) }, LpccStatus::Ok);
    assert_eq!(status, 0);
    assert!(take(out).contains("Theorem 4"));
    assert_eq!(unsafe { lpcc_theorem(9, &mut status, ptr::null_mut()) }, LpccStatus::InvalidArgument);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lpcc.h")).unwrap();
    for f in [
        "lpcc_last_error",
        "lpcc_string_free",
        "lpcc_stateset_named",
        "lpcc_stateset_from_json",
        "lpcc_stateset_to_json",
        "lpcc_stateset_len",
        "lpcc_stateset_free",
        "lpcc_check_orthogonality",
        "lpcc_solve_rank1_json",
        "lpcc_protocol_search_json",
        "lpcc_verify_activation_json",
        "lpcc_classify_json",
        "lpcc_theorem",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing");
    }
    assert!(header.contains("typedef struct LpccStateSet LpccStateSet"));
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let src = std::env::temp_dir().join("lpcc_header_check.c");
    std::fs::write(&src, "#include \"lpcc.h\"\nint main(void) { return lpcc_last_error() != 0; }\n").unwrap();
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success()),
        Err(_) => eprintln!("no C compiler, skipped"),
    }
}
