use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use scissors_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { sc_string_free(s) };
    out
}

fn ring(d: &str) -> *mut ScRing {
    let c = CString::new(d).unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { sc_ring_new(c.as_ptr(), &mut r) }, ScStatus::Ok);
    r
}

fn group(r: *const ScRing, name: &str) -> Result<*mut ScGroup, ScStatus> {
    let c = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    match unsafe { sc_group_compute(r, c.as_ptr(), &mut g) } {
        ScStatus::Ok => Ok(g),
        s => Err(s),
    }
}

#[test]
fn ring_and_group_handles() {
    let r = ring("gf(11)");
    assert_eq!(unsafe { sc_ring_size(r) }, 11);
    assert_eq!(unsafe { sc_ring_residue_order(r) }, 11);
    let g = group(r, "RP1").unwrap();
    let mut odd = 0;
    assert_eq!(unsafe { sc_group_odd_order(g, &mut odd) }, ScStatus::Ok);
    assert_eq!(odd, 3);
    assert_eq!(unsafe { sc_group_num_invariants(g) }, 1);
    let mut d = 0;
    assert_eq!(unsafe { sc_group_invariant(g, 0, &mut d) }, ScStatus::Ok);
    assert_eq!(d, 6);
    assert_eq!(unsafe { sc_group_invariant(g, 5, &mut d) }, ScStatus::OutOfRange);
    assert_eq!(take(unsafe { sc_group_structure(g) }), "Z/6");
    unsafe {
        sc_group_free(g);
        sc_ring_free(r);
    }
}

#[test]
fn witt_groups() {
    let r = ring("gf(7)");
    let g = group(r, "GW").unwrap();
    assert_eq!(unsafe { sc_group_free_rank(g) }, 1);
    assert_eq!(take(unsafe { sc_group_structure(g) }), "Z/2 + Z");
    unsafe {
        sc_group_free(g);
        sc_ring_free(r);
    }
}

#[test]
fn errors_are_reported() {
    let c = CString::new("gf(6)").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { sc_ring_new(c.as_ptr(), &mut r) }, ScStatus::InvalidRing);
    assert!(r.is_null());
    assert!(take(sc_last_error()).contains("gf(6)"));
    assert_eq!(unsafe { sc_ring_new(ptr::null(), &mut r) }, ScStatus::NullPointer);

    let r = ring("gf(7)");
    assert_eq!(group(r, "nope").unwrap_err(), ScStatus::InvalidArgument);
    assert_eq!(group(ptr::null(), "P").unwrap_err(), ScStatus::NullPointer);
    let small = ring("gf(3)");
    assert_eq!(group(small, "P").unwrap_err(), ScStatus::ComputationFailed);
    unsafe {
        sc_ring_free(r);
        sc_ring_free(small);
        sc_ring_free(ptr::null_mut());
        sc_group_free(ptr::null_mut());
        sc_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { sc_ring_size(ptr::null()) }, 0);
}

#[test]
fn numeric_entry_points() {
    let mut n = 0;
    assert_eq!(unsafe { sc_pbar_odd_order(29, &mut n) }, ScStatus::Ok);
    assert_eq!(n, 5);
    assert_eq!(unsafe { sc_pbar_odd_order(7, &mut n) }, ScStatus::InvalidArgument);
    assert_eq!(sc_k3_image_order(24, 11, false), 6);
    assert_eq!(sc_k3_image_order(24, 16, true), 1);

    let m = CString::new("1,0;1/7,1").unwrap();
    let mut len = 0;
    assert_eq!(unsafe { sc_amalgam_length(7, m.as_ptr(), &mut len) }, ScStatus::Ok);
    assert_eq!(len, 3);
    let bad = CString::new("2,0;0,1").unwrap();
    assert_eq!(unsafe { sc_amalgam_length(7, bad.as_ptr(), &mut len) }, ScStatus::InvalidArgument);
}

#[test]
fn verify_suite() {
    let s = CString::new("key-identity").unwrap();
    let r = CString::new("z/7^2").unwrap();
    let mut ok = false;
    assert_eq!(unsafe { sc_verify(s.as_ptr(), r.as_ptr(), 1, &mut ok) }, ScStatus::Ok);
    assert!(ok);
    let s = CString::new("nonsense").unwrap();
    assert_eq!(unsafe { sc_verify(s.as_ptr(), r.as_ptr(), 1, &mut ok) }, ScStatus::InvalidArgument);
}

#[test]
fn header_is_generated_and_compiles() {
    let h = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/scissors.h");
    let text = std::fs::read_to_string(&h).unwrap();
    for f in ["sc_ring_new", "sc_group_compute", "sc_string_free", "SC_STATUS_OK", "typedef struct ScRing ScRing"] {
        assert!(text.contains(f), "{f}");
    }
    if Command::new("cc").arg("--version").output().is_ok() {
        let status = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
            .arg(&h)
            .status()
            .unwrap();
        assert!(status.success());
    }
}
