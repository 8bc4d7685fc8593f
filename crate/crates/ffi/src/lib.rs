//! C interface to `scissors-core`.
//!
//! Rings and groups are opaque handles created by `sc_*_new`/`sc_group_compute`
//! and released with the matching `_free`. Every fallible call returns an
//! [`ScStatus`]; the message of the last failure on the calling thread is
//! available from [`sc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_traits::ToPrimitive;
use scissors_core::global::{k3_image_formula, pbar_order, GlobalFieldDesc};
use scissors_core::groups::{compute_group, GroupName};
use scissors_core::linalg::FpAb;
use scissors_core::ring::RingHandle;
use scissors_core::tree::{amalgam_decompose, Mat2};
use scissors_core::verify;

/// Status codes returned by fallible functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidRing = 3,
    InvalidArgument = 4,
    ComputationFailed = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Opaque finite local ring.
pub struct ScRing(RingHandle);

/// Opaque finitely presented abelian group.
pub struct ScGroup(FpAb);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: ScStatus, msg: impl Into<String>) -> ScStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ScStatus) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(ScStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, ScStatus> {
    if s.is_null() {
        return Err(fail(ScStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(ScStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Copy of the last error message on this thread, or NULL. Free with [`sc_string_free`].
#[no_mangle]
pub extern "C" fn sc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a ring descriptor such as `gf(7)`, `gf(3^2)`, `z/49` or `gf(5)[t]/t^2`.
///
/// # Safety
/// `desc` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_ring_new(desc: *const c_char, out: *mut *mut ScRing) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return fail(ScStatus::NullPointer, "null output pointer");
        }
        let d = match read_str(desc) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match RingHandle::parse(d) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(ScRing(r)));
                ScStatus::Ok
            }
            Err(e) => fail(ScStatus::InvalidRing, format!("ring '{d}': {e}")),
        }
    })
}

/// # Safety
/// `r` must come from [`sc_ring_new`] and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sc_ring_free(r: *mut ScRing) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of elements, or 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a live ring handle.
#[no_mangle]
pub unsafe extern "C" fn sc_ring_size(r: *const ScRing) -> u64 {
    r.as_ref().map_or(0, |r| r.0.size())
}

/// Order of the residue field, or 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a live ring handle.
#[no_mangle]
pub unsafe extern "C" fn sc_ring_residue_order(r: *const ScRing) -> u64 {
    r.as_ref().map_or(0, |r| r.0.residue_order())
}

/// Computes a named group (`P`, `B`, `RP1`, `RB`, `GW`, `I`, `H3`, `RP~`, ...).
///
/// # Safety
/// `r` must be a live ring handle, `name` a nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_group_compute(r: *const ScRing, name: *const c_char, out: *mut *mut ScGroup) -> ScStatus {
    guard(|| {
        let (Some(r), false) = (r.as_ref(), out.is_null()) else {
            return fail(ScStatus::NullPointer, "null ring or output pointer");
        };
        let n = match read_str(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let which: GroupName = match n.parse() {
            Ok(w) => w,
            Err(e) => return fail(ScStatus::InvalidArgument, e),
        };
        match compute_group(which, &r.0) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(ScGroup(g)));
                ScStatus::Ok
            }
            Err(e) => fail(ScStatus::ComputationFailed, e),
        }
    })
}

/// # Safety
/// `g` must come from [`sc_group_compute`] and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sc_group_free(g: *mut ScGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of finite invariant factors.
///
/// # Safety
/// `g` must be NULL or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn sc_group_num_invariants(g: *const ScGroup) -> usize {
    g.as_ref().map_or(0, |g| g.0.invariant_factors().len())
}

/// The `i`-th invariant factor `d_1 | d_2 | ...`.
///
/// # Safety
/// `g` must be a live group handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_group_invariant(g: *const ScGroup, i: usize, out: *mut u64) -> ScStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return fail(ScStatus::NullPointer, "null group or output pointer");
        };
        match g.0.invariant_factors().get(i).map(|d| d.to_u64()) {
            Some(Some(d)) => {
                *out = d;
                ScStatus::Ok
            }
            Some(None) => fail(ScStatus::OutOfRange, "invariant factor exceeds u64"),
            None => fail(ScStatus::OutOfRange, format!("index {i} out of range")),
        }
    })
}

/// Rank of the free part.
///
/// # Safety
/// `g` must be NULL or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn sc_group_free_rank(g: *const ScGroup) -> usize {
    g.as_ref().map_or(0, |g| g.0.free_rank())
}

/// Order of the odd torsion subgroup.
///
/// # Safety
/// `g` must be a live group handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_group_odd_order(g: *const ScGroup, out: *mut u64) -> ScStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return fail(ScStatus::NullPointer, "null group or output pointer");
        };
        match g.0.odd_torsion_order().to_u64() {
            Some(n) => {
                *out = n;
                ScStatus::Ok
            }
            None => fail(ScStatus::OutOfRange, "order exceeds u64"),
        }
    })
}

/// Human-readable structure such as `Z/2 + Z`. Free with [`sc_string_free`].
///
/// # Safety
/// `g` must be NULL or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn sc_group_structure(g: *const ScGroup) -> *mut c_char {
    g.as_ref().map_or(ptr::null_mut(), |g| into_c(g.0.structure()))
}

/// Odd order of `P̄(F_p)` for `F = Q`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_pbar_odd_order(p: u64, out: *mut u64) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return fail(ScStatus::NullPointer, "null output pointer");
        }
        match pbar_order(&GlobalFieldDesc::rationals(), p) {
            Ok(r) => {
                *out = r.pbar_odd_order;
                ScStatus::Ok
            }
            Err(e) => fail(ScStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// `gcd(w2, (q+1)/2)`, or `gcd(w2, q+1)` when `char2` is set.
#[no_mangle]
pub extern "C" fn sc_k3_image_order(w2: u64, q: u64, char2: bool) -> u64 {
    k3_image_formula(w2, q, char2)
}

/// Length of the amalgam word of a matrix `a,b;c,d` in `SL_2(Z[1/p])`.
///
/// # Safety
/// `matrix` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_amalgam_length(p: u64, matrix: *const c_char, out: *mut usize) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return fail(ScStatus::NullPointer, "null output pointer");
        }
        let m = match read_str(matrix) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let g = match Mat2::parse(m) {
            Ok(g) => g,
            Err(e) => return fail(ScStatus::InvalidArgument, e.to_string()),
        };
        match amalgam_decompose(&g, p) {
            Ok(w) if w.product() == g => {
                *out = w.len();
                ScStatus::Ok
            }
            Ok(_) => fail(ScStatus::ComputationFailed, "product check failed"),
            Err(e) => fail(ScStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Runs a verification suite; `passed` receives whether every check held.
///
/// # Safety
/// `suite` and `ring` must be nul-terminated strings and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_verify(suite: *const c_char, ring: *const c_char, seed: u64, passed: *mut bool) -> ScStatus {
    guard(|| {
        if passed.is_null() {
            return fail(ScStatus::NullPointer, "null output pointer");
        }
        let (s, r) = match (read_str(suite), read_str(ring)) {
            (Ok(s), Ok(r)) => (s, r),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        match verify::run_suite(s, r, seed) {
            Ok(checks) => {
                *passed = verify::all_passed(&checks);
                ScStatus::Ok
            }
            Err(e) => fail(ScStatus::InvalidArgument, e),
        }
    })
}
