use std::ffi::{CStr, CString};
use std::ptr;

use recdiff_ffi::*;

fn builtin(name: &str) -> *mut RecdiffSequence {
    let name = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { recdiff_sequence_builtin(name.as_ptr(), &mut out) }, RecdiffStatus::Ok);
    out
}

fn last_error() -> String {
    let p = recdiff_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn count_through_c_abi() {
    let u = builtin("fib");
    let v = builtin("pow2");
    let x = CString::new("10").unwrap();
    let (mut t, mut s) = (0u64, 0u64);
    assert_eq!(unsafe { recdiff_count(u, v, x.as_ptr(), &mut t, &mut s) }, RecdiffStatus::Ok);
    assert_eq!((t, s), (35, 18));
    let mut main = 0.0;
    assert_eq!(unsafe { recdiff_main_term(u, v, 1e6, &mut main) }, RecdiffStatus::Ok);
    assert!((main - 572.232).abs() < 1e-2);
    unsafe {
        recdiff_sequence_free(u);
        recdiff_sequence_free(v);
    }
}

#[test]
fn terms_are_decimal_strings() {
    let c = [1i64, 1];
    let init = [0i64, 1];
    let mut seq = ptr::null_mut();
    assert_eq!(unsafe { recdiff_sequence_new(c.as_ptr(), init.as_ptr(), 2, &mut seq) }, RecdiffStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { recdiff_sequence_term(seq, 100, &mut s) }, RecdiffStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "354224848179261915075");
    unsafe {
        recdiff_string_free(s);
        recdiff_sequence_free(seq);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let c = [1i64, 0];
    let init = [0i64, 1];
    let mut seq = ptr::null_mut();
    assert_eq!(unsafe { recdiff_sequence_new(c.as_ptr(), init.as_ptr(), 2, &mut seq) }, RecdiffStatus::InvalidInput);
    assert!(last_error().contains("nonzero"));
    assert!(seq.is_null());

    let name = CString::new("nope").unwrap();
    assert_eq!(unsafe { recdiff_sequence_builtin(name.as_ptr(), &mut seq) }, RecdiffStatus::Usage);
    assert_eq!(unsafe { recdiff_sequence_builtin(ptr::null(), &mut seq) }, RecdiffStatus::NullPointer);

    let u = builtin("fib");
    let x = CString::new("-3").unwrap();
    let (mut t, mut s) = (0u64, 0u64);
    assert_eq!(unsafe { recdiff_count(u, u, x.as_ptr(), &mut t, &mut s) }, RecdiffStatus::InvalidInput);
    unsafe { recdiff_sequence_free(u) };
    unsafe { recdiff_sequence_free(ptr::null_mut()) };
}

#[test]
fn matveev_bound() {
    let a = [1.0f64; 3];
    let mut out = 0.0;
    assert_eq!(unsafe { recdiff_matveev_lower_bound(3, 2, 100.0, a.as_ptr(), &mut out) }, RecdiffStatus::Ok);
    assert!((out / -6.1006e15 - 1.0).abs() < 1e-4, "{out}");
    assert_eq!(unsafe { recdiff_matveev_lower_bound(3, 2, 0.5, a.as_ptr(), &mut out) }, RecdiffStatus::InvalidInput);
    assert!(!recdiff_last_error().is_null());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(recdiff_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/recdiff.h")).unwrap();
    for f in [
        "recdiff_sequence_new",
        "recdiff_sequence_builtin",
        "recdiff_sequence_free",
        "recdiff_sequence_term",
        "recdiff_string_free",
        "recdiff_count",
        "recdiff_main_term",
        "recdiff_matveev_lower_bound",
        "recdiff_last_error",
        "recdiff_version",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
    assert!(header.contains("typedef struct RecdiffSequence RecdiffSequence;"));
}
