//! C ABI over the `recdiff` library.
//!
//! Every fallible function returns a [`RecdiffStatus`]; on failure the
//! message is available from [`recdiff_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use recdiff::asymptotics::main_term;
use recdiff::counting::count_t_s_with;
use recdiff::matveev::{matveev_lower_bound, MatveevInput};
use recdiff::spectral::{analyze, SequenceAnalysis};
use recdiff::{Error, LinearRecurrence};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecdiffStatus {
    Ok = 0,
    Usage = 1,
    CutoffUnsafe = 2,
    PrecisionExhausted = 3,
    InvalidInput = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque sequence handle.
pub struct RecdiffSequence {
    seq: LinearRecurrence,
    analysis: Option<SequenceAnalysis>,
}

impl RecdiffSequence {
    fn analysis(&mut self) -> Result<&SequenceAnalysis, Error> {
        if self.analysis.is_none() {
            self.analysis = Some(analyze(&self.seq)?);
        }
        Ok(self.analysis.as_ref().expect("just set"))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Status(RecdiffStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(RecdiffStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RecdiffStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RecdiffStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            match e.exit_code() {
                2 => RecdiffStatus::CutoffUnsafe,
                3 => RecdiffStatus::PrecisionExhausted,
                _ => RecdiffStatus::InvalidInput,
            }
        }
        Err(_) => {
            set_error("internal panic");
            RecdiffStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Status(RecdiffStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

fn boxed(seq: LinearRecurrence, out: *mut *mut RecdiffSequence) {
    let handle = Box::new(RecdiffSequence { seq, analysis: None });
    unsafe { *out = Box::into_raw(handle) };
}

/// Creates a sequence `U_{n+k} = c_1 U_{n+k-1} + ... + c_k U_n`.
///
/// # Safety
/// `coefficients` and `initial_terms` must point to `order` readable values;
/// `out` must be writable. Free the result with [`recdiff_sequence_free`].
#[no_mangle]
pub unsafe extern "C" fn recdiff_sequence_new(
    coefficients: *const i64,
    initial_terms: *const i64,
    order: usize,
    out: *mut *mut RecdiffSequence,
) -> RecdiffStatus {
    guard(|| {
        if coefficients.is_null() || initial_terms.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let c = std::slice::from_raw_parts(coefficients, order);
        let u = std::slice::from_raw_parts(initial_terms, order);
        let seq = LinearRecurrence::new("custom", c.iter().copied(), u.iter().copied())?;
        boxed(seq, out);
        Ok(())
    })
}

/// Looks up `fib`, `lucas`, `pow2`, `pow3` or `tribonacci`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn recdiff_sequence_builtin(name: *const c_char, out: *mut *mut RecdiffSequence) -> RecdiffStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = str_arg(name, "name")?;
        let seq = LinearRecurrence::builtin(name)
            .ok_or_else(|| Failure::Status(RecdiffStatus::Usage, format!("unknown built-in sequence '{name}'")))?;
        boxed(seq, out);
        Ok(())
    })
}

/// # Safety
/// `seq` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn recdiff_sequence_free(seq: *mut RecdiffSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Writes `U_n` as a decimal string. Free it with [`recdiff_string_free`].
///
/// # Safety
/// `seq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn recdiff_sequence_term(seq: *const RecdiffSequence, n: u64, out: *mut *mut c_char) -> RecdiffStatus {
    guard(|| {
        let seq = seq.as_ref().ok_or_else(|| null("seq"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let n = usize::try_from(n).map_err(|_| Failure::Status(RecdiffStatus::InvalidInput, "index too large".into()))?;
        let s = CString::new(seq.seq.term(n).to_string()).expect("digits contain no nul");
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn recdiff_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact `T(x)` and `S(x)` for a decimal integer `x >= 0`.
///
/// # Safety
/// `u`, `v` must be live handles, `x` nul-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn recdiff_count(
    u: *mut RecdiffSequence,
    v: *mut RecdiffSequence,
    x: *const c_char,
    out_t: *mut u64,
    out_s: *mut u64,
) -> RecdiffStatus {
    guard(|| {
        if out_t.is_null() || out_s.is_null() {
            return Err(null("output"));
        }
        let x: BigInt =
            str_arg(x, "x")?.trim().parse().map_err(|_| Failure::Status(RecdiffStatus::InvalidInput, "x is not an integer".into()))?;
        let u = u.as_mut().ok_or_else(|| null("u"))?;
        let v = v.as_mut().ok_or_else(|| null("v"))?;
        let au = u.analysis()?.clone();
        let av = v.analysis()?.clone();
        let r = count_t_s_with(&u.seq, &au, &v.seq, &av, &x)?;
        *out_t = r.t;
        *out_s = r.s;
        Ok(())
    })
}

/// Main term `(log x)^2 / (log|α| · log|β|)`.
///
/// # Safety
/// `u`, `v` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn recdiff_main_term(u: *mut RecdiffSequence, v: *mut RecdiffSequence, x: f64, out: *mut f64) -> RecdiffStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let u = u.as_mut().ok_or_else(|| null("u"))?;
        let v = v.as_mut().ok_or_else(|| null("v"))?;
        let eu = u.analysis()?.envelope.clone();
        let ev = v.analysis()?.envelope.clone();
        *out = main_term(&eu, &ev, x);
        Ok(())
    })
}

/// Matveev lower bound for `log|Λ|` with `t` logarithms.
///
/// # Safety
/// `a` must point to `t` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn recdiff_matveev_lower_bound(t: usize, d: u32, b: f64, a: *const f64, out: *mut f64) -> RecdiffStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let a = std::slice::from_raw_parts(a, t).to_vec();
        let input = MatveevInput::new(t, d, b, a)?;
        *out = matveev_lower_bound(&input)?;
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn recdiff_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn recdiff_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
