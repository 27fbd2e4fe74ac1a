//! C interface to `cbd-core`.
//!
//! Systems and analyses are opaque handles created by `cbd_*` functions and
//! released with the matching `*_free`. Every fallible function returns a
//! [`CbdStatus`]; on failure `cbd_last_error` describes the problem. Strings
//! handed out by the library are released with [`cbd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cbd_core::coupling::{decide_contextuality, AnalysisResult, CouplingError};
use cbd_core::cyclic::{cyclic_criterion, detect_cyclic, CyclicVerdict};
use cbd_core::dsl::{self, ParseError};
use cbd_core::rational::format_rational;
use cbd_core::report::{build_report, ReportOptions};
use cbd_core::system::{is_consistently_connected, validate, System};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    SizeGuard = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbdCyclicVerdict {
    NotCyclic = 0,
    Contextual = 1,
    Noncontextual = 2,
    NotApplicable = 3,
}

/// A parsed system.
pub struct CbdSystem {
    system: System,
}

/// The result of deciding contextuality.
pub struct CbdAnalysis {
    result: AnalysisResult,
}

struct Failure(CbdStatus, String);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `body`, turning errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CbdStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CbdStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal error".into());
            CbdStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CbdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| Failure(CbdStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(CbdStatus::Internal, e.to_string()))?;
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(c.into_raw());
    Ok(())
}

fn parse_failure(e: ParseError) -> Failure {
    let status = match e {
        ParseError::Invalid(_) => CbdStatus::Invalid,
        _ => CbdStatus::Parse,
    };
    Failure(status, e.to_string())
}

fn coupling_failure(e: CouplingError) -> Failure {
    let status = match e {
        CouplingError::Invalid(_) => CbdStatus::Invalid,
        CouplingError::TooLarge { .. } => CbdStatus::SizeGuard,
        _ => CbdStatus::Internal,
    };
    Failure(status, e.to_string())
}

unsafe fn parse_into(
    source: *const c_char,
    out: *mut *mut CbdSystem,
    parse: fn(&str) -> Result<System, ParseError>,
) -> CbdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let system = parse(text(source, "source")?).map_err(parse_failure)?;
        put(out, Box::into_raw(Box::new(CbdSystem { system })), "out")
    })
}

/// Parses and validates a system document. On success `*out` owns a new system.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_system_parse(source: *const c_char, out: *mut *mut CbdSystem) -> CbdStatus {
    parse_into(source, out, dsl::parse)
}

/// Parses a document without checking system invariants; see
/// `cbd_system_violation_count`.
///
/// # Safety
/// As for `cbd_system_parse`.
#[no_mangle]
pub unsafe extern "C" fn cbd_system_parse_unchecked(source: *const c_char, out: *mut *mut CbdSystem) -> CbdStatus {
    parse_into(source, out, dsl::parse_unchecked)
}

/// Releases a system. Null is ignored.
///
/// # Safety
/// `system` must come from a `cbd_system_parse*` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cbd_system_free(system: *mut CbdSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Writes the canonical document of `system` to `*out`.
///
/// # Safety
/// `system` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_system_serialize(system: *const CbdSystem, out: *mut *mut c_char) -> CbdStatus {
    guard(|| put_string(out, dsl::serialize(&handle(system, "system")?.system)))
}

/// Writes the number of broken invariants to `*count`; zero means valid.
///
/// # Safety
/// `system` must be a live handle and `count` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_system_violation_count(system: *const CbdSystem, count: *mut usize) -> CbdStatus {
    guard(|| put(count, validate(&handle(system, "system")?.system).violations.len(), "count"))
}

/// Decides contextuality. On success `*out` owns a new analysis.
///
/// # Safety
/// `system` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_analyze(system: *const CbdSystem, out: *mut *mut CbdAnalysis) -> CbdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let result = decide_contextuality(&handle(system, "system")?.system).map_err(coupling_failure)?;
        put(out, Box::into_raw(Box::new(CbdAnalysis { result })), "out")
    })
}

/// Releases an analysis. Null is ignored.
///
/// # Safety
/// `analysis` must come from `cbd_analyze` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cbd_analysis_free(analysis: *mut CbdAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_analysis_contextual(analysis: *const CbdAnalysis, out: *mut bool) -> CbdStatus {
    guard(|| put(out, handle(analysis, "analysis")?.result.contextual, "out"))
}

/// Writes `max_total - attained_total` as a `p/q` string.
///
/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_analysis_delta(analysis: *const CbdAnalysis, out: *mut *mut c_char) -> CbdStatus {
    guard(|| put_string(out, format_rational(&handle(analysis, "analysis")?.result.delta)))
}

/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_analysis_max_total(analysis: *const CbdAnalysis, out: *mut *mut c_char) -> CbdStatus {
    guard(|| put_string(out, format_rational(&handle(analysis, "analysis")?.result.max_total)))
}

/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_analysis_attained_total(
    analysis: *const CbdAnalysis,
    out: *mut *mut c_char,
) -> CbdStatus {
    guard(|| put_string(out, format_rational(&handle(analysis, "analysis")?.result.attained_total)))
}

/// Closed-form verdict for cyclic systems.
///
/// # Safety
/// `system` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_cyclic_verdict(system: *const CbdSystem, out: *mut CbdCyclicVerdict) -> CbdStatus {
    guard(|| {
        let system = &handle(system, "system")?.system;
        let verdict = match detect_cyclic(system) {
            None => CbdCyclicVerdict::NotCyclic,
            Some(profile) => {
                let consistent = is_consistently_connected(system)
                    .map_err(|e| Failure(CbdStatus::Invalid, e.to_string()))?
                    .consistent;
                match cyclic_criterion(&profile, consistent) {
                    CyclicVerdict::Contextual => CbdCyclicVerdict::Contextual,
                    CyclicVerdict::Noncontextual => CbdCyclicVerdict::Noncontextual,
                    CyclicVerdict::NotApplicable => CbdCyclicVerdict::NotApplicable,
                }
            }
        };
        put(out, verdict, "out")
    })
}

/// Writes the full JSON report. `full_witness` includes every witness atom.
///
/// # Safety
/// `system` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cbd_report_json(system: *const CbdSystem, full_witness: bool, out: *mut *mut c_char) -> CbdStatus {
    guard(|| {
        let report =
            build_report(&handle(system, "system")?.system, ReportOptions { full_witness }).map_err(coupling_failure)?;
        put_string(out, report.to_json())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cbd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn cbd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
