//! C interface to the qvacheck engine.
//!
//! Handles are opaque and owned by the caller once returned; release them with the matching
//! `*_free` function. Every fallible call returns a [`QvcStatus`]; on failure the message is
//! available from [`qvc_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qvacheck::cartan_data::{Gcm, Level};
use qvacheck::runner::{run, RunOutput, Suite, SuiteConfig};
use qvacheck::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QvcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidGcm = 4,
    WindowOverflow = 5,
    Computation = 6,
    Panic = 7,
}

/// Run configuration.
pub struct QvcConfig {
    inner: SuiteConfig,
}

/// Outcome of a batch run.
pub struct QvcResult {
    output: RunOutput,
    json: CString,
    canonical: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(e: &Error) -> QvcStatus {
    match e {
        Error::InvalidConfig(_) => QvcStatus::InvalidConfig,
        Error::InvalidGcm(_) => QvcStatus::InvalidGcm,
        Error::WindowOverflow { .. } | Error::WeightOverflow { .. } => QvcStatus::WindowOverflow,
        _ => QvcStatus::Computation,
    }
}

fn fail(e: Error) -> QvcStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guarded(f: impl FnOnce() -> QvcStatus) -> QvcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            QvcStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, QvcStatus> {
    if p.is_null() {
        set_error("null pointer");
        return Err(QvcStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        QvcStatus::InvalidUtf8
    })
}

/// Message of the last failed call on this thread. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn qvc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qvc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration for a Cartan matrix (preset name or JSON matrix) and a level
/// ("1", "3/2"), with default windows and every suite selected.
///
/// # Safety
/// `gcm` and `level` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qvc_config_new(gcm: *const c_char, level: *const c_char, out: *mut *mut QvcConfig) -> QvcStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return QvcStatus::NullPointer;
        }
        let (g, l) = match (read_str(gcm), read_str(level)) {
            (Ok(g), Ok(l)) => (g, l),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let gcm: Gcm = match g.parse() {
            Ok(x) => x,
            Err(e) => return fail(e),
        };
        let level: Level = match l.parse() {
            Ok(x) => x,
            Err(e) => return fail(e),
        };
        *out = Box::into_raw(Box::new(QvcConfig {
            inner: SuiteConfig::new(gcm, level),
        }));
        QvcStatus::Ok
    })
}

/// Sets the ħ-order and z-order windows.
///
/// # Safety
/// `cfg` must come from [`qvc_config_new`].
#[no_mangle]
pub unsafe extern "C" fn qvc_config_set_windows(cfg: *mut QvcConfig, n_hbar: u32, m_z: i64) -> QvcStatus {
    guarded(|| {
        let Some(c) = cfg.as_mut() else {
            set_error("null config");
            return QvcStatus::NullPointer;
        };
        c.inner.trunc.n_hbar = n_hbar as usize;
        c.inner.trunc.m_z = m_z;
        QvcStatus::Ok
    })
}

/// Sets the Fock weight cap; 0 restores the per-suite defaults.
///
/// # Safety
/// `cfg` must come from [`qvc_config_new`].
#[no_mangle]
pub unsafe extern "C" fn qvc_config_set_weight_cap(cfg: *mut QvcConfig, cap: u32) -> QvcStatus {
    guarded(|| {
        let Some(c) = cfg.as_mut() else {
            set_error("null config");
            return QvcStatus::NullPointer;
        };
        c.inner.weight_cap = (cap > 0).then_some(cap);
        QvcStatus::Ok
    })
}

/// Selects suites from a comma-separated list of names.
///
/// # Safety
/// `cfg` must come from [`qvc_config_new`]; `suites` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qvc_config_set_suites(cfg: *mut QvcConfig, suites: *const c_char) -> QvcStatus {
    guarded(|| {
        let Some(c) = cfg.as_mut() else {
            set_error("null config");
            return QvcStatus::NullPointer;
        };
        let list = match read_str(suites) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse::<Suite>).collect() {
            Ok(v) => {
                c.inner.suites = v;
                QvcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `cfg` must come from [`qvc_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qvc_config_free(cfg: *mut QvcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the selected suites. A suite failure is still `Ok`; inspect [`qvc_result_passed`].
///
/// # Safety
/// `cfg` must come from [`qvc_config_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qvc_run(cfg: *const QvcConfig, out: *mut *mut QvcResult) -> QvcStatus {
    guarded(|| {
        let Some(c) = cfg.as_ref() else {
            set_error("null config");
            return QvcStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output pointer");
            return QvcStatus::NullPointer;
        }
        match run(&c.inner) {
            Ok(output) => {
                let json = CString::new(output.to_json()).unwrap_or_default();
                let canonical = CString::new(output.canonical_json()).unwrap_or_default();
                *out = Box::into_raw(Box::new(QvcResult { output, json, canonical }));
                QvcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// 1 if every suite passed, 0 otherwise or for a null handle.
///
/// # Safety
/// `res` must come from [`qvc_run`].
#[no_mangle]
pub unsafe extern "C" fn qvc_result_passed(res: *const QvcResult) -> i32 {
    res.as_ref().map_or(0, |r| r.output.pass as i32)
}

/// Number of suite reports in the result.
///
/// # Safety
/// `res` must come from [`qvc_run`].
#[no_mangle]
pub unsafe extern "C" fn qvc_result_report_count(res: *const QvcResult) -> usize {
    res.as_ref().map_or(0, |r| r.output.reports.len())
}

/// Full JSON report, timings included. Owned by the result.
///
/// # Safety
/// `res` must come from [`qvc_run`].
#[no_mangle]
pub unsafe extern "C" fn qvc_result_json(res: *const QvcResult) -> *const c_char {
    res.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// JSON report without timings, identical across runs. Owned by the result.
///
/// # Safety
/// `res` must come from [`qvc_run`].
#[no_mangle]
pub unsafe extern "C" fn qvc_result_canonical_json(res: *const QvcResult) -> *const c_char {
    res.as_ref().map_or(ptr::null(), |r| r.canonical.as_ptr())
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `res` must come from [`qvc_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qvc_result_free(res: *mut QvcResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(qvc_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn run_bridge_suite() {
        unsafe {
            let mut cfg = ptr::null_mut();
            assert_eq!(qvc_config_new(c("A1").as_ptr(), c("1").as_ptr(), &mut cfg), QvcStatus::Ok);
            assert_eq!(qvc_config_set_windows(cfg, 3, 6), QvcStatus::Ok);
            assert_eq!(qvc_config_set_suites(cfg, c("bridge-vacom,tau-tech0").as_ptr()), QvcStatus::Ok);
            let mut res = ptr::null_mut();
            assert_eq!(qvc_run(cfg, &mut res), QvcStatus::Ok);
            assert_eq!(qvc_result_passed(res), 1);
            assert_eq!(qvc_result_report_count(res), 2);
            let canon = CStr::from_ptr(qvc_result_canonical_json(res)).to_str().unwrap().to_owned();
            assert!(canon.contains("\"schema\": 1"));
            assert!(!canon.contains("timing"));
            let mut again = ptr::null_mut();
            assert_eq!(qvc_run(cfg, &mut again), QvcStatus::Ok);
            assert_eq!(CStr::from_ptr(qvc_result_canonical_json(again)).to_str().unwrap(), canon);
            qvc_result_free(again);
            qvc_result_free(res);
            qvc_config_free(cfg);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut cfg = ptr::null_mut();
            assert_eq!(qvc_config_new(c("Z9").as_ptr(), c("1").as_ptr(), &mut cfg), QvcStatus::InvalidGcm);
            assert!(last_error().contains("Z9"));
            assert_eq!(qvc_config_new(ptr::null(), c("1").as_ptr(), &mut cfg), QvcStatus::NullPointer);
            assert_eq!(qvc_config_new(c("A1").as_ptr(), c("x").as_ptr(), &mut cfg), QvcStatus::InvalidConfig);
            assert_eq!(qvc_config_new(c("A1").as_ptr(), c("1").as_ptr(), &mut cfg), QvcStatus::Ok);
            assert_eq!(qvc_config_set_suites(cfg, c("nope").as_ptr()), QvcStatus::InvalidConfig);
            assert_eq!(qvc_config_set_windows(cfg, 1, 12), QvcStatus::Ok);
            let mut res = ptr::null_mut();
            assert_eq!(qvc_run(cfg, &mut res), QvcStatus::InvalidConfig);
            assert!(res.is_null());
            assert_eq!(qvc_result_passed(ptr::null()), 0);
            qvc_config_free(cfg);
            qvc_config_free(ptr::null_mut());
        }
    }

    #[test]
    fn version_string() {
        let v = unsafe { CStr::from_ptr(qvc_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
