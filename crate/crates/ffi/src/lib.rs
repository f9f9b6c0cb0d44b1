//! C interface. Jobs are opaque handles built from a JSON configuration;
//! results come back as NUL-terminated strings owned by the caller and
//! released with `iwahori_string_free`. Every call returns an
//! `IwahoriStatus`; on failure `iwahori_last_error` describes it.
//!
//! Elements cross the boundary as JSON objects `{"lambda": [..], "w": [..]}`
//! with `w` a word in the finite simple reflections, numbered from 1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::ValueEnum;
use iwahori::cli::{self, Format, Job, JobConfig, TauSpec, Which};
use iwahori::rootdata::LatticeVec;
use iwahori::weyl::IwahoriWeylElement;
use iwahori::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IwahoriStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The configuration or an argument failed validation.
    Config = 3,
    /// A computation hit an internal limit or a broken invariant.
    Internal = 4,
    Runtime = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IwahoriFormat {
    Json = 0,
    Csv = 1,
    Dot = 2,
}

impl From<IwahoriFormat> for Format {
    fn from(f: IwahoriFormat) -> Self {
        match f {
            IwahoriFormat::Json => Format::Json,
            IwahoriFormat::Csv => Format::Csv,
            IwahoriFormat::Dot => Format::Dot,
        }
    }
}

/// A validated job: datum, twist and optional `mu`, `J`, length bound.
pub struct IwahoriJob {
    job: Job,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(IwahoriStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config { .. } => IwahoriStatus::Config,
            Error::Invariant(_) | Error::PlateauCapExceeded(_) => IwahoriStatus::Internal,
            _ => IwahoriStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IwahoriStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IwahoriStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside iwahori");
            IwahoriStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(IwahoriStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(IwahoriStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn job_arg<'a>(p: *const IwahoriJob) -> Result<&'a Job, Failure> {
    p.as_ref()
        .map(|j| &j.job)
        .ok_or_else(|| Failure(IwahoriStatus::NullPointer, "job is null".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(IwahoriStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(IwahoriStatus::Runtime, e.to_string()))?;
    put(out, c.into_raw())
}

fn element(job: &Job, json: &str, name: &str) -> Result<IwahoriWeylElement, Failure> {
    let bad = |m: String| Failure(IwahoriStatus::Config, format!("{name}: {m}"));
    let spec: TauSpec = serde_json::from_str(json).map_err(|e| bad(e.to_string()))?;
    let g = job.group();
    if spec.lambda.len() != g.datum().dim() {
        return Err(bad(format!("expected {} coordinates", g.datum().dim())));
    }
    let rank = g.datum().rank();
    if spec.w.iter().any(|&i| i == 0 || i > rank) {
        return Err(bad(format!("nodes are numbered 1..={rank}")));
    }
    let word: Vec<usize> = spec.w.iter().map(|i| i - 1).collect();
    Ok(IwahoriWeylElement::new(
        LatticeVec::from_slice(&spec.lambda),
        g.finite_weyl_group().from_word(&word),
    ))
}

/// Message for the last failed call on this thread; empty after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn iwahori_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn iwahori_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn iwahori_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_new(config_json: *const c_char, out: *mut *mut IwahoriJob) -> IwahoriStatus {
    guard(|| {
        let text = str_arg(config_json, "config_json")?;
        let job = Job::new(JobConfig::from_json(text)?)?;
        put(out, Box::into_raw(Box::new(IwahoriJob { job })))
    })
}

/// # Safety
/// `job` must come from `iwahori_job_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_free(job: *mut IwahoriJob) {
    if !job.is_null() {
        drop(Box::from_raw(job));
    }
}

unsafe fn output(
    job: *const IwahoriJob,
    format: IwahoriFormat,
    out: *mut *mut c_char,
    f: fn(&Job, Format) -> iwahori::Result<String>,
) -> IwahoriStatus {
    guard(|| {
        let s = f(job_arg(job)?, format.into())?;
        put_string(out, s)
    })
}

/// `Adm^J(mu)`; needs `mu`.
///
/// # Safety
/// `job` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_adm(job: *const IwahoriJob, format: IwahoriFormat, out: *mut *mut c_char) -> IwahoriStatus {
    output(job, format, out, Job::adm_output)
}

/// Straight classes up to the length bound with their Hasse diagram.
///
/// # Safety
/// `job` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_classes(job: *const IwahoriJob, format: IwahoriFormat, out: *mut *mut c_char) -> IwahoriStatus {
    output(job, format, out, Job::classes_output)
}

/// Newton point, Kottwitz invariant and straightness per element.
///
/// # Safety
/// `job` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_newton(job: *const IwahoriJob, format: IwahoriFormat, out: *mut *mut c_char) -> IwahoriStatus {
    output(job, format, out, Job::newton_output)
}

/// `B(G, mu)`; needs `mu`.
///
/// # Safety
/// `job` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_bgmu(job: *const IwahoriJob, format: IwahoriFormat, out: *mut *mut c_char) -> IwahoriStatus {
    output(job, format, out, Job::bgmu_output)
}

/// Runs the named check (`"all"`, `"A"`, `"tri"`, ...) on this job and
/// writes the JSON reports. A failing check is not an error: inspect the
/// summary.
///
/// # Safety
/// `job` must be a live handle, `which` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_check(
    job: *const IwahoriJob,
    which: *const c_char,
    out: *mut *mut c_char,
) -> IwahoriStatus {
    guard(|| {
        let job = job_arg(job)?;
        let name = str_arg(which, "which")?;
        let which = Which::from_str(name, false)
            .map_err(|_| Failure(IwahoriStatus::Config, format!("unknown check {name:?}")))?;
        let reports = cli::run_checks(std::slice::from_ref(job), which)?;
        let text = serde_json::to_string_pretty(&cli::checks_json(&reports)).map_err(Error::from)?;
        put_string(out, text)
    })
}

/// Length of an element.
///
/// # Safety
/// `job` must be a live handle, `element_json` NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_length(
    job: *const IwahoriJob,
    element_json: *const c_char,
    out: *mut u64,
) -> IwahoriStatus {
    guard(|| {
        let job = job_arg(job)?;
        let x = element(job, str_arg(element_json, "element_json")?, "element_json")?;
        put(out, job.group().length(&x) as u64)
    })
}

/// Whether `x <= y` in the Bruhat order.
///
/// # Safety
/// `job` must be a live handle, both elements NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_bruhat_leq(
    job: *const IwahoriJob,
    x_json: *const c_char,
    y_json: *const c_char,
    out: *mut bool,
) -> IwahoriStatus {
    guard(|| {
        let job = job_arg(job)?;
        let x = element(job, str_arg(x_json, "x")?, "x")?;
        let y = element(job, str_arg(y_json, "y")?, "y")?;
        put(out, job.group().bruhat_leq(&x, &y))
    })
}

/// Writes `{"newton": [..], "kappa": [..], "straight": bool}` for an
/// element under the job's twist.
///
/// # Safety
/// `job` must be a live handle, `element_json` NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn iwahori_job_newton_point(
    job: *const IwahoriJob,
    element_json: *const c_char,
    out: *mut *mut c_char,
) -> IwahoriStatus {
    guard(|| {
        let job = job_arg(job)?;
        let x = element(job, str_arg(element_json, "element_json")?, "element_json")?;
        let e = &job.engine;
        let v = serde_json::json!({
            "newton": e.newton_point(&x),
            "kappa": e.twist().kottwitz_kappa(&x),
            "straight": e.is_straight(&x),
        });
        put_string(out, v.to_string())
    })
}
