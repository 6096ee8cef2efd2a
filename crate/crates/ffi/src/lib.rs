//! C ABI for proxlab: opaque operator and trace handles, status codes, and a
//! thread-local last-error message.
//!
//! Every fallible function returns a [`PxStatus`]; on failure the message is
//! available from [`px_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use proxlab::config::{run_experiment, ExperimentConfig};
use proxlab::engines::{run_gppa, IterationTrace, Schedule};
use proxlab::operators::zoo;
use proxlab::rates::{self, Params, TheoremId};
use proxlab::{Error, Operator, Vector};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    VerificationFailed = 3,
    NumericalFailure = 4,
    IndexOutOfRange = 5,
    Panic = 6,
}

/// Opaque operator handle.
pub struct PxOperator(Operator);

/// Opaque iteration-trace handle.
pub struct PxTrace(IterationTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PxStatus {
    match e.exit_code() {
        2 => PxStatus::InvalidArgument,
        _ => PxStatus::NumericalFailure,
    }
}

fn fail(e: Error) -> PxStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> PxStatus) -> PxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            PxStatus::Panic
        }
    }
}

fn null(what: &str) -> PxStatus {
    set_error(format!("null pointer: {what}"));
    PxStatus::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, PxStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        PxStatus::InvalidArgument
    })
}

unsafe fn read_vector(p: *const f64, n: usize, what: &str) -> Result<Vector, PxStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Vector::new(std::slice::from_raw_parts(p, n).to_vec()).map_err(fail)
}

unsafe fn write_vector(v: &Vector, out: *mut f64, n: usize) -> PxStatus {
    if out.is_null() {
        return null("out");
    }
    if n != v.dim() {
        set_error(format!("output length {n} does not match dimension {}", v.dim()));
        return PxStatus::InvalidArgument;
    }
    ptr::copy_nonoverlapping(v.as_slice().as_ptr(), out, n);
    PxStatus::Ok
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failure on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn px_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version string. Owned by the library.
#[no_mangle]
pub extern "C" fn px_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer returned by a `px_*` function documented as
/// returning an owned string, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn px_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a zoo operator from its identifier (e.g. `"rotation2"`, `"box:[0,1]x[0,1]"`).
///
/// # Safety
/// `id` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn px_operator_new(id: *const c_char, out: *mut *mut PxOperator) -> PxStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let id = match read_str(id, "id") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match zoo::lookup(id) {
            Ok(op) => {
                *out = Box::into_raw(Box::new(PxOperator(op)));
                PxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `op` must be NULL or a handle from [`px_operator_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn px_operator_free(op: *mut PxOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Dimension of the operator's space; 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn px_operator_dim(op: *const PxOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// Writes `J_{gamma A} x` into `out` (both of length `n`).
///
/// # Safety
/// `op` must be a live handle; `x` and `out` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn px_resolvent(
    op: *const PxOperator,
    gamma: f64,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> PxStatus {
    guard(|| {
        let Some(op) = op.as_ref() else {
            return null("op");
        };
        let x = match read_vector(x, n, "x") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match op.0.resolve(gamma, &x) {
            Ok(j) => write_vector(&j, out, n),
            Err(e) => fail(e),
        }
    })
}

/// Projects `x` onto the zero set: point into `out`, distance into `dist`,
/// and whether the projection is exact into `exact` (may be NULL).
///
/// # Safety
/// `op` must be a live handle; `x` and `out` must point to `n` doubles; `dist` must be valid.
#[no_mangle]
pub unsafe extern "C" fn px_project_zero_set(
    op: *const PxOperator,
    x: *const f64,
    n: usize,
    out: *mut f64,
    dist: *mut f64,
    exact: *mut bool,
) -> PxStatus {
    guard(|| {
        let Some(op) = op.as_ref() else {
            return null("op");
        };
        if dist.is_null() {
            return null("dist");
        }
        let x = match read_vector(x, n, "x") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match op.0.project_zero_set(&x) {
            Ok(p) => {
                let s = write_vector(&p.point, out, n);
                if s == PxStatus::Ok {
                    *dist = p.dist;
                    if !exact.is_null() {
                        *exact = p.exact;
                    }
                }
                s
            }
            Err(e) => fail(e),
        }
    })
}

fn finish_run(r: proxlab::Result<IterationTrace>, out: *mut *mut PxTrace) -> PxStatus {
    match r {
        Ok(t) => {
            // SAFETY: callers check `out` before running.
            unsafe { *out = Box::into_raw(Box::new(PxTrace(t))) };
            PxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Exact proximal point run with constant `lambda` and `c` for `k` steps.
///
/// # Safety
/// `op` must be a live handle; `x0` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn px_run_gppa(
    op: *const PxOperator,
    lambda: f64,
    c: f64,
    x0: *const f64,
    n: usize,
    k: usize,
    out: *mut *mut PxTrace,
) -> PxStatus {
    guard(|| {
        let Some(op) = op.as_ref() else {
            return null("op");
        };
        if out.is_null() {
            return null("out");
        }
        let x0 = match read_vector(x0, n, "x0") {
            Ok(v) => v,
            Err(s) => return s,
        };
        finish_run(run_gppa(&op.0, &Schedule::constant(lambda, c), &x0, k), out)
    })
}

/// Proximal point run with a JSON schedule, e.g.
/// `{"lambda": [0.5, 1.5], "c": "harmonic-plus-one", "eta": 1, "error": {"relative": 0.05}, "seed": 7}`.
///
/// # Safety
/// As [`px_run_gppa`]; `schedule_json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn px_run_gppa_schedule(
    op: *const PxOperator,
    schedule_json: *const c_char,
    x0: *const f64,
    n: usize,
    k: usize,
    out: *mut *mut PxTrace,
) -> PxStatus {
    guard(|| {
        let Some(op) = op.as_ref() else {
            return null("op");
        };
        if out.is_null() {
            return null("out");
        }
        let text = match read_str(schedule_json, "schedule_json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let schedule: Schedule = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => {
                set_error(format!("schedule: {e}"));
                return PxStatus::InvalidArgument;
            }
        };
        let x0 = match read_vector(x0, n, "x0") {
            Ok(v) => v,
            Err(s) => return s,
        };
        finish_run(run_gppa(&op.0, &schedule, &x0, k), out)
    })
}

/// # Safety
/// `t` must be NULL or a handle from a run function, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn px_trace_free(t: *mut PxTrace) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of rows (`K + 1`); 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn px_trace_len(t: *const PxTrace) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// Copies iterate `x_k` into `out` (length `n`).
///
/// # Safety
/// `t` must be a live handle; `out` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn px_trace_iterate(t: *const PxTrace, k: usize, out: *mut f64, n: usize) -> PxStatus {
    guard(|| {
        let Some(t) = t.as_ref() else {
            return null("trace");
        };
        match t.0.rows.get(k) {
            Some(r) => write_vector(&r.x, out, n),
            None => out_of_range(k, t.0.len()),
        }
    })
}

fn out_of_range(k: usize, len: usize) -> PxStatus {
    set_error(format!("row {k} out of range (trace has {len} rows)"));
    PxStatus::IndexOutOfRange
}

/// Residual `||x_k - J x_k||` and distance `d(x_k, zer A)` (NaN when unavailable) of row `k`.
///
/// # Safety
/// `t` must be a live handle; `residual` and `dist` must be valid.
#[no_mangle]
pub unsafe extern "C" fn px_trace_row(t: *const PxTrace, k: usize, residual: *mut f64, dist: *mut f64) -> PxStatus {
    guard(|| {
        let Some(t) = t.as_ref() else {
            return null("trace");
        };
        if residual.is_null() || dist.is_null() {
            return null("residual/dist");
        }
        match t.0.rows.get(k) {
            Some(r) => {
                *residual = r.residual;
                *dist = r.dist.unwrap_or(f64::NAN);
                PxStatus::Ok
            }
            None => out_of_range(k, t.0.len()),
        }
    })
}

/// Trace as CSV. Free the result with [`px_string_free`]; NULL on failure.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn px_trace_to_csv(t: *const PxTrace) -> *mut c_char {
    match t.as_ref() {
        Some(t) => into_c_string(t.0.to_csv()),
        None => {
            null("trace");
            ptr::null_mut()
        }
    }
}

/// Evaluates a closed-form rate. `params` is `"key=value,..."`; `name` selects the
/// output (`"rho"`, `"effective"`, `"beta"`, `"rho_sq"`), or the first when NULL.
///
/// # Safety
/// `theorem_id`, `params` must be NUL-terminated; `name` NULL or NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn px_rate(
    theorem_id: *const c_char,
    params: *const c_char,
    name: *const c_char,
    out: *mut f64,
) -> PxStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let (id, params) = match (read_str(theorem_id, "theorem_id"), read_str(params, "params")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let name = if name.is_null() {
            None
        } else {
            match read_str(name, "name") {
                Ok(s) => Some(s),
                Err(s) => return s,
            }
        };
        let result = parse_params(params).and_then(|p| {
            let id: TheoremId = id.parse()?;
            let values = rates::evaluate(id, &p)?;
            let hit = match name {
                Some(n) => values.iter().find(|(k, _)| *k == n),
                None => values.first(),
            };
            hit.map(|(_, v)| *v)
                .ok_or_else(|| Error::InvalidSpec(format!("{id} has no output `{}`", name.unwrap_or(""))))
        });
        match result {
            Ok(v) => {
                *out = v;
                PxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

fn parse_params(s: &str) -> proxlab::Result<Params> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("parameter `{p}` is not key=value")))?;
            let v = v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("parameter `{p}` has a non-numeric value")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Runs an experiment config (JSON text) and stores the report JSON in `report_json`
/// (free with [`px_string_free`]). Returns `VerificationFailed` with a report when
/// a certificate check fails.
///
/// # Safety
/// `config_json` must be NUL-terminated; `report_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn px_run_experiment(config_json: *const c_char, report_json: *mut *mut c_char) -> PxStatus {
    guard(|| {
        if report_json.is_null() {
            return null("report_json");
        }
        let text = match read_str(config_json, "config_json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let report = match ExperimentConfig::from_json(text).and_then(|c| run_experiment(&c)) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        *report_json = into_c_string(serde_json::to_string(&report).expect("report serializes"));
        if report.overall {
            PxStatus::Ok
        } else {
            set_error("certificate verification failed");
            PxStatus::VerificationFailed
        }
    })
}
