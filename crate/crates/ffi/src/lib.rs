//! C interface to `gconv-risk`.
//!
//! Laws, algebras and risk models are opaque handles built from the same
//! JSON the command line accepts and released with their `_free` function.
//! Every fallible call returns a [`GcrStatus`]; on failure the message is
//! available from [`gcr_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gconv_risk::convolutions::Algebra;
use gconv_risk::error::Error;
use gconv_risk::measures::{Distribution, LawSpec};
use gconv_risk::risk::{safety_condition, RiskModel};
use gconv_risk::ruin::{ruin_at, McOptions, Method, RuinEstimate};
use gconv_risk::walks::{terminal_states, Sampler};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcrStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad parameter, malformed JSON or unknown field.
    InvalidArgument = 2,
    /// Method or model combination not supported.
    Unsupported = 3,
    /// The net-profit condition fails, so ruin is certain.
    CertainRuin = 4,
    /// A required moment is infinite.
    InfiniteMoment = 5,
    /// Numerical failure.
    Numeric = 6,
    /// Input string is not UTF-8.
    InvalidUtf8 = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

/// Ruin method; `GCR_METHOD_AUTO` picks by algebra and laws.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcrMethod {
    Auto = 0,
    Volterra = 1,
    Ode = 2,
    ClosedForm = 3,
    MonteCarlo = 4,
}

/// Monte Carlo settings; see [`gcr_mc_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcrMcOptions {
    pub paths: u64,
    pub horizon: u64,
    pub seed: u64,
    pub confidence: f64,
}

/// Survival at one capital level. `ci_low`/`ci_high` are NaN for analytic methods.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcrRuinResult {
    pub u: f64,
    pub survival: f64,
    pub ruin: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub method: GcrMethod,
}

/// The `closed_form_` fields are NaN where the closed form matches the definition.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcrSafetyReport {
    pub t: f64,
    pub margin: f64,
    pub condition_holds: bool,
    pub premium_side: f64,
    pub claim_side: f64,
    pub closed_form_premium_side: f64,
    pub closed_form_margin: f64,
}

pub struct GcrDistribution(Distribution);
pub struct GcrAlgebra(Algebra);
pub struct GcrModel(RiskModel);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(e: &Error) -> GcrStatus {
    match e {
        Error::CertainRuin { .. } => GcrStatus::CertainRuin,
        Error::InfiniteMoment(_) => GcrStatus::InfiniteMoment,
        Error::Unsupported(_) => GcrStatus::Unsupported,
        e if e.is_validation() => GcrStatus::InvalidArgument,
        _ => GcrStatus::Numeric,
    }
}

struct Fail(GcrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `body`, recording any error or panic for [`gcr_last_error`].
fn guard<F: FnOnce() -> Result<(), Fail>>(body: F) -> GcrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            GcrStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside gconv-risk".into());
            GcrStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(GcrStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GcrStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn writable<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn nan_if_none(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn method_in(m: GcrMethod) -> Option<Method> {
    match m {
        GcrMethod::Auto => None,
        GcrMethod::Volterra => Some(Method::Volterra),
        GcrMethod::Ode => Some(Method::Ode),
        GcrMethod::ClosedForm => Some(Method::ClosedForm),
        GcrMethod::MonteCarlo => Some(Method::MonteCarlo),
    }
}

fn method_out(m: Method) -> GcrMethod {
    match m {
        Method::Volterra => GcrMethod::Volterra,
        Method::Ode => GcrMethod::Ode,
        Method::ClosedForm => GcrMethod::ClosedForm,
        Method::MonteCarlo => GcrMethod::MonteCarlo,
    }
}

fn ruin_out(e: &RuinEstimate) -> GcrRuinResult {
    GcrRuinResult {
        u: e.u,
        survival: e.survival,
        ruin: e.ruin,
        ci_low: nan_if_none(e.ci_low),
        ci_high: nan_if_none(e.ci_high),
        method: method_out(e.method),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gcr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gcr_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses a law such as `{"family": "pareto2a", "alpha": 1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcr_distribution_from_json(json: *const c_char, out: *mut *mut GcrDistribution) -> GcrStatus {
    guard(|| {
        let slot = writable(out, "out")?;
        *slot = ptr::null_mut();
        let d = LawSpec::from_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(GcrDistribution(d)));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle from [`gcr_distribution_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcr_distribution_free(d: *mut GcrDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcr_distribution_cdf(d: *const GcrDistribution, x: f64, value: *mut f64) -> GcrStatus {
    guard(|| {
        let d = handle(d, "d")?;
        *writable(value, "value")? = d.0.cdf(x);
        Ok(())
    })
}

/// Writes `n` seeded draws into `values`.
///
/// # Safety
/// `d` must be a live handle; `values` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcr_distribution_sample(
    d: *const GcrDistribution,
    n: usize,
    seed: u64,
    values: *mut f64,
) -> GcrStatus {
    guard(|| {
        let d = handle(d, "d")?;
        if n == 0 {
            return Ok(());
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let draws = d.0.sample(n, seed);
        std::slice::from_raw_parts_mut(values, n).copy_from_slice(&draws);
        Ok(())
    })
}

/// Parses an algebra such as `{"kind": "kendall", "alpha": 1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcr_algebra_from_json(json: *const c_char, out: *mut *mut GcrAlgebra) -> GcrStatus {
    guard(|| {
        let slot = writable(out, "out")?;
        *slot = ptr::null_mut();
        let a = Algebra::from_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(GcrAlgebra(a)));
        Ok(())
    })
}

/// # Safety
/// `a` must be null or a handle from [`gcr_algebra_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcr_algebra_free(a: *mut GcrAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Kernel `Omega(t)` of the algebra.
///
/// # Safety
/// `a` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcr_algebra_kernel(a: *const GcrAlgebra, t: f64, value: *mut f64) -> GcrStatus {
    guard(|| {
        let a = handle(a, "a")?;
        *writable(value, "value")? = a.0.kernel(t);
        Ok(())
    })
}

/// Terminal states `X_n` of `paths` walks from `start`; path `i` is
/// seeded from `(seed, i)`, so output is independent of threading.
///
/// # Safety
/// Handles must be live; `states` must hold `paths` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcr_walk_terminal_states(
    a: *const GcrAlgebra,
    step_law: *const GcrDistribution,
    n: usize,
    start: f64,
    paths: usize,
    seed: u64,
    states: *mut f64,
) -> GcrStatus {
    guard(|| {
        let a = handle(a, "a")?;
        let law = handle(step_law, "step_law")?;
        if paths == 0 {
            return Ok(());
        }
        if states.is_null() {
            return Err(null("states"));
        }
        let xs = terminal_states(&a.0, &law.0, n, start, paths, seed, Sampler::Auto)?;
        std::slice::from_raw_parts_mut(states, paths).copy_from_slice(&xs);
        Ok(())
    })
}

/// Parses a risk model: `algebra`, `claims`, `premiums`, and optional `u`,
/// `lambda`, `beta`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcr_model_from_json(json: *const c_char, out: *mut *mut GcrModel) -> GcrStatus {
    guard(|| {
        let slot = writable(out, "out")?;
        *slot = ptr::null_mut();
        let m = RiskModel::from_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(GcrModel(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`gcr_model_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcr_model_free(m: *mut GcrModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Defaults used by the command line.
#[no_mangle]
pub extern "C" fn gcr_mc_options_default() -> GcrMcOptions {
    let d = McOptions::default();
    GcrMcOptions {
        paths: d.paths as u64,
        horizon: d.horizon,
        seed: d.seed,
        confidence: d.confidence,
    }
}

/// Survival and ruin at capital `u`. `options` may be null for defaults
/// and is ignored by analytic methods.
///
/// # Safety
/// `m` must be a live handle; `options` null or readable; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn gcr_ruin(
    m: *const GcrModel,
    u: f64,
    method: GcrMethod,
    options: *const GcrMcOptions,
    result: *mut GcrRuinResult,
) -> GcrStatus {
    guard(|| {
        let m = handle(m, "m")?;
        let slot = writable(result, "result")?;
        let o = options.as_ref().copied().unwrap_or_else(|| gcr_mc_options_default());
        let paths = usize::try_from(o.paths)
            .map_err(|_| Fail(GcrStatus::InvalidArgument, "`paths` does not fit in usize".into()))?;
        let mc = McOptions {
            paths,
            horizon: o.horizon,
            seed: o.seed,
            confidence: o.confidence,
        };
        *slot = ruin_out(&ruin_at(&m.0, u, method_in(method), &mc)?);
        Ok(())
    })
}

/// First safety condition at time `t` (max and Kendall models).
///
/// # Safety
/// `m` must be a live handle; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcr_safety(m: *const GcrModel, t: f64, report: *mut GcrSafetyReport) -> GcrStatus {
    guard(|| {
        let m = handle(m, "m")?;
        let slot = writable(report, "report")?;
        let r = safety_condition(&m.0, t)?;
        *slot = GcrSafetyReport {
            t: r.t,
            margin: r.margin,
            condition_holds: r.condition_holds,
            premium_side: r.premium_side,
            claim_side: r.claim_side,
            closed_form_premium_side: nan_if_none(r.closed_form_premium_side),
            closed_form_margin: nan_if_none(r.closed_form_margin),
        };
        Ok(())
    })
}
