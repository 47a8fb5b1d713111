//! C ABI over the flowdec library.
//!
//! Objects are handed out as opaque pointers that the caller releases with
//! the matching `*_free` function. Every fallible call returns a
//! `FlowdecStatus`; on failure `flowdec_last_error` describes the problem
//! until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use flowdec::adjustable::{solve_adjustable, AdjustableResult, Formulation};
use flowdec::io::{parse_instance, parse_scenarios, Instance};
use flowdec::milp::{SolveStatus, SolverConfig};
use flowdec::robust::{solve_scenario, DiscreteUncertaintySet};
use flowdec::{Error, WeightedDecomposition};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowdecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Infeasible = 5,
    TimeLimit = 6,
    OutOfRange = 7,
    Internal = 8,
    Panic = 9,
}

impl From<&Error> for FlowdecStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) | Error::Io(_) => FlowdecStatus::Parse,
            Error::Infeasible | Error::InfeasibleAt { .. } | Error::StrictInfeasible { .. } => FlowdecStatus::Infeasible,
            Error::TimeLimit => FlowdecStatus::TimeLimit,
            Error::Backend(_) | Error::MalformedAssignment(_) => FlowdecStatus::Internal,
            _ => FlowdecStatus::InvalidInput,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowdecFormulation {
    Ma = 0,
    La = 1,
    Naive = 2,
}

/// Solver settings; zero selects the default for every field.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FlowdecOptions {
    pub kbar: usize,
    pub wmax: u64,
    /// Seconds per solve, or per master problem for two-stage runs.
    pub time_limit: f64,
}

pub struct FlowdecInstance {
    inner: Instance,
}

pub struct FlowdecSolution {
    decomposition: WeightedDecomposition,
    objective: f64,
    status: SolveStatus,
}

pub struct FlowdecAdjustable {
    inner: AdjustableResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: FlowdecStatus, msg: &str) -> FlowdecStatus {
    set_error(msg);
    status
}

fn fail_with(e: &Error) -> FlowdecStatus {
    fail(e.into(), &e.to_string())
}

/// Runs `f`, turning a panic into `Panic`.
fn guard(f: impl FnOnce() -> FlowdecStatus) -> FlowdecStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(FlowdecStatus::Panic, "panic inside flowdec"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FlowdecStatus> {
    if s.is_null() {
        return Err(fail(FlowdecStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(FlowdecStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn config_from(opts: *const FlowdecOptions) -> SolverConfig {
    let o = if opts.is_null() { FlowdecOptions::default() } else { unsafe { *opts } };
    let limit = (o.time_limit > 0.0).then(|| Duration::try_from_secs_f64(o.time_limit).ok()).flatten();
    let mut config = SolverConfig { kbar: (o.kbar > 0).then_some(o.kbar), wmax: (o.wmax > 0).then_some(o.wmax), ..Default::default() };
    if limit.is_some() {
        config.time_limit = limit;
        config.time_limit_master = limit;
    }
    config
}

/// Message for the last failed call on this thread; empty after success.
#[no_mangle]
pub extern "C" fn flowdec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn flowdec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance in the JSON file format.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowdec_instance_parse(json: *const c_char, out: *mut *mut FlowdecInstance) -> FlowdecStatus {
    guard(|| {
        if out.is_null() {
            return fail(FlowdecStatus::NullPointer, "output pointer is null");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_instance(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FlowdecInstance { inner }));
                FlowdecStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Loads one of the bundled instances by name.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowdec_instance_bundled(name: *const c_char, out: *mut *mut FlowdecInstance) -> FlowdecStatus {
    guard(|| {
        if out.is_null() {
            return fail(FlowdecStatus::NullPointer, "output pointer is null");
        }
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match flowdec::instances::bundled(name) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FlowdecInstance { inner }));
                FlowdecStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// # Safety
/// `instance` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_instance_free(instance: *mut FlowdecInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// # Safety
/// `instance` must be a live handle or null (then 0 is returned).
#[no_mangle]
pub unsafe extern "C" fn flowdec_instance_edge_count(instance: *const FlowdecInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.graph.edge_count())
}

/// Deterministic decomposition minimizing `a_y·k + a_w·Σw`. `options` may be null.
///
/// # Safety
/// `instance` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowdec_solve(
    instance: *const FlowdecInstance,
    a_y: f64,
    a_w: f64,
    options: *const FlowdecOptions,
    out: *mut *mut FlowdecSolution,
) -> FlowdecStatus {
    guard(|| {
        let (Some(inst), false) = (instance.as_ref(), out.is_null()) else {
            return fail(FlowdecStatus::NullPointer, "instance or output pointer is null");
        };
        if !(a_y >= 0.0 && a_w >= 0.0) {
            return fail(FlowdecStatus::InvalidInput, "objective coefficients must be non-negative");
        }
        let config = config_from(options);
        match solve_scenario(&inst.inner.graph, inst.inner.bounds.clone(), a_y, a_w, &config) {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(FlowdecSolution {
                    decomposition: sol.decomposition,
                    objective: sol.objective,
                    status: sol.status,
                }));
                FlowdecStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// # Safety
/// `solution` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_solution_free(solution: *mut FlowdecSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must be a live handle or null (then 0 is returned).
#[no_mangle]
pub unsafe extern "C" fn flowdec_solution_path_count(solution: *const FlowdecSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.decomposition.len())
}

/// # Safety
/// `solution` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_solution_objective(solution: *const FlowdecSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.objective)
}

/// `1` when the solution is proven optimal, `0` otherwise.
///
/// # Safety
/// `solution` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_solution_is_optimal(solution: *const FlowdecSolution) -> i32 {
    solution.as_ref().is_some_and(|s| s.status == SolveStatus::Optimal) as i32
}

/// Weight of path `index` and its length in edges.
///
/// # Safety
/// `solution` must be a live handle; `weight` and `len` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn flowdec_solution_path(
    solution: *const FlowdecSolution,
    index: usize,
    weight: *mut u64,
    len: *mut usize,
) -> FlowdecStatus {
    guard(|| {
        let (Some(s), false, false) = (solution.as_ref(), weight.is_null(), len.is_null()) else {
            return fail(FlowdecStatus::NullPointer, "null argument");
        };
        let Some(path) = s.decomposition.paths.get(index) else {
            return fail(FlowdecStatus::OutOfRange, "path index out of range");
        };
        *weight = s.decomposition.weights[index];
        *len = path.edges().len();
        FlowdecStatus::Ok
    })
}

/// Copies the edge ids of path `index` into `buffer`, which must hold at
/// least the path length reported by `flowdec_solution_path`.
///
/// # Safety
/// `solution` must be a live handle and `buffer` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn flowdec_solution_path_edges(
    solution: *const FlowdecSolution,
    instance: *const FlowdecInstance,
    index: usize,
    buffer: *mut u32,
    capacity: usize,
) -> FlowdecStatus {
    guard(|| {
        let (Some(s), Some(inst), false) = (solution.as_ref(), instance.as_ref(), buffer.is_null()) else {
            return fail(FlowdecStatus::NullPointer, "null argument");
        };
        let Some(path) = s.decomposition.paths.get(index) else {
            return fail(FlowdecStatus::OutOfRange, "path index out of range");
        };
        let ids = path.edge_ids(&inst.inner.graph);
        if ids.len() > capacity {
            return fail(FlowdecStatus::OutOfRange, "buffer too small");
        }
        for (i, id) in ids.iter().enumerate() {
            *buffer.add(i) = id.0;
        }
        FlowdecStatus::Ok
    })
}

/// Two-stage solve over a scenario file's contents. `options` may be null.
///
/// # Safety
/// `instance` must be a live handle, `scenarios_json` nul-terminated and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowdec_adjustable_solve(
    instance: *const FlowdecInstance,
    scenarios_json: *const c_char,
    formulation: FlowdecFormulation,
    options: *const FlowdecOptions,
    out: *mut *mut FlowdecAdjustable,
) -> FlowdecStatus {
    guard(|| {
        let (Some(inst), false) = (instance.as_ref(), out.is_null()) else {
            return fail(FlowdecStatus::NullPointer, "instance or output pointer is null");
        };
        let text = match read_str(scenarios_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let file = match parse_scenarios(&inst.inner.graph, text) {
            Ok(f) => f,
            Err(e) => return fail_with(&e),
        };
        let formulation = match formulation {
            FlowdecFormulation::Ma => Formulation::Ma,
            FlowdecFormulation::La => Formulation::La,
            FlowdecFormulation::Naive => Formulation::Naive,
        };
        let set = DiscreteUncertaintySet { scenarios: file.scenarios };
        match solve_adjustable(formulation, &inst.inner.graph, &set, &config_from(options)) {
            Ok((inner, _)) => {
                *out = Box::into_raw(Box::new(FlowdecAdjustable { inner }));
                FlowdecStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// # Safety
/// `result` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_adjustable_free(result: *mut FlowdecAdjustable) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Path count `Y`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_adjustable_path_count(result: *const FlowdecAdjustable) -> usize {
    result.as_ref().map_or(0, |r| r.inner.path_count)
}

/// Largest per-scenario weight total `W`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_adjustable_weight(result: *const FlowdecAdjustable) -> u64 {
    result.as_ref().map_or(0, |r| r.inner.weight)
}

/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flowdec_adjustable_objective(result: *const FlowdecAdjustable) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.inner.objective)
}
