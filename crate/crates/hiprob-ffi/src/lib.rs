//! C interface over the second-order probability engine.
//!
//! The surface follows the usual C library shape: an opaque model handle
//! created from model-file text, status codes on every fallible call, flat
//! `double` buffers the caller sizes, and a per-thread error message for
//! the last failure. The generated header lives in `include/hiprob.h`.
//!
//! Buffer sizing: world and candidate counts come from
//! [`hiprob_model_world_count`] / [`hiprob_model_candidate_count`];
//! distributions over worlds need `world_count` slots, distributions over
//! candidates need `candidate_count`, and the flattened joint needs
//! `candidate_count * world_count` (row-major, one row per candidate).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hiprob::commands::{classify, CliError};
use hiprob::decision;
use hiprob::kinematics::{self, JeffreyShift};
use hiprob::model::Model;
use hiprob::sequence::IIDModel;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HiprobStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The model text is not a well-formed model file.
    ParseError = 3,
    /// The model parsed but violates an invariant.
    ValidationError = 4,
    /// The operation's precondition does not hold for this model.
    PreconditionError = 5,
    /// An output buffer is smaller than the result.
    BufferTooSmall = 6,
    /// An internal invariant failed; report this as a bug.
    InternalError = 7,
}

/// Which expected-utility route `hiprob_model_decide` evaluates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HiprobDecideMode {
    /// The predictive distribution (first-order route).
    First = 0,
    /// Candidate-wise evaluation under the second-order weights.
    Second = 1,
    /// Cell-wise evaluation over the flattened joint.
    Joint = 2,
}

/// Opaque handle over a resolved model. Create with
/// [`hiprob_model_parse`], release with [`hiprob_model_free`].
pub struct HiprobModel {
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn fail(err: CliError) -> HiprobStatus {
    let status = match err {
        CliError::Parse(_) => HiprobStatus::ParseError,
        CliError::Validation(_) => HiprobStatus::ValidationError,
        CliError::Precondition(_) => HiprobStatus::PreconditionError,
        CliError::Internal(_) => HiprobStatus::InternalError,
    };
    set_last_error(err.to_string());
    status
}

fn fail_with(status: HiprobStatus, message: &str) -> HiprobStatus {
    set_last_error(message.to_string());
    status
}

/// Convert panics into `InternalError` instead of unwinding across the
/// C boundary.
fn guarded(body: impl FnOnce() -> HiprobStatus) -> HiprobStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail_with(HiprobStatus::InternalError, "internal panic"),
    }
}

/// Borrow the model behind a handle, rejecting null.
///
/// # Safety
/// `model` must be null or a pointer returned by `hiprob_model_parse` that
/// has not been freed.
unsafe fn borrow_model<'a>(model: *const HiprobModel) -> Result<&'a Model, HiprobStatus> {
    match model.as_ref() {
        Some(handle) => Ok(&handle.model),
        None => Err(fail_with(HiprobStatus::NullArgument, "model handle is null")),
    }
}

/// # Safety
/// `text` must be null or a NUL-terminated string.
unsafe fn borrow_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, HiprobStatus> {
    if text.is_null() {
        return Err(fail_with(
            HiprobStatus::NullArgument,
            &format!("{what} is null"),
        ));
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        fail_with(
            HiprobStatus::InvalidUtf8,
            &format!("{what} is not valid UTF-8"),
        )
    })
}

/// Copy `values` into `out`, which has room for `capacity` doubles.
///
/// # Safety
/// `out` must be null or valid for `capacity` writes.
unsafe fn fill(out: *mut f64, capacity: usize, values: &[f64]) -> HiprobStatus {
    if out.is_null() {
        return fail_with(HiprobStatus::NullArgument, "output buffer is null");
    }
    if capacity < values.len() {
        return fail_with(
            HiprobStatus::BufferTooSmall,
            &format!("buffer holds {capacity} values, result needs {}", values.len()),
        );
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    HiprobStatus::Ok
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn store<T>(out: *mut T, value: T, what: &str) -> HiprobStatus {
    if out.is_null() {
        return fail_with(HiprobStatus::NullArgument, &format!("{what} is null"));
    }
    out.write(value);
    HiprobStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hiprob_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or null if the last
/// call succeeded. The pointer stays valid until the next failing call on
/// the same thread.
#[no_mangle]
pub extern "C" fn hiprob_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |message| message.as_ptr())
    })
}

/// Parse model-file text (TOML) into a new model handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_model` must be valid for
/// one pointer write. On success the caller owns the handle and must
/// release it with [`hiprob_model_free`].
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_parse(
    text: *const c_char,
    out_model: *mut *mut HiprobModel,
) -> HiprobStatus {
    guarded(|| {
        if out_model.is_null() {
            return fail_with(HiprobStatus::NullArgument, "out_model is null");
        }
        let text = match borrow_str(text, "model text") {
            Ok(text) => text,
            Err(status) => return status,
        };
        match Model::from_toml(text) {
            Ok(model) => {
                out_model.write(Box::into_raw(Box::new(HiprobModel { model })));
                HiprobStatus::Ok
            }
            Err(err) => fail(err.into()),
        }
    })
}

/// Release a handle returned by [`hiprob_model_parse`]. Null is a no-op.
///
/// # Safety
/// `model` must be null or an unfreed handle from `hiprob_model_parse`.
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_free(model: *mut HiprobModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of worlds in the outcome space.
///
/// # Safety
/// See [`hiprob_model_parse`] for `model`; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_world_count(
    model: *const HiprobModel,
    out_count: *mut usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        store(out_count, resolved.space.size(), "out_count")
    })
}

/// Number of candidate distributions.
///
/// # Safety
/// See [`hiprob_model_world_count`].
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_candidate_count(
    model: *const HiprobModel,
    out_count: *mut usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        store(out_count, resolved.hierarchy.candidate_count(), "out_count")
    })
}

/// Number of acts in the utilities section; 0 when the model has none.
///
/// # Safety
/// See [`hiprob_model_world_count`].
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_act_count(
    model: *const HiprobModel,
    out_count: *mut usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        let count = resolved
            .utilities
            .as_ref()
            .map_or(0, |utilities| utilities.act_count());
        store(out_count, count, "out_count")
    })
}

/// Predictive distribution over worlds (`world_count` values).
///
/// # Safety
/// See [`hiprob_model_world_count`]; `out_weights` must be valid for
/// `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_predictive(
    model: *const HiprobModel,
    out_weights: *mut f64,
    capacity: usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        fill(out_weights, capacity, resolved.hierarchy.predictive().weights())
    })
}

/// Flattened joint grid, row-major with one row per candidate
/// (`candidate_count * world_count` values).
///
/// # Safety
/// See [`hiprob_model_predictive`].
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_flatten(
    model: *const HiprobModel,
    out_cells: *mut f64,
    capacity: usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        let joint = resolved.hierarchy.flatten();
        let cells: Vec<f64> = joint.rows().iter().flatten().copied().collect();
        fill(out_cells, capacity, &cells)
    })
}

/// Coherence gap between the model's `claimed` distribution and the
/// predictive, plus the worst world's index. Fails with
/// `PreconditionError` when the model carries no claimed distribution.
///
/// # Safety
/// See [`hiprob_model_world_count`]; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_coherence_gap(
    model: *const HiprobModel,
    out_gap: *mut f64,
    out_worst_world: *mut usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        let claimed = match &resolved.claimed {
            Some(claimed) => claimed,
            None => {
                return fail_with(
                    HiprobStatus::PreconditionError,
                    "model has no claimed distribution",
                )
            }
        };
        let report = match resolved.hierarchy.coherence_check(claimed) {
            Ok(report) => report,
            Err(err) => return fail(classify(err)),
        };
        let status = store(out_gap, report.gap, "out_gap");
        if status != HiprobStatus::Ok {
            return status;
        }
        store(out_worst_world, report.worst_world, "out_worst_world")
    })
}

/// Jeffrey-update the predictive distribution: shift the named event to
/// `new_probability` and write the updated distribution (`world_count`
/// values).
///
/// # Safety
/// See [`hiprob_model_predictive`]; `event_name` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_jeffrey_update(
    model: *const HiprobModel,
    event_name: *const c_char,
    new_probability: f64,
    out_weights: *mut f64,
    capacity: usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        let name = match borrow_str(event_name, "event name") {
            Ok(name) => name,
            Err(status) => return status,
        };
        let target = match resolved.event(name) {
            Ok(event) => event.clone(),
            Err(err) => return fail(err.into()),
        };
        let shift = match JeffreyShift::new(target, new_probability) {
            Ok(shift) => shift,
            Err(err) => return fail(classify(err)),
        };
        match kinematics::jeffrey_update(&resolved.hierarchy.predictive(), &shift) {
            Ok(updated) => fill(out_weights, capacity, updated.weights()),
            Err(err) => fail(classify(err)),
        }
    })
}

/// C3 deviation |Pr(b | a ∧ P(a)=x) − Pr(b | a)| on the flattened joint.
///
/// # Safety
/// See [`hiprob_model_jeffrey_update`].
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_c3_deviation(
    model: *const HiprobModel,
    event_a: *const c_char,
    event_b: *const c_char,
    x: f64,
    out_deviation: *mut f64,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        let a = match borrow_str(event_a, "event a") {
            Ok(name) => name,
            Err(status) => return status,
        };
        let b = match borrow_str(event_b, "event b") {
            Ok(name) => name,
            Err(status) => return status,
        };
        let event_a = match resolved.event(a) {
            Ok(event) => event.clone(),
            Err(err) => return fail(err.into()),
        };
        let event_b = match resolved.event(b) {
            Ok(event) => event.clone(),
            Err(err) => return fail(err.into()),
        };
        let joint = resolved.hierarchy.flatten();
        match kinematics::c3_deviation(
            &joint,
            resolved.hierarchy.candidates(),
            &event_a,
            &event_b,
            x,
        ) {
            Ok(deviation) => store(out_deviation, deviation, "out_deviation"),
            Err(err) => fail(classify(err)),
        }
    })
}

/// Posterior over the candidates after observing outcome indices
/// (`candidate_count` values). A null `observations` pointer is accepted
/// when `observation_count` is 0.
///
/// # Safety
/// `observations` must be valid for `observation_count` reads (or null
/// when the count is 0); see [`hiprob_model_predictive`] for the rest.
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_posterior(
    model: *const HiprobModel,
    observations: *const usize,
    observation_count: usize,
    out_weights: *mut f64,
    capacity: usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        if observations.is_null() && observation_count > 0 {
            return fail_with(HiprobStatus::NullArgument, "observations is null");
        }
        let observed: &[usize] = if observation_count == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(observations, observation_count)
        };
        let iid = IIDModel::new(resolved.hierarchy.clone());
        match iid.posterior(observed) {
            Ok(posterior) => fill(out_weights, capacity, posterior.weights()),
            Err(err) => fail(classify(err)),
        }
    })
}

/// Predictive distribution for the next trial after the observations
/// (`world_count` values).
///
/// # Safety
/// See [`hiprob_model_posterior`].
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_predictive_next(
    model: *const HiprobModel,
    observations: *const usize,
    observation_count: usize,
    out_weights: *mut f64,
    capacity: usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        if observations.is_null() && observation_count > 0 {
            return fail_with(HiprobStatus::NullArgument, "observations is null");
        }
        let observed: &[usize] = if observation_count == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(observations, observation_count)
        };
        let iid = IIDModel::new(resolved.hierarchy.clone());
        match iid.predictive_next(observed) {
            Ok(predictive) => fill(out_weights, capacity, predictive.weights()),
            Err(err) => fail(classify(err)),
        }
    })
}

/// Expected utility per act under the chosen route (`act_count` values)
/// plus the chosen act's index (lowest index on ties). Fails with
/// `ValidationError` when the model has no utilities section.
///
/// # Safety
/// See [`hiprob_model_predictive`]; `out_chosen` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hiprob_model_decide(
    model: *const HiprobModel,
    mode: HiprobDecideMode,
    out_values: *mut f64,
    capacity: usize,
    out_chosen: *mut usize,
) -> HiprobStatus {
    guarded(|| {
        let resolved = match borrow_model(model) {
            Ok(resolved) => resolved,
            Err(status) => return status,
        };
        let utilities = match &resolved.utilities {
            Some(utilities) => utilities.clone(),
            None => {
                return fail_with(
                    HiprobStatus::ValidationError,
                    "model has no utilities section",
                )
            }
        };
        let belief = match mode {
            HiprobDecideMode::First => {
                decision::Belief::FirstOrder(resolved.hierarchy.predictive())
            }
            HiprobDecideMode::Second => {
                decision::Belief::Hierarchical(resolved.hierarchy.clone())
            }
            HiprobDecideMode::Joint => decision::Belief::Joint(resolved.hierarchy.flatten()),
        };
        let problem = match decision::DecisionProblem::new(utilities, belief) {
            Ok(problem) => problem,
            Err(err) => return fail(classify(err)),
        };
        match decision::optimal_acts(&problem) {
            Ok(choice) => {
                let status = fill(out_values, capacity, &choice.values);
                if status != HiprobStatus::Ok {
                    return status;
                }
                store(out_chosen, choice.chosen, "out_chosen")
            }
            Err(err) => fail(classify(err)),
        }
    })
}
