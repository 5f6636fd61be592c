//! C ABI over `vindef`.
//!
//! Diagrams and certificates cross the boundary as opaque handles released
//! with their `_free` function. Every fallible call returns a
//! [`VindefStatus`]; on failure [`vindef_last_error`] describes the cause.
//! Strings handed out by the library are released with
//! [`vindef_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vindef::certificate::Certificate;
use vindef::checker::check_certificate_with;
use vindef::data;
use vindef::diagram::{build_labeled, BuildOptions, Diagram, VectorsFile, DEFAULT_EPSILON};
use vindef::engine::{propagate, search_total_admissible, Assignment, Outcome};
use vindef::error::Error;
use vindef::linalg::Vector;
use vindef::localizer::localize;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VindefStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownObservable = 4,
    Precondition = 5,
    /// The target lies in the star of psi and is value definite.
    DegenerateOverlap = 6,
    ContractViolated = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VindefOutcome {
    Fixpoint = 0,
    Contradiction = 1,
}

/// One seed value: observable id and 0 or 1.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct VindefSeed {
    pub id: usize,
    pub value: u8,
}

/// Opaque diagram handle.
pub struct VindefDiagram(Diagram);

/// Opaque certificate handle.
pub struct VindefCertificate(Certificate);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> VindefStatus {
    match e {
        Error::UnknownObservable(_) => VindefStatus::UnknownObservable,
        Error::Parse(_) | Error::Malformed(_) | Error::Json(_) | Error::Io(_) => VindefStatus::Parse,
        Error::DegenerateOverlap { .. } => VindefStatus::DegenerateOverlap,
        Error::ContractViolated(_) => VindefStatus::ContractViolated,
        _ => VindefStatus::Precondition,
    }
}

struct Fail(VindefStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VindefStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            VindefStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VindefStatus::Internal
        }
    }
}

fn null() -> Fail {
    Fail(VindefStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(VindefStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn diagram<'a>(p: *const VindefDiagram) -> Result<&'a Diagram, Fail> {
    p.as_ref().map(|d| &d.0).ok_or_else(null)
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn boxed(d: Diagram) -> *mut VindefDiagram {
    Box::into_raw(Box::new(VindefDiagram(d)))
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn vindef_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn vindef_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a diagram in its JSON file format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_from_json(json: *const c_char, out_diagram: *mut *mut VindefDiagram) -> VindefStatus {
    guard(|| {
        let d = Diagram::from_json(text(json)?)?;
        *out(out_diagram)? = boxed(d);
        Ok(())
    })
}

/// Builds a diagram from a vectors file's JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_build(json: *const c_char, out_diagram: *mut *mut VindefDiagram) -> VindefStatus {
    guard(|| {
        let file = VectorsFile::parse(text(json)?)?;
        let opts = BuildOptions { mode: file.mode(), epsilon: file.epsilon().unwrap_or(DEFAULT_EPSILON) };
        let (d, _) = build_labeled(&file.entries(), opts)?;
        *out(out_diagram)? = boxed(d);
        Ok(())
    })
}

/// The bundled 37-vector diagram.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_table1(out_diagram: *mut *mut VindefDiagram) -> VindefStatus {
    guard(|| {
        *out(out_diagram)? = boxed(data::table1_diagram()?);
        Ok(())
    })
}

/// The bundled 18-vector diagram in dimension 4.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_cabello18(out_diagram: *mut *mut VindefDiagram) -> VindefStatus {
    guard(|| {
        *out(out_diagram)? = boxed(data::cabello18_diagram()?);
        Ok(())
    })
}

/// # Safety
/// `d` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_free(d: *mut VindefDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_observable_count(d: *const VindefDiagram) -> usize {
    d.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `d` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_context_count(d: *const VindefDiagram) -> usize {
    d.as_ref().map_or(0, |d| d.0.contexts().len())
}

/// Resolves a label (`P_a` or `a`) or decimal id.
///
/// # Safety
/// `d` live, `label` NUL-terminated, `out_id` writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_find_label(
    d: *const VindefDiagram,
    label: *const c_char,
    out_id: *mut usize,
) -> VindefStatus {
    guard(|| {
        *out(out_id)? = diagram(d)?.resolve(text(label)?)?;
        Ok(())
    })
}

/// Serializes the diagram; free the string with [`vindef_string_free`].
///
/// # Safety
/// `d` live, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_diagram_to_json(d: *const VindefDiagram, out_json: *mut *mut c_char) -> VindefStatus {
    guard(|| {
        *out(out_json)? = owned_string(diagram(d)?.to_json()?);
        Ok(())
    })
}

/// Propagates `seeds`. On contradiction `out_observable` receives the
/// conflicting observable. `out_trace_json` may be null; otherwise it
/// receives the trace as JSON.
///
/// # Safety
/// `d` live; `seeds` points to `n_seeds` values (may be null when 0);
/// `out_outcome` and `out_observable` writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_propagate(
    d: *const VindefDiagram,
    seeds: *const VindefSeed,
    n_seeds: usize,
    out_outcome: *mut VindefOutcome,
    out_observable: *mut usize,
    out_trace_json: *mut *mut c_char,
) -> VindefStatus {
    guard(|| {
        let d = diagram(d)?;
        let seeds: &[VindefSeed] = match (seeds.is_null(), n_seeds) {
            (_, 0) => &[],
            (true, _) => return Err(null()),
            (false, n) => std::slice::from_raw_parts(seeds, n),
        };
        let mut a = Assignment::new();
        for s in seeds {
            if s.value > 1 {
                return Err(Fail(VindefStatus::Precondition, format!("seed value {} is not 0 or 1", s.value)));
            }
            a.set(s.id, s.value);
        }
        let res = propagate(d, &a)?;
        let (outcome, obs) = match &res.outcome {
            Outcome::Fixpoint(_) => (VindefOutcome::Fixpoint, usize::MAX),
            Outcome::Contradiction { observable, .. } => (VindefOutcome::Contradiction, *observable),
        };
        *out(out_outcome)? = outcome;
        *out(out_observable)? = obs;
        if !out_trace_json.is_null() {
            let json = serde_json::to_string(&res.trace).map_err(|e| Fail(VindefStatus::Internal, e.to_string()))?;
            *out_trace_json = owned_string(json);
        }
        Ok(())
    })
}

/// Counts total admissible assignments up to `cap`.
///
/// # Safety
/// `d` live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_search(
    d: *const VindefDiagram,
    cap: usize,
    out_count: *mut usize,
    out_capped: *mut bool,
) -> VindefStatus {
    guard(|| {
        let s = search_total_admissible(diagram(d)?, cap);
        *out(out_count)? = s.assignments.len();
        *out(out_capped)? = s.capped;
        Ok(())
    })
}

/// Builds the diagram and certificate for real 3-vectors `psi`, `phi`.
///
/// # Safety
/// `psi`, `phi` point to 3 doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_localize(
    psi: *const f64,
    phi: *const f64,
    out_diagram: *mut *mut VindefDiagram,
    out_certificate: *mut *mut VindefCertificate,
) -> VindefStatus {
    guard(|| {
        if psi.is_null() || phi.is_null() {
            return Err(null());
        }
        let psi = Vector::from_f64(std::slice::from_raw_parts(psi, 3));
        let phi = Vector::from_f64(std::slice::from_raw_parts(phi, 3));
        let (od, oc) = (out(out_diagram)?, out(out_certificate)?);
        let l = localize(&psi, &phi)?;
        *od = boxed(l.diagram);
        *oc = Box::into_raw(Box::new(VindefCertificate(l.certificate)));
        Ok(())
    })
}

/// # Safety
/// `json` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_certificate_from_json(
    json: *const c_char,
    out_certificate: *mut *mut VindefCertificate,
) -> VindefStatus {
    guard(|| {
        let c = Certificate::from_json(text(json)?)?;
        *out(out_certificate)? = Box::into_raw(Box::new(VindefCertificate(c)));
        Ok(())
    })
}

/// # Safety
/// `c` live; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_certificate_to_json(c: *const VindefCertificate, out_json: *mut *mut c_char) -> VindefStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(null)?;
        *out(out_json)? = owned_string(c.0.to_json()?);
        Ok(())
    })
}

/// # Safety
/// `c` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn vindef_certificate_free(c: *mut VindefCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Verifies `c` against `d`. `epsilon <= 0` selects the default tolerance.
/// On rejection `out_ok` is false and [`vindef_last_error`] lists the failures.
///
/// # Safety
/// Handles live; `out_ok` writable.
#[no_mangle]
pub unsafe extern "C" fn vindef_check(
    d: *const VindefDiagram,
    c: *const VindefCertificate,
    epsilon: f64,
    out_ok: *mut bool,
) -> VindefStatus {
    let mut failures = String::new();
    let status = guard(|| {
        let c = c.as_ref().ok_or_else(null)?;
        let eps = if epsilon > 0.0 { epsilon } else { vindef::checker::DEFAULT_CHECK_EPSILON };
        let v = check_certificate_with(diagram(d)?, &c.0, eps);
        *out(out_ok)? = v.ok;
        failures = v.failures.iter().map(|f| format!("{}: {}", f.stage.name(), f.detail)).collect::<Vec<_>>().join("\n");
        Ok(())
    });
    if status == VindefStatus::Ok && !failures.is_empty() {
        set_error(&failures);
    }
    status
}
