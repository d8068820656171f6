//! C ABI over the core library.
//!
//! Instances are opaque handles created by `sfx_instance_*` and released with
//! `sfx_instance_free`. Every fallible call returns an [`SfxStatus`]; on
//! failure `sfx_last_error` describes the problem for the calling thread.
//! Strings handed out by the library are freed with `sfx_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stable_fixtures::generate::{random_instance, CapSpec};
use stable_fixtures::gsp::{decide_solvable, reduce_gsp, Solvability};
use stable_fixtures::ilp::{build_base_model, solve, with_objective, ObjectiveKind, SolveOptions, SolveStatus};
use stable_fixtures::instance::{parse_instance, serialize_instance};
use stable_fixtures::nearfeasible::near_feasible;
use stable_fixtures::reduction::compute_gsp;
use stable_fixtures::SfInstance;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInstance = 4,
    Unsolvable = 5,
    SearchLimit = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// ILP objectives.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfxObjective {
    Reduced = 0,
    Rank1 = 1,
    Egal = 2,
}

/// Opaque instance handle.
pub struct SfxInstance {
    inner: SfInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(code: SfxStatus, msg: impl Into<String>) -> SfxStatus {
    set_error(msg);
    code
}

fn guard(f: impl FnOnce() -> SfxStatus) -> SfxStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SfxStatus::Internal, "internal panic"))
}

unsafe fn instance<'a>(h: *const SfxInstance) -> Result<&'a SfInstance, SfxStatus> {
    h.as_ref().map(|h| &h.inner).ok_or_else(|| fail(SfxStatus::NullPointer, "null instance handle"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> SfxStatus {
    if out.is_null() {
        return fail(SfxStatus::NullPointer, "null output pointer");
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            SfxStatus::Ok
        }
        Err(_) => fail(SfxStatus::Internal, "string contains NUL"),
    }
}

unsafe fn put_instance(out: *mut *mut SfxInstance, inst: SfInstance) -> SfxStatus {
    if out.is_null() {
        return fail(SfxStatus::NullPointer, "null output pointer");
    }
    *out = Box::into_raw(Box::new(SfxInstance { inner: inst }));
    SfxStatus::Ok
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sfx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses an instance in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfx_instance_parse(text: *const c_char, out: *mut *mut SfxInstance) -> SfxStatus {
    guard(|| {
        if text.is_null() {
            return fail(SfxStatus::NullPointer, "null text");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(SfxStatus::InvalidUtf8, "text is not UTF-8");
        };
        match parse_instance(s) {
            Ok(inst) => put_instance(out, inst),
            Err(e) => fail(SfxStatus::Parse, e.to_string()),
        }
    })
}

/// Random complete instance with uniform capacity `cap`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfx_instance_random(n: usize, cap: u32, seed: u64, out: *mut *mut SfxInstance) -> SfxStatus {
    guard(|| match random_instance(n, &CapSpec::Uniform(cap), seed) {
        Ok(inst) => put_instance(out, inst),
        Err(e) => fail(SfxStatus::InvalidInstance, e.to_string()),
    })
}

/// # Safety
/// `inst` must come from this library or be NULL; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sfx_instance_free(inst: *mut SfxInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of agents, or 0 for NULL.
///
/// # Safety
/// `inst` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sfx_instance_agents(inst: *const SfxInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.inner.n())
}

/// Writes the capacities into `caps[0..len]`.
///
/// # Safety
/// `inst` must be a live handle and `caps` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn sfx_instance_caps(inst: *const SfxInstance, caps: *mut u32, len: usize) -> SfxStatus {
    guard(|| {
        let inst = match instance(inst) {
            Ok(i) => i,
            Err(s) => return s,
        };
        if caps.is_null() {
            return fail(SfxStatus::NullPointer, "null capacity buffer");
        }
        if len < inst.n() {
            return fail(SfxStatus::BufferTooSmall, format!("need {} slots", inst.n()));
        }
        ptr::copy_nonoverlapping(inst.caps().as_ptr(), caps, inst.n());
        SfxStatus::Ok
    })
}

/// The instance in the text format.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfx_instance_to_text(inst: *const SfxInstance, out: *mut *mut c_char) -> SfxStatus {
    guard(|| match instance(inst) {
        Ok(i) => put_string(out, serialize_instance(i)),
        Err(s) => s,
    })
}

/// A generalised stable partition as cycle text, optionally reduced.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfx_gsp(inst: *const SfxInstance, reduced: bool, out: *mut *mut c_char) -> SfxStatus {
    guard(|| {
        let inst = match instance(inst) {
            Ok(i) => i,
            Err(s) => return s,
        };
        let g = compute_gsp(inst);
        let g = if reduced {
            match reduce_gsp(inst, &g) {
                Ok(g) => g,
                Err(e) => return fail(SfxStatus::Internal, e.to_string()),
            }
        } else {
            g
        };
        put_string(out, g.to_text())
    })
}

/// Decides solvability. On `SFX_STATUS_OK`, `out` holds a stable matching;
/// on `SFX_STATUS_UNSOLVABLE`, it holds the odd cycles.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfx_solve(inst: *const SfxInstance, out: *mut *mut c_char) -> SfxStatus {
    guard(|| {
        let inst = match instance(inst) {
            Ok(i) => i,
            Err(s) => return s,
        };
        match decide_solvable(inst) {
            Ok(Solvability::Solvable { matching }) => put_string(out, matching.to_text()),
            Ok(Solvability::Unsolvable { odd_cycles }) => {
                let s = put_string(out, stable_fixtures::cycles::format_cycles(&odd_cycles));
                if s == SfxStatus::Ok {
                    fail(SfxStatus::Unsolvable, "instance admits no stable matching")
                } else {
                    s
                }
            }
            Err(e) => fail(SfxStatus::Internal, e.to_string()),
        }
    })
}

/// Repairs capacities so a stable matching exists. Writes the new
/// capacities to `caps[0..len]` and the matching text to `out`.
///
/// # Safety
/// `inst` must be a live handle, `caps` must hold `len` values, and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfx_near_feasible(
    inst: *const SfxInstance,
    caps: *mut u32,
    len: usize,
    out: *mut *mut c_char,
) -> SfxStatus {
    guard(|| {
        let inst = match instance(inst) {
            Ok(i) => i,
            Err(s) => return s,
        };
        if caps.is_null() {
            return fail(SfxStatus::NullPointer, "null capacity buffer");
        }
        if len < inst.n() {
            return fail(SfxStatus::BufferTooSmall, format!("need {} slots", inst.n()));
        }
        match near_feasible(inst, &compute_gsp(inst)) {
            Ok(r) => {
                ptr::copy_nonoverlapping(r.new_caps.as_ptr(), caps, inst.n());
                put_string(out, r.matching.to_text())
            }
            Err(e) => fail(SfxStatus::InvalidInstance, e.to_string()),
        }
    })
}

/// Optimal ILP objective as an exact fraction `num / den`, with a node limit
/// (0 for the default).
///
/// # Safety
/// `inst` must be a live handle; `num` and `den` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sfx_ilp_optimum(
    inst: *const SfxInstance,
    objective: SfxObjective,
    node_limit: u64,
    num: *mut i64,
    den: *mut i64,
) -> SfxStatus {
    guard(|| {
        let inst = match instance(inst) {
            Ok(i) => i,
            Err(s) => return s,
        };
        if num.is_null() || den.is_null() {
            return fail(SfxStatus::NullPointer, "null output pointer");
        }
        let kind = match objective {
            SfxObjective::Reduced => ObjectiveKind::Reduced,
            SfxObjective::Rank1 => ObjectiveKind::Rank1,
            SfxObjective::Egal => ObjectiveKind::Egal,
        };
        let m = with_objective(inst, build_base_model(inst), kind);
        let mut opts = SolveOptions::default();
        if node_limit > 0 {
            opts.node_limit = Some(node_limit);
        }
        let s = solve(&m, &opts);
        match (s.status, s.objective) {
            (SolveStatus::Optimal, Some(r)) => {
                *num = r.num;
                *den = r.den;
                SfxStatus::Ok
            }
            (SolveStatus::BoundLimit, _) => fail(SfxStatus::SearchLimit, format!("stopped after {} nodes", s.nodes)),
            _ => fail(SfxStatus::Internal, "model infeasible"),
        }
    })
}

/// # Safety
/// `s` must come from this library or be NULL; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sfx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
