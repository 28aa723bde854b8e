//! C ABI over `gck`.
//!
//! Graphs and invariants cross the boundary as opaque handles. Every call
//! returns a [`GckStatus`]; on anything other than `GCK_STATUS_OK` the
//! message is available from [`gck_last_error`] until the next call on the
//! same thread. Strings returned through out-parameters are owned by the
//! caller and released with [`gck_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gck::extension::{check_main_theorem, check_synthesis_hypotheses, ExtensionData, Status};
use gck::graphs::{StagedGraph, VertexSet};
use gck::ktheory::{k_groups, staged_k_groups, DEFAULT_CAP};
use gck::sixterm::{augmented_from_staged, CheckStatus, Invariant};
use gck::synth::synthesize;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GckStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Unsupported = 4,
    Failed = 5,
    Panic = 6,
}

/// Three-valued outcome of a check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GckVerdict {
    Pass = 0,
    Fail = 1,
    Inconclusive = 2,
}

/// Finite or staged graph.
pub struct GckGraph(StagedGraph);

/// Six-term or augmented invariant.
pub struct GckInvariant(Invariant);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (GckStatus, String)>) -> GckStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GckStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GckStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (GckStatus, String)> {
    if p.is_null() {
        return Err((GckStatus::NullArgument, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (GckStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (GckStatus, String)> {
    p.as_ref().ok_or((GckStatus::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (GckStatus, String)> {
    if out.is_null() {
        return Err((GckStatus::NullArgument, "null out-parameter".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, v: T) -> Result<(), (GckStatus, String)> {
    if out.is_null() {
        return Err((GckStatus::NullArgument, "null out-parameter".into()));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

unsafe fn put_str(out: *mut *mut c_char, s: String) -> Result<(), (GckStatus, String)> {
    if out.is_null() {
        return Err((GckStatus::NullArgument, "null out-parameter".into()));
    }
    out.write(CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw());
    Ok(())
}

fn verdict_of(s: Status) -> GckVerdict {
    match s {
        Status::Pass | Status::Vacuous => GckVerdict::Pass,
        Status::Fail => GckVerdict::Fail,
        Status::Inconclusive => GckVerdict::Inconclusive,
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn gck_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn gck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a graph in the `v`/`e`/`tail`/`stationary` line format.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_graph_parse(src: *const c_char, out: *mut *mut GckGraph) -> GckStatus {
    guard(|| {
        let g = StagedGraph::parse(text(src)?).map_err(|e| (GckStatus::Parse, e.to_string()))?;
        put_box(out, GckGraph(g))
    })
}

/// # Safety
/// `g` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn gck_graph_free(g: *mut GckGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices in the finite core.
///
/// # Safety
/// `g` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_graph_vertex_count(g: *const GckGraph, out: *mut usize) -> GckStatus {
    guard(|| put(out, handle(g)?.0.core.vertex_count()))
}

/// Text form of the graph.
///
/// # Safety
/// `g` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_graph_to_text(g: *const GckGraph, out: *mut *mut c_char) -> GckStatus {
    guard(|| put_str(out, handle(g)?.0.to_text()))
}

/// K₀ and K₁ as canonical group descriptions such as `Z/2 + Z`. For a
/// staged graph whose connecting maps are not isomorphisms, both strings
/// describe the colimit system.
///
/// # Safety
/// `g` must be a valid handle; `k0` and `k1` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gck_graph_k_groups(
    g: *const GckGraph,
    k0: *mut *mut c_char,
    k1: *mut *mut c_char,
) -> GckStatus {
    guard(|| {
        let s = &handle(g)?.0;
        let (a, b) = if s.is_finite() {
            let k = k_groups(&s.core);
            (k.k0.to_string(), k.k1.to_string())
        } else {
            let k = staged_k_groups(s, DEFAULT_CAP).map_err(|e| (GckStatus::Unsupported, e.to_string()))?;
            if k.colimit_is_stage {
                (k.kpair.k0.to_string(), k.kpair.k1.to_string())
            } else {
                let m = |h: &gck::zlin::GroupHom| h.matrix().to_string();
                (
                    format!("colim({} via {})", k.kpair.k0, m(&k.k0_connecting)),
                    format!("colim({} via {})", k.kpair.k1, m(&k.k1_connecting)),
                )
            }
        };
        if k0.is_null() || k1.is_null() {
            return Err((GckStatus::NullArgument, "null out-parameter".into()));
        }
        put_str(k0, a)?;
        put_str(k1, b)
    })
}

/// Augmented invariant of a graph relative to an ideal given as
/// whitespace- or comma-separated vertex names.
///
/// # Safety
/// `g` must be a valid handle, `ideal` a nul-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_invariant_from_graph(
    g: *const GckGraph,
    ideal: *const c_char,
    out: *mut *mut GckInvariant,
) -> GckStatus {
    guard(|| {
        let s = &handle(g)?.0;
        let names: Vec<&str> = text(ideal)?.split([',', ' ', '\t']).filter(|n| !n.is_empty()).collect();
        let h = VertexSet::from_names(&s.core, &names).map_err(|e| (GckStatus::Parse, e.to_string()))?;
        let inv = augmented_from_staged(s, &h).map_err(|e| (GckStatus::Unsupported, e.to_string()))?;
        put_box(out, GckInvariant(inv))
    })
}

/// Parses an invariant in the `kind`/`group`/`map` line format.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_invariant_parse(src: *const c_char, out: *mut *mut GckInvariant) -> GckStatus {
    guard(|| {
        let inv = Invariant::parse(text(src)?).map_err(|e| (GckStatus::Parse, e.to_string()))?;
        put_box(out, GckInvariant(inv))
    })
}

/// # Safety
/// `inv` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn gck_invariant_free(inv: *mut GckInvariant) {
    if !inv.is_null() {
        drop(Box::from_raw(inv));
    }
}

/// # Safety
/// `inv` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_invariant_to_text(inv: *const GckInvariant, out: *mut *mut c_char) -> GckStatus {
    guard(|| put_str(out, handle(inv)?.0.to_text()))
}

/// Decides the extension conditions for an invariant file (six-term data
/// plus piece types). `report`, if not null, receives one line per
/// condition.
///
/// # Safety
/// `src` must be a nul-terminated string, `verdict` a valid pointer and
/// `report` null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_check_extension(
    src: *const c_char,
    verdict: *mut GckVerdict,
    report: *mut *mut c_char,
) -> GckStatus {
    guard(|| {
        let d = ExtensionData::parse(text(src)?).map_err(|e| (GckStatus::Parse, e.to_string()))?;
        let v = check_main_theorem(&d);
        if !report.is_null() {
            put_str(report, v.to_text())?;
        }
        put(verdict, verdict_of(v.overall()))
    })
}

/// Checks the synthesis hypotheses on an augmented invariant.
///
/// # Safety
/// `inv` must be a valid handle, `verdict` a valid pointer and `report`
/// null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gck_invariant_check_hypotheses(
    inv: *const GckInvariant,
    verdict: *mut GckVerdict,
    report: *mut *mut c_char,
) -> GckStatus {
    guard(|| {
        let v = check_synthesis_hypotheses(&handle(inv)?.0, DEFAULT_CAP)
            .map_err(|e| (GckStatus::Unsupported, e.to_string()))?;
        if !report.is_null() {
            put_str(report, v.to_text())?;
        }
        put(verdict, verdict_of(v.overall()))
    })
}

/// Builds a graph realizing an augmented invariant. The realization is
/// recomputed and checked against the input before it is returned;
/// `verdict` reports that check.
///
/// # Safety
/// `inv` must be a valid handle and `out`, `verdict` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gck_synthesize(
    inv: *const GckInvariant,
    out: *mut *mut GckGraph,
    verdict: *mut GckVerdict,
) -> GckStatus {
    guard(|| {
        let r = synthesize(&handle(inv)?.0).map_err(|e| (GckStatus::Failed, e.to_string()))?;
        let v = match r.report.overall() {
            CheckStatus::Pass => GckVerdict::Pass,
            CheckStatus::Fail => GckVerdict::Fail,
            CheckStatus::Inconclusive => GckVerdict::Inconclusive,
        };
        put(verdict, v)?;
        put_box(out, GckGraph(r.graph))
    })
}
