//! C ABI for `jacobi-mv`.
//!
//! Functionals and Jacobi sequences are opaque heap handles released with
//! their `_free` function. Every call returns a [`JmvStatus`]; on failure the
//! message is available from [`jmv_last_error_message`] on the same thread.
//! Strings handed out by the library are NUL-terminated, UTF-8, and must be
//! released with [`jmv_string_free`]. Rationals travel as `"p/q"` strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde::Serialize;

use jacobi_mv::jacobi_sequences::{detect_atoms, LevelJson, reconstruct_moments, sequences_for, AtomDetection, JacobiSequencePair};
use jacobi_mv::moments::{atomic_from_json, table_from_json, MomentFunctional};
use jacobi_mv::multiindex::MultiIndex;
use jacobi_mv::rational::{format_q, parse_q_list};
use jacobi_mv::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JmvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMeasure = 3,
    InsufficientMoments = 4,
    NotAState = 5,
    InsufficientDepth = 6,
    Representation = 7,
    Internal = 8,
    Panic = 9,
}

/// A normalized moment functional.
pub struct JmvFunctional(MomentFunctional);

/// Jacobi sequences `(Omega_n, alpha_{j|n})` up to some level.
pub struct JmvSequences(JacobiSequencePair);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> JmvStatus {
    match e {
        Error::InvalidMeasure(_) => JmvStatus::InvalidMeasure,
        Error::InsufficientMoments(_) => JmvStatus::InsufficientMoments,
        Error::NotAState(_) => JmvStatus::NotAState,
        Error::InsufficientDepth { .. } => JmvStatus::InsufficientDepth,
        Error::Representation(_) => JmvStatus::Representation,
        Error::InternalConsistency(_) => JmvStatus::Internal,
        _ => JmvStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JmvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JmvStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is null"));
            JmvStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside jacobi-mv".into());
            JmvStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::Malformed(format!("{what} is not UTF-8"))))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn beta_arg(beta: *const u32, len: usize) -> Result<MultiIndex, Failure> {
    if len > 0 && beta.is_null() {
        return Err(Failure::Null("beta"));
    }
    let v = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(beta, len).to_vec() };
    Ok(MultiIndex::new(v))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = CString::new(s).expect("library strings have no NULs").into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// owned by the library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn jmv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn jmv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Normalized Gaussian weight `exp(-|x|^2)` on R^d.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_functional_gaussian(d: usize, out: *mut *mut JmvFunctional) -> JmvStatus {
    guard(|| put(out, JmvFunctional(MomentFunctional::gaussian(d)?)))
}

/// Normalized product Gamma weight; `alpha` is a comma separated list of
/// rationals, one per coordinate.
///
/// # Safety
/// `alpha` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_functional_gamma(alpha: *const c_char, out: *mut *mut JmvFunctional) -> JmvStatus {
    guard(|| {
        let alpha = parse_q_list(str_arg(alpha, "alpha")?)?;
        put(out, JmvFunctional(MomentFunctional::gamma(alpha)?))
    })
}

/// Normalized product Beta weight `(1-x)^a (1+x)^b` on the cube.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_functional_beta(
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut JmvFunctional,
) -> JmvStatus {
    guard(|| {
        let a = parse_q_list(str_arg(a, "a")?)?;
        let b = parse_q_list(str_arg(b, "b")?)?;
        put(out, JmvFunctional(MomentFunctional::beta(a, b)?))
    })
}

/// Atomic-measure JSON (`{"d":..,"atoms":[..]}`) or moment-table JSON
/// (`{"d":..,"max_degree":..,"moments":[..]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_functional_from_json(json: *const c_char, out: *mut *mut JmvFunctional) -> JmvStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let f = match atomic_from_json(text) {
            Err(Error::Malformed(first)) => table_from_json(text).map_err(|e| match e {
                Error::Malformed(second) => {
                    Error::Malformed(format!("neither an atomic measure ({first}) nor a moment table ({second})"))
                }
                other => other,
            })?,
            other => other?,
        };
        put(out, JmvFunctional(f))
    })
}

/// # Safety
/// `f` must come from a `jmv_functional_*` constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn jmv_functional_free(f: *mut JmvFunctional) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Dimension of the functional, or 0 for a null handle.
///
/// # Safety
/// `f` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn jmv_functional_dimension(f: *const JmvFunctional) -> usize {
    f.as_ref().map_or(0, |f| f.0.d())
}

/// The moment `phi(x^beta)` as a rational string.
///
/// # Safety
/// `beta` must point to `len` integers; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_moment(
    f: *const JmvFunctional,
    beta: *const u32,
    len: usize,
    out: *mut *mut c_char,
) -> JmvStatus {
    guard(|| {
        let f = ref_arg(f, "functional")?;
        let v = f.0.moment(&beta_arg(beta, len)?)?;
        put_string(out, format_q(&v))
    })
}

/// Computes `Omega_n` and `alpha_{j|n}` for `n <= max_level`.
///
/// # Safety
/// `f` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_sequences_compute(
    f: *const JmvFunctional,
    max_level: usize,
    out: *mut *mut JmvSequences,
) -> JmvStatus {
    guard(|| {
        let f = ref_arg(f, "functional")?;
        put(out, JmvSequences(sequences_for(&f.0, max_level)?))
    })
}

/// # Safety
/// `s` must come from [`jmv_sequences_compute`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn jmv_sequences_free(s: *mut JmvSequences) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Highest level carrying both `Omega` and `alpha`.
///
/// # Safety
/// `s` must be a valid handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn jmv_sequences_max_level(s: *const JmvSequences) -> usize {
    s.as_ref().map_or(0, |s| s.0.alpha_levels().saturating_sub(1))
}

/// Exact rank of `Omega_level`.
///
/// # Safety
/// `s` must be a valid handle and `rank` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_sequences_rank(s: *const JmvSequences, level: usize, rank: *mut usize) -> JmvStatus {
    guard(|| {
        let s = ref_arg(s, "sequences")?;
        if level > s.0.max_level() {
            return Err(Error::InsufficientDepth { needed: level, available: s.0.max_level() }.into());
        }
        if rank.is_null() {
            return Err(Failure::Null("rank"));
        }
        *rank = s.0.rank(level);
        Ok(())
    })
}

/// All levels as JSON: `{"d":..,"levels":[{"n","classes","omega","rank","alpha"}]}`.
///
/// # Safety
/// `s` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_sequences_to_json(s: *const JmvSequences, out: *mut *mut c_char) -> JmvStatus {
    guard(|| {
        let s = ref_arg(s, "sequences")?;
        let doc = SequencesJson {
            d: s.0.d(),
            levels: (0..s.0.alpha_levels()).map(|n| s.0.level_json(n)).collect(),
        };
        let text = serde_json::to_string(&doc).map_err(|e| Error::Malformed(e.to_string()))?;
        put_string(out, text)
    })
}

#[derive(Serialize)]
struct SequencesJson {
    d: usize,
    levels: Vec<LevelJson>,
}

/// Moment `phi(x^beta)` recovered from the sequences alone.
///
/// # Safety
/// `beta` must point to `len` integers; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jmv_reconstruct_moment(
    s: *const JmvSequences,
    beta: *const u32,
    len: usize,
    out: *mut *mut c_char,
) -> JmvStatus {
    guard(|| {
        let s = ref_arg(s, "sequences")?;
        let v = reconstruct_moments(&s.0, &beta_arg(beta, len)?)?;
        put_string(out, format_q(&v))
    })
}

/// Searches levels `0..=max_level` for `Omega_n = 0`. On success `found` is
/// set; when true, `n0` and `atom_bound` hold the first vanishing level and
/// the bound on the number of atoms.
///
/// # Safety
/// `f` must be a valid handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jmv_detect_atoms(
    f: *const JmvFunctional,
    max_level: usize,
    found: *mut bool,
    n0: *mut usize,
    atom_bound: *mut u64,
) -> JmvStatus {
    guard(|| {
        let f = ref_arg(f, "functional")?;
        if found.is_null() || n0.is_null() || atom_bound.is_null() {
            return Err(Failure::Null("out"));
        }
        match detect_atoms(&f.0, max_level)? {
            AtomDetection::Atomic { n0: n, atom_bound: b } => {
                *found = true;
                *n0 = n;
                *atom_bound = b;
            }
            AtomDetection::Inconclusive { .. } => {
                *found = false;
                *n0 = 0;
                *atom_bound = 0;
            }
        }
        Ok(())
    })
}
