//! C interface.
//!
//! Every fallible call returns a [`PolyentStatus`]. On failure the message is
//! available from [`polyent_last_error_message`] on the same thread until the
//! next failing call. Objects created here are released with their matching
//! `_free` function; passing NULL to a `_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;

use polyent::io::{parse_state, StateInput};
use polyent::measures::PolynomialMeasure;
use polyent::oracle::{brute_force_roof, wootters_concurrence, OracleOptions};
use polyent::quantum::{DensityMatrix, PureState, C64};
use polyent::roof::ghzw::{axis_x_of_p, ghzw_tangle_on_axis, DEFAULT_GRID};
use polyent::roof::{roof_dispatch, RoofResult};
use polyent::Error;

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyentStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Dimension = 4,
    InvalidState = 5,
    Rank = 6,
    Range = 7,
    Structure = 8,
    Degenerate = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for PolyentStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension { .. } | Error::NotPowerOfTwo(_) | Error::QubitIndex { .. } => {
                Self::Dimension
            }
            Error::ZeroNorm | Error::InvalidDensity(_) => Self::InvalidState,
            Error::Rank { .. } => Self::Rank,
            Error::Range(_) => Self::Range,
            Error::Structure { .. } => Self::Structure,
            Error::Degenerate => Self::Degenerate,
            Error::Parse(_) => Self::Parse,
            Error::Io(_) => Self::Io,
            _ => Self::InvalidArgument,
        }
    }
}

/// A polynomial entanglement measure.
pub struct PolyentMeasure(PolynomialMeasure);

/// A pure state or a density matrix.
pub struct PolyentState(StateInput);

/// A computed convex roof.
pub struct PolyentRoof {
    result: RoofResult,
    method: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("no interior NUL"));
}

/// Runs `body`, recording errors and catching panics.
fn guard<F: FnOnce() -> Result<(), PolyentStatus>>(body: F) -> PolyentStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PolyentStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            PolyentStatus::Panic
        }
    }
}

fn fail(e: Error) -> PolyentStatus {
    set_error(e.to_string());
    PolyentStatus::from(&e)
}

fn null(what: &str) -> PolyentStatus {
    set_error(format!("{what} is NULL"));
    PolyentStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, PolyentStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, PolyentStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, PolyentStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        PolyentStatus::InvalidArgument
    })
}

unsafe fn complex_vec(
    re: *const f64,
    im: *const f64,
    len: usize,
) -> Result<Vec<C64>, PolyentStatus> {
    if re.is_null() {
        return Err(null("re"));
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(im, len))
    };
    Ok((0..len)
        .map(|i| C64::new(re[i], im.map_or(0.0, |v| v[i])))
        .collect())
}

fn qubit_dim(n_qubits: u32) -> Result<usize, PolyentStatus> {
    if n_qubits == 0 || n_qubits > 16 {
        set_error(format!("{n_qubits} qubits is outside 1..=16"));
        return Err(PolyentStatus::InvalidArgument);
    }
    Ok(1 << n_qubits)
}

/// Message of the last failing call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn polyent_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn polyent_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Looks up a measure by name: `concurrence`, `tangle` or `sqrt-tangle`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polyent_measure_new(
    name: *const c_char,
    out_measure: *mut *mut PolyentMeasure,
) -> PolyentStatus {
    guard(|| {
        let slot = out(out_measure, "out_measure")?;
        *slot = ptr::null_mut();
        let m = PolynomialMeasure::by_name(text(name, "name")?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(PolyentMeasure(m)));
        Ok(())
    })
}

/// # Safety
/// `measure` must come from [`polyent_measure_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_measure_free(measure: *mut PolyentMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

/// Number of qubits the measure acts on, or 0 for NULL.
///
/// # Safety
/// `measure` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_measure_qubits(measure: *const PolyentMeasure) -> u32 {
    measure.as_ref().map_or(0, |m| m.0.arity().trailing_zeros())
}

/// Reads a state from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_state` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polyent_state_from_json(
    json: *const c_char,
    out_state: *mut *mut PolyentState,
) -> PolyentStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        *slot = ptr::null_mut();
        let s = parse_state(text(json, "json")?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(PolyentState(s)));
        Ok(())
    })
}

/// Builds a pure state from `2^n_qubits` amplitudes. `im` may be NULL for
/// real amplitudes. The vector is normalized.
///
/// # Safety
/// `re` (and `im` unless NULL) must point to `2^n_qubits` doubles.
#[no_mangle]
pub unsafe extern "C" fn polyent_state_pure(
    n_qubits: u32,
    re: *const f64,
    im: *const f64,
    out_state: *mut *mut PolyentState,
) -> PolyentStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        *slot = ptr::null_mut();
        let dim = qubit_dim(n_qubits)?;
        let psi = PureState::new(complex_vec(re, im, dim)?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(PolyentState(StateInput::Pure(psi))));
        Ok(())
    })
}

/// Builds a density matrix from `4^n_qubits` entries in row-major order.
/// `im` may be NULL for a real matrix.
///
/// # Safety
/// `re` (and `im` unless NULL) must point to `4^n_qubits` doubles.
#[no_mangle]
pub unsafe extern "C" fn polyent_state_density(
    n_qubits: u32,
    re: *const f64,
    im: *const f64,
    out_state: *mut *mut PolyentState,
) -> PolyentStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        *slot = ptr::null_mut();
        let dim = qubit_dim(n_qubits)?;
        let entries = complex_vec(re, im, dim * dim)?;
        let m = DMatrix::from_row_slice(dim, dim, &entries);
        let rho = DensityMatrix::new(m).map_err(fail)?;
        *slot = Box::into_raw(Box::new(PolyentState(StateInput::Mixed(rho))));
        Ok(())
    })
}

/// # Safety
/// `state` must come from a `polyent_state_*` constructor or be NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_state_free(state: *mut PolyentState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of qubits, or 0 for NULL.
///
/// # Safety
/// `state` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_state_qubits(state: *const PolyentState) -> u32 {
    state.as_ref().map_or(0, |s| s.0.n_qubits() as u32)
}

/// Measure of a pure state (or rank-1 density matrix).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polyent_entangle(
    measure: *const PolyentMeasure,
    state: *const PolyentState,
    out_value: *mut f64,
) -> PolyentStatus {
    guard(|| {
        let m = &deref(measure, "measure")?.0;
        let s = &deref(state, "state")?.0;
        let value = out(out_value, "out_value")?;
        let psi = s.to_pure().map_err(fail)?;
        *value = m.eval(&psi).map_err(fail)?;
        Ok(())
    })
}

/// Convex roof of a rank-1 or rank-2 state with automatic method choice.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polyent_roof(
    measure: *const PolyentMeasure,
    state: *const PolyentState,
    out_roof: *mut *mut PolyentRoof,
) -> PolyentStatus {
    guard(|| {
        let slot = out(out_roof, "out_roof")?;
        *slot = ptr::null_mut();
        let m = &deref(measure, "measure")?.0;
        let s = &deref(state, "state")?.0;
        let result = roof_dispatch(m, &s.to_density()).map_err(fail)?;
        let method = CString::new(result.method.as_str()).expect("no interior NUL");
        *slot = Box::into_raw(Box::new(PolyentRoof { result, method }));
        Ok(())
    })
}

/// # Safety
/// `roof` must come from [`polyent_roof`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_roof_free(roof: *mut PolyentRoof) {
    if !roof.is_null() {
        drop(Box::from_raw(roof));
    }
}

/// Roof value, or NaN for NULL.
///
/// # Safety
/// `roof` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_roof_value(roof: *const PolyentRoof) -> f64 {
    roof.as_ref().map_or(f64::NAN, |r| r.result.value)
}

/// Whether the value is exact rather than an upper bound.
///
/// # Safety
/// `roof` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_roof_is_exact(roof: *const PolyentRoof) -> bool {
    roof.as_ref().is_some_and(|r| r.result.exact)
}

/// Name of the method used. Owned by `roof`.
///
/// # Safety
/// `roof` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_roof_method(roof: *const PolyentRoof) -> *const c_char {
    roof.as_ref().map_or(ptr::null(), |r| r.method.as_ptr())
}

/// Members in the optimal decomposition (0 when none was produced).
///
/// # Safety
/// `roof` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn polyent_roof_witness_len(roof: *const PolyentRoof) -> usize {
    roof.as_ref()
        .and_then(|r| r.result.witness.as_ref())
        .map_or(0, Vec::len)
}

/// Copies witness member `index`: its weight and `dim` amplitudes.
///
/// # Safety
/// `out_re` and `out_im` must each hold `dim` doubles, where `dim` is
/// `2^qubits` of the state.
#[no_mangle]
pub unsafe extern "C" fn polyent_roof_witness_member(
    roof: *const PolyentRoof,
    index: usize,
    out_weight: *mut f64,
    out_re: *mut f64,
    out_im: *mut f64,
    dim: usize,
) -> PolyentStatus {
    guard(|| {
        let r = deref(roof, "roof")?;
        let weight = out(out_weight, "out_weight")?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output amplitudes"));
        }
        let Some((w, psi)) = r.result.witness.as_ref().and_then(|w| w.get(index)) else {
            set_error(format!("no witness member {index}"));
            return Err(PolyentStatus::InvalidArgument);
        };
        if psi.dim() != dim {
            return Err(fail(Error::Dimension {
                expected: psi.dim(),
                got: dim,
            }));
        }
        *weight = *w;
        let re = std::slice::from_raw_parts_mut(out_re, dim);
        let im = std::slice::from_raw_parts_mut(out_im, dim);
        for (i, z) in psi.amplitudes().iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// Brute-force upper bound on the roof.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polyent_oracle(
    measure: *const PolyentMeasure,
    state: *const PolyentState,
    ensemble_size: usize,
    restarts: usize,
    seed: u64,
    out_value: *mut f64,
) -> PolyentStatus {
    guard(|| {
        let m = &deref(measure, "measure")?.0;
        let s = &deref(state, "state")?.0;
        let value = out(out_value, "out_value")?;
        let opts = OracleOptions {
            ensemble_size,
            restarts,
            seed,
            ..OracleOptions::default()
        };
        *value = brute_force_roof(m, &s.to_density(), &opts)
            .map_err(fail)?
            .value;
        Ok(())
    })
}

/// Two-qubit concurrence from Wootters' formula.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polyent_wootters(
    state: *const PolyentState,
    out_value: *mut f64,
) -> PolyentStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let value = out(out_value, "out_value")?;
        *value = wootters_concurrence(&s.to_density()).map_err(fail)?;
        Ok(())
    })
}

/// Three-tangle of `p|GHZ><GHZ| + (1-p)|W><W|`.
///
/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn polyent_ghzw_tangle(p: f64, out_value: *mut f64) -> PolyentStatus {
    guard(|| {
        let value = out(out_value, "out_value")?;
        if !(0.0..=1.0).contains(&p) {
            set_error(format!("mixing weight {p} outside [0, 1]"));
            return Err(PolyentStatus::InvalidArgument);
        }
        *value = ghzw_tangle_on_axis(axis_x_of_p(p), DEFAULT_GRID).map_err(fail)?;
        Ok(())
    })
}
