//! C interface over the dyadlab library: opaque handles for signals and
//! Haar coefficient sets, status codes instead of `Result`, and a
//! thread-local error message for the last failure.
//!
//! Ownership rules are the usual ones for handle-based C APIs: every
//! `*_new`, `*_parse`, and producing call hands back an object the caller
//! must release with the matching `*_free`, JSON strings go back through
//! [`dyad_string_free`], and out parameters are written only when the
//! return status is `Ok`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;

use dyadlab::functionals::{norm_1d, norm_2d, parse_norm_kind};
use dyadlab::io::{self, AnyCoeffs, AnySignal};
use dyadlab::opnorm::{
    build_hadamard_example, build_identity_example, opnorm_l2, pi4_matrix_bound,
};
use dyadlab::paraproduct::{NamedOperator1D, NamedOperator2D, OperatorKind1D, OperatorKind2D};
use dyadlab::{Error, Grid1D, Grid2D, HaarCoeffs1D, HaarCoeffs2D, Signal1D, Signal2D};

/// A one- or two-variable signal on a dyadic grid.
pub struct DyadSignal(AnySignal);

/// A Haar coefficient set (mean part plus cancellative blocks).
pub struct DyadCoeffs(AnyCoeffs);

/// Result of every fallible call. Anything other than `Ok` leaves a
/// human-readable explanation in [`dyad_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyadStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A token, exponent, or size was rejected.
    InvalidArgument = 2,
    /// Handle dimensions or buffer lengths do not line up.
    DimensionMismatch = 3,
    /// A value was NaN or infinite.
    NonFinite = 4,
    /// JSON input could not be decoded.
    ParseError = 5,
    /// The input was legal but has no usable content (e.g. a zero symbol).
    Degenerate = 6,
    /// A bug on the library side; please report it.
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DyadStatus {
    match e {
        Error::NonFinite(_) => DyadStatus::NonFinite,
        Error::Malformed(_) | Error::Json(_) => DyadStatus::ParseError,
        Error::DimensionMismatch(_) | Error::GridMismatch(_) | Error::LengthMismatch { .. } => {
            DyadStatus::DimensionMismatch
        }
        Error::Degenerate(_) => DyadStatus::Degenerate,
        Error::Io(_) => DyadStatus::Internal,
        _ => DyadStatus::InvalidArgument,
    }
}

/// Runs a fallible body, translating errors and panics into statuses. A
/// panic never crosses the boundary.
fn run(body: impl FnOnce() -> dyadlab::Result<()>) -> DyadStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DyadStatus::Ok,
        Ok(Err(e)) => {
            let status = status_of(&e);
            set_error(e.to_string());
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            DyadStatus::Internal
        }
    }
}

fn null_arg(name: &str) -> DyadStatus {
    set_error(format!("null pointer argument: {name}"));
    DyadStatus::NullPointer
}

unsafe fn text_arg<'a>(p: *const c_char) -> dyadlab::Result<&'a str> {
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::Malformed("string argument is not valid UTF-8".into()))
}

unsafe fn give<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static string; never free it.
#[no_mangle]
pub extern "C" fn dyad_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or null if the
/// last call succeeded. The pointer stays valid until the next fallible
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn dyad_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a `*_to_json` call and not freed yet;
/// null is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn dyad_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a one-variable signal from `len` cell values on a grid with
/// `2^resolution` cells.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be a valid
/// write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_new_1d(
    resolution: u32,
    values: *const f64,
    len: usize,
    out: *mut *mut DyadSignal,
) -> DyadStatus {
    if values.is_null() {
        return null_arg("values");
    }
    if out.is_null() {
        return null_arg("out");
    }
    let vals = std::slice::from_raw_parts(values, len).to_vec();
    run(|| {
        let f = Signal1D::new(Grid1D::new(resolution)?, vals)?;
        give(out, DyadSignal(AnySignal::One(f)));
        Ok(())
    })
}

/// Builds a two-variable signal from `len` cell values in x-major order
/// on a `2^res_x` by `2^res_y` grid.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be a valid
/// write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_new_2d(
    res_x: u32,
    res_y: u32,
    values: *const f64,
    len: usize,
    out: *mut *mut DyadSignal,
) -> DyadStatus {
    if values.is_null() {
        return null_arg("values");
    }
    if out.is_null() {
        return null_arg("out");
    }
    let vals = std::slice::from_raw_parts(values, len).to_vec();
    run(|| {
        let f = Signal2D::new(Grid2D::new(res_x, res_y)?, vals)?;
        give(out, DyadSignal(AnySignal::Two(f)));
        Ok(())
    })
}

/// Decodes signal JSON (the same wire format the CLI uses).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid write
/// target.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_parse(
    json: *const c_char,
    out: *mut *mut DyadSignal,
) -> DyadStatus {
    if json.is_null() {
        return null_arg("json");
    }
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let f = io::parse_signal(text_arg(json)?)?;
        give(out, DyadSignal(f));
        Ok(())
    })
}

/// Encodes a signal as JSON; release the string with
/// [`dyad_string_free`].
///
/// # Safety
/// `sig` must be a live signal handle; `out` must be a valid write
/// target.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_to_json(
    sig: *const DyadSignal,
    out: *mut *mut c_char,
) -> DyadStatus {
    let Some(sig) = sig.as_ref() else {
        return null_arg("sig");
    };
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let text = match &sig.0 {
            AnySignal::One(f) => io::signal_1d_json(f)?,
            AnySignal::Two(f) => io::signal_2d_json(f)?,
        };
        let c = CString::new(text).expect("serializer never emits NUL");
        *out = c.into_raw();
        Ok(())
    })
}

/// Number of grid cells, or 0 for a null handle.
///
/// # Safety
/// `sig` must be null or a live signal handle.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_len(sig: *const DyadSignal) -> usize {
    match sig.as_ref() {
        Some(DyadSignal(AnySignal::One(f))) => f.values().len(),
        Some(DyadSignal(AnySignal::Two(f))) => f.values().len(),
        None => 0,
    }
}

/// 1 or 2, or 0 for a null handle.
///
/// # Safety
/// `sig` must be null or a live signal handle.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_dims(sig: *const DyadSignal) -> u8 {
    match sig.as_ref() {
        Some(DyadSignal(AnySignal::One(_))) => 1,
        Some(DyadSignal(AnySignal::Two(_))) => 2,
        None => 0,
    }
}

/// Copies all cell values into `buf`; `len` must equal
/// [`dyad_signal_len`].
///
/// # Safety
/// `sig` must be a live signal handle and `buf` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_copy_values(
    sig: *const DyadSignal,
    buf: *mut f64,
    len: usize,
) -> DyadStatus {
    let Some(sig) = sig.as_ref() else {
        return null_arg("sig");
    };
    if buf.is_null() {
        return null_arg("buf");
    }
    run(|| {
        let values = match &sig.0 {
            AnySignal::One(f) => f.values(),
            AnySignal::Two(f) => f.values(),
        };
        if len != values.len() {
            return Err(Error::LengthMismatch {
                got: len,
                want: values.len(),
            });
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
        Ok(())
    })
}

/// Releases a signal handle; null is ignored.
///
/// # Safety
/// `sig` must be null or a live signal handle, and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn dyad_signal_free(sig: *mut DyadSignal) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// Haar analysis: signal to coefficient set.
///
/// # Safety
/// `sig` must be a live signal handle; `out` must be a valid write
/// target.
#[no_mangle]
pub unsafe extern "C" fn dyad_forward(
    sig: *const DyadSignal,
    out: *mut *mut DyadCoeffs,
) -> DyadStatus {
    let Some(sig) = sig.as_ref() else {
        return null_arg("sig");
    };
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let c = match &sig.0 {
            AnySignal::One(f) => AnyCoeffs::One(HaarCoeffs1D::forward(f)),
            AnySignal::Two(f) => AnyCoeffs::Two(HaarCoeffs2D::forward(f)),
        };
        give(out, DyadCoeffs(c));
        Ok(())
    })
}

/// Haar synthesis: coefficient set back to a signal.
///
/// # Safety
/// `coeffs` must be a live coefficient handle; `out` must be a valid
/// write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_inverse(
    coeffs: *const DyadCoeffs,
    out: *mut *mut DyadSignal,
) -> DyadStatus {
    let Some(coeffs) = coeffs.as_ref() else {
        return null_arg("coeffs");
    };
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let f = match &coeffs.0 {
            AnyCoeffs::One(c) => AnySignal::One(c.inverse()),
            AnyCoeffs::Two(c) => AnySignal::Two(c.inverse()),
        };
        give(out, DyadSignal(f));
        Ok(())
    })
}

/// Decodes coefficient JSON (the same wire format the CLI uses).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid write
/// target.
#[no_mangle]
pub unsafe extern "C" fn dyad_coeffs_parse(
    json: *const c_char,
    out: *mut *mut DyadCoeffs,
) -> DyadStatus {
    if json.is_null() {
        return null_arg("json");
    }
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let c = io::parse_coeffs(text_arg(json)?)?;
        give(out, DyadCoeffs(c));
        Ok(())
    })
}

/// Encodes a coefficient set as JSON; release the string with
/// [`dyad_string_free`].
///
/// # Safety
/// `coeffs` must be a live coefficient handle; `out` must be a valid
/// write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_coeffs_to_json(
    coeffs: *const DyadCoeffs,
    out: *mut *mut c_char,
) -> DyadStatus {
    let Some(coeffs) = coeffs.as_ref() else {
        return null_arg("coeffs");
    };
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let text = match &coeffs.0 {
            AnyCoeffs::One(c) => io::coeffs_1d_json(c)?,
            AnyCoeffs::Two(c) => io::coeffs_2d_json(c)?,
        };
        let c = CString::new(text).expect("serializer never emits NUL");
        *out = c.into_raw();
        Ok(())
    })
}

/// Releases a coefficient handle; null is ignored.
///
/// # Safety
/// `coeffs` must be null or a live coefficient handle, and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dyad_coeffs_free(coeffs: *mut DyadCoeffs) {
    if !coeffs.is_null() {
        drop(Box::from_raw(coeffs));
    }
}

/// Evaluates a norm of a signal. `kind` takes the CLI tokens (`lp`,
/// `hp-square`, `hp-maximal`, `bmo-line`, `product-bmo-exact`,
/// `product-bmo-heuristic`, `slice-bmo-sup`, `slice-hr-lr`), with the
/// exponent either inline (`hp-square:1.5`) or in `exponent`; pass NaN
/// when the kind takes none.
///
/// # Safety
/// `sig` must be a live signal handle, `kind` a NUL-terminated string,
/// and `out` a valid write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_norm(
    sig: *const DyadSignal,
    kind: *const c_char,
    exponent: f64,
    out: *mut f64,
) -> DyadStatus {
    let Some(sig) = sig.as_ref() else {
        return null_arg("sig");
    };
    if kind.is_null() {
        return null_arg("kind");
    }
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let p = (!exponent.is_nan()).then_some(exponent);
        let nk = parse_norm_kind(text_arg(kind)?, p, p)?;
        let value = match &sig.0 {
            AnySignal::One(f) => norm_1d(f, nk)?,
            AnySignal::Two(f) => norm_2d(f, nk)?,
        };
        *out = value;
        Ok(())
    })
}

enum AnyKind {
    One(OperatorKind1D),
    Two(OperatorKind2D),
}

fn parse_kind(token: &str) -> dyadlab::Result<AnyKind> {
    OperatorKind2D::from_str(token)
        .map(AnyKind::Two)
        .or_else(|_| OperatorKind1D::from_str(token).map(AnyKind::One))
        .map_err(|_| Error::InvalidParameter(format!("unknown operator token {token:?}")))
}

/// Applies a named operator with symbol `g` to `f`. `op` takes `pi1`,
/// `pi1t`, `pi2`, `pi3`, `pi4` for two-variable handles and `pig`,
/// `pigp`, `pigpp` for one-variable ones.
///
/// # Safety
/// `op` must be a NUL-terminated string, `g` a live coefficient handle,
/// `f` a live signal handle, and `out` a valid write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_apply(
    op: *const c_char,
    g: *const DyadCoeffs,
    f: *const DyadSignal,
    out: *mut *mut DyadSignal,
) -> DyadStatus {
    if op.is_null() {
        return null_arg("op");
    }
    let Some(g) = g.as_ref() else {
        return null_arg("g");
    };
    let Some(f) = f.as_ref() else {
        return null_arg("f");
    };
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let result = match (parse_kind(text_arg(op)?)?, &g.0, &f.0) {
            (AnyKind::Two(kind), AnyCoeffs::Two(gc), AnySignal::Two(ff)) => {
                AnySignal::Two(NamedOperator2D::from_coeffs(kind, gc.clone()).apply(ff)?)
            }
            (AnyKind::One(kind), AnyCoeffs::One(gc), AnySignal::One(ff)) => {
                AnySignal::One(NamedOperator1D::from_coeffs(kind, gc.clone()).apply(ff)?)
            }
            _ => {
                return Err(Error::DimensionMismatch(
                    "operator arity does not match the symbol and operand dimensions".into(),
                ))
            }
        };
        give(out, DyadSignal(result));
        Ok(())
    })
}

/// Spectral norm of a named operator on `L^2`, by power iteration.
///
/// # Safety
/// `op` must be a NUL-terminated string, `g` a live coefficient handle,
/// and `out` a valid write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_opnorm_l2(
    op: *const c_char,
    g: *const DyadCoeffs,
    out: *mut f64,
) -> DyadStatus {
    if op.is_null() {
        return null_arg("op");
    }
    let Some(g) = g.as_ref() else {
        return null_arg("g");
    };
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let report = match (parse_kind(text_arg(op)?)?, &g.0) {
            (AnyKind::Two(kind), AnyCoeffs::Two(gc)) => {
                opnorm_l2(&NamedOperator2D::from_coeffs(kind, gc.clone()))
            }
            (AnyKind::One(kind), AnyCoeffs::One(gc)) => {
                opnorm_l2(&NamedOperator1D::from_coeffs(kind, gc.clone()))
            }
            _ => {
                return Err(Error::DimensionMismatch(
                    "operator arity does not match the symbol dimensions".into(),
                ))
            }
        };
        *out = report.value;
        Ok(())
    })
}

/// Upper bound for the mixed-form operator norm of a two-variable
/// symbol, from the per-cell matrix view.
///
/// # Safety
/// `g` must be a live two-variable coefficient handle and `out` a valid
/// write target.
#[no_mangle]
pub unsafe extern "C" fn dyad_matrix_bound(g: *const DyadCoeffs, out: *mut f64) -> DyadStatus {
    let Some(g) = g.as_ref() else {
        return null_arg("g");
    };
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let gc = match &g.0 {
            AnyCoeffs::Two(gc) => gc,
            AnyCoeffs::One(_) => {
                return Err(Error::DimensionMismatch(
                    "the matrix view needs a two-variable symbol".into(),
                ))
            }
        };
        *out = pi4_matrix_bound(gc).value;
        Ok(())
    })
}

/// Builds one of the named coefficient families (`hadamard` or
/// `identity`) with `n` level generations on an `n`-level square grid.
///
/// # Safety
/// `example` must be a NUL-terminated string and `out` a valid write
/// target.
#[no_mangle]
pub unsafe extern "C" fn dyad_construct(
    example: *const c_char,
    n: usize,
    out: *mut *mut DyadCoeffs,
) -> DyadStatus {
    if example.is_null() {
        return null_arg("example");
    }
    if out.is_null() {
        return null_arg("out");
    }
    run(|| {
        let side = u32::try_from(n)
            .map_err(|_| Error::InvalidParameter(format!("example size {n} out of range")))?;
        let grid = Grid2D::new(side, side)?;
        let c = match text_arg(example)? {
            "hadamard" => build_hadamard_example(grid, n)?,
            "identity" => build_identity_example(grid, n)?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown example {other:?}, expected hadamard or identity"
                )))
            }
        };
        give(out, DyadCoeffs(AnyCoeffs::Two(c)));
        Ok(())
    })
}
