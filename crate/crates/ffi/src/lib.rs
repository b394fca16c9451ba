//! C ABI for the korteweg workbench.
//!
//! Grids and fields are opaque heap handles owned by the caller and released
//! with the matching `*_free`. Every fallible call returns a [`KwStatus`]; on
//! failure the message is available from [`kw_last_error_message`] on the same
//! thread until the next failing call. Strings returned through `char **` are
//! released with [`kw_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use korteweg::harness::{self, parse_config, run_suite};
use korteweg::lp::{BesovIndex, DyadicFamily, Flavor};
use korteweg::spectral::{load_dump, save_dump, ScalarField, SpectralGrid};
use korteweg::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    GridMismatch = 4,
    DumpFormat = 5,
    Io = 6,
    Parse = 7,
    ConstraintViolation = 8,
    Numerical = 9,
    Panic = 10,
}

/// Periodic grid handle.
pub struct KwGrid {
    grid: Arc<SpectralGrid>,
}

/// Scalar field handle.
pub struct KwField {
    field: ScalarField,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(error: &Error) -> KwStatus {
    match error {
        Error::InvalidGrid(_) => KwStatus::InvalidGrid,
        Error::GridMismatch => KwStatus::GridMismatch,
        Error::DumpFormat { .. } => KwStatus::DumpFormat,
        Error::Io(_) => KwStatus::Io,
        Error::Parse { .. } => KwStatus::Parse,
        Error::ConstraintViolation(_) | Error::InvalidParams(_) | Error::InvalidIntegrator(_) => {
            KwStatus::ConstraintViolation
        }
        Error::InvalidField(_) | Error::IndexConstraintViolated(_) | Error::ExponentOrderViolated { .. } => {
            KwStatus::InvalidArgument
        }
        _ => KwStatus::Numerical,
    }
}

fn fail(status: KwStatus, message: &str) -> KwStatus {
    set_error(message);
    status
}

/// Runs `body` with panics converted to [`KwStatus::Panic`].
fn guard(body: impl FnOnce() -> Result<(), (KwStatus, String)>) -> KwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => KwStatus::Ok,
        Ok(Err((status, message))) => fail(status, &message),
        Err(_) => fail(KwStatus::Panic, "internal panic"),
    }
}

fn lift(error: Error) -> (KwStatus, String) {
    (status_of(&error), error.to_string())
}

fn null(what: &str) -> (KwStatus, String) {
    (KwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (KwStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (KwStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failure on this thread; empty if none. Owned by the library.
#[no_mangle]
pub extern "C" fn kw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a `dim`-dimensional grid (`dim` is 1 or 2). `length` may be null for `2π` periods.
///
/// # Safety
/// `resolution` must point to `dim` values, `length` to `dim` values or be null,
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kw_grid_new(
    dim: usize,
    resolution: *const usize,
    length: *const f64,
    out: *mut *mut KwGrid,
) -> KwStatus {
    guard(|| {
        if resolution.is_null() {
            return Err(null("resolution"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if dim != 1 && dim != 2 {
            return Err((KwStatus::InvalidGrid, format!("dimension {dim} unsupported (1 or 2)")));
        }
        let res = std::slice::from_raw_parts(resolution, dim).to_vec();
        let len = if length.is_null() {
            vec![std::f64::consts::TAU; dim]
        } else {
            std::slice::from_raw_parts(length, dim).to_vec()
        };
        let grid = SpectralGrid::new(&res, &len).map_err(lift)?;
        *out = Box::into_raw(Box::new(KwGrid { grid }));
        Ok(())
    })
}

/// # Safety
/// `grid` must come from [`kw_grid_new`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kw_grid_free(grid: *mut KwGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of samples on the grid, 0 for null.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kw_grid_len(grid: *const KwGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.grid.len())
}

/// Copies `len` row-major samples into a new field on `grid`.
///
/// # Safety
/// `grid` must be a live handle, `values` must point to `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kw_field_from_values(
    grid: *const KwGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut KwField,
) -> KwStatus {
    guard(|| {
        let grid = grid.as_ref().ok_or_else(|| null("grid"))?;
        if values.is_null() {
            return Err(null("values"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let data = std::slice::from_raw_parts(values, len).to_vec();
        let field = ScalarField::new(&grid.grid, data).map_err(lift)?;
        *out = Box::into_raw(Box::new(KwField { field }));
        Ok(())
    })
}

/// # Safety
/// `field` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kw_field_free(field: *mut KwField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of samples, 0 for null.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kw_field_len(field: *const KwField) -> usize {
    field.as_ref().map_or(0, |f| f.field.values().len())
}

/// Copies the samples into `out`, which must hold exactly `kw_field_len` doubles.
///
/// # Safety
/// `field` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn kw_field_values(field: *const KwField, out: *mut f64, len: usize) -> KwStatus {
    guard(|| {
        let field = field.as_ref().ok_or_else(|| null("field"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let values = field.field.values();
        if len != values.len() {
            return Err((
                KwStatus::InvalidArgument,
                format!("buffer holds {len} values, field has {}", values.len()),
            ));
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), out, len);
        Ok(())
    })
}

/// Loads component `component` of a field dump.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kw_field_load_dump(path: *const c_char, component: usize, out: *mut *mut KwField) -> KwStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let dump = load_dump(Path::new(path)).map_err(lift)?;
        let count = dump.components.len();
        let field = dump.components.into_iter().nth(component).ok_or_else(|| {
            (
                KwStatus::InvalidArgument,
                format!("component {component} requested from a dump with {count} components"),
            )
        })?;
        *out = Box::into_raw(Box::new(KwField { field }));
        Ok(())
    })
}

/// Writes a single-component dump.
///
/// # Safety
/// `field` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn kw_field_save_dump(field: *const KwField, path: *const c_char) -> KwStatus {
    guard(|| {
        let field = field.as_ref().ok_or_else(|| null("field"))?;
        let path = str_arg(path, "path")?;
        save_dump(Path::new(path), &[&field.field]).map_err(lift)
    })
}

/// `‖field‖_{B^s_{p,r}}`; pass `INFINITY` for `p` or `r` as needed.
/// `homogeneous` selects the mean-free flavor when nonzero.
///
/// # Safety
/// `field` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kw_besov_norm(
    field: *const KwField,
    s: f64,
    p: f64,
    r: f64,
    homogeneous: c_int,
    out: *mut f64,
) -> KwStatus {
    guard(|| {
        let field = field.as_ref().ok_or_else(|| null("field"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let flavor = if homogeneous != 0 {
            Flavor::Homogeneous
        } else {
            Flavor::Nonhomogeneous
        };
        let idx = BesovIndex::with_flavor(s, p, r, flavor).map_err(lift)?;
        let fam = DyadicFamily::new(field.field.grid()).map_err(lift)?;
        *out = fam.besov_norm(&field.field, &idx).map_err(lift)?;
        Ok(())
    })
}

/// Runs a scenario given as JSON text. Relative output directories resolve
/// against `output_root` (null: the environment default). On success
/// `*summary_json` receives the run summary and `*exit_code` the command-line
/// exit status (0 completed, 1 breakdown or blow-up).
///
/// # Safety
/// String arguments must be NUL-terminated or null where allowed; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kw_simulate_json(
    config_json: *const c_char,
    output_root: *const c_char,
    summary_json: *mut *mut c_char,
    exit_code: *mut c_int,
) -> KwStatus {
    guard(|| {
        let text = str_arg(config_json, "config_json")?;
        if summary_json.is_null() || exit_code.is_null() {
            return Err(null("out"));
        }
        let root = if output_root.is_null() {
            harness::output_root()
        } else {
            str_arg(output_root, "output_root")?.into()
        };
        let cfg = parse_config(text).map_err(lift)?;
        let outcome = harness::simulate(&cfg, &root).map_err(lift)?;
        *summary_json = into_c_string(serde_json::to_string(&outcome.summary).expect("summary serializes"));
        *exit_code = outcome.summary.status.exit_code();
        Ok(())
    })
}

/// Runs a verification suite (or `"all"`). `*report_json` receives the checks as
/// a JSON array and `*all_passed` is 1 iff every check passed.
///
/// # Safety
/// `suite` must be NUL-terminated; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kw_verify(
    suite: *const c_char,
    report_json: *mut *mut c_char,
    all_passed: *mut c_int,
) -> KwStatus {
    guard(|| {
        let suite = str_arg(suite, "suite")?;
        if report_json.is_null() || all_passed.is_null() {
            return Err(null("out"));
        }
        let checks = run_suite(suite).map_err(lift)?;
        *all_passed = c_int::from(checks.iter().all(|c| c.passed()));
        *report_json = into_c_string(serde_json::to_string(&checks).expect("checks serialize"));
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
