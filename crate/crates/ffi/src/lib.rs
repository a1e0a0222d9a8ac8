//! C ABI for `resgroupoid`.
//!
//! Matrices, subspaces and arrows cross the boundary as opaque heap handles created by
//! `rg_*_new`/`rg_*_from_*` functions and released with the matching `rg_*_free`.
//! Complex entries are passed as interleaved `(re, im)` doubles in row-major order.
//! Every fallible function returns an [`RgStatus`]; on failure the message is
//! available from [`rg_last_error_message`] on the same thread. All computations use
//! the default tolerances.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use resgroupoid::grassmann::{
    chart_forward, chart_inverse, ChartCoordinates, Polarization, Subspace,
};
use resgroupoid::groupoid::{self, commutator_defect, compose, invert, PartialIsometry};
use resgroupoid::harness::{
    render_report, run_chart_suite, run_groupoid_axiom_suite, Format, Report, SuiteConfig,
};
use resgroupoid::matcore::{schatten_norm, Matrix, ToleranceConfig};
use resgroupoid::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    NonConvergence = 4,
    DimensionMismatch = 5,
    /// Input is not a projector, partial isometry, unitary or orthonormal frame.
    InvalidOperator = 6,
    OutsideDomain = 7,
    NotComposable = 8,
    Internal = 9,
}

/// Opaque dense complex matrix.
pub struct RgMatrix(Matrix);
/// Opaque subspace of `C^n`.
pub struct RgSubspace(Subspace);
/// Opaque partial isometry.
pub struct RgArrow(PartialIsometry);

/// Which verification suite [`rg_run_suite`] runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgSuite {
    Groupoid = 0,
    Charts = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RgStatus {
    match e {
        Error::NonFinite => RgStatus::NonFinite,
        Error::NonConvergence => RgStatus::NonConvergence,
        Error::DimensionMismatch { .. } | Error::RankDeficient { .. } => {
            RgStatus::DimensionMismatch
        }
        Error::NotHermitian(_)
        | Error::NotSkewHermitian(_)
        | Error::NotUnitary(_)
        | Error::NotOrthonormal(_)
        | Error::NotProjector(_)
        | Error::NotPartialIsometry(_)
        | Error::SingularSpectrum(_) => RgStatus::InvalidOperator,
        Error::OutsideDomain { .. }
        | Error::OutsideSectionDomain { .. }
        | Error::DomainTooFar(_)
        | Error::BranchCut { .. }
        | Error::OutsideChartDomain { .. }
        | Error::FullSpace => RgStatus::OutsideDomain,
        Error::NotComposable { .. } => RgStatus::NotComposable,
        Error::InvalidOrder(_) | Error::Config(_) | Error::ChartMismatch(_) => {
            RgStatus::InvalidArgument
        }
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => RgStatus::Internal,
    }
}

struct Failure(RgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RgStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RgStatus::Internal
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null; the caller owns the slot.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null; the caller owns the slot.
    unsafe { *out = value };
    Ok(())
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Message describing the last failure on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Creates a `rows x cols` matrix from `2 * rows * cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2 * rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut RgMatrix,
) -> RgStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        if rows == 0 || cols == 0 {
            return Err(Failure(
                RgStatus::InvalidArgument,
                "matrix dimensions must be positive".into(),
            ));
        }
        let len = rows
            .checked_mul(cols)
            .and_then(|x| x.checked_mul(2))
            .ok_or_else(|| Failure(RgStatus::InvalidArgument, "matrix too large".into()))?;
        // SAFETY: the caller guarantees `len` readable doubles.
        let raw = unsafe { std::slice::from_raw_parts(data, len) };
        let m = Matrix::from_fn(rows, cols, |i, j| {
            let k = 2 * (i * cols + j);
            Complex64::new(raw[k], raw[k + 1])
        });
        resgroupoid::matcore::ensure_finite(&m)?;
        unsafe { put(out, RgMatrix(m)) }
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_matrix_free(m: *mut RgMatrix) {
    if !m.is_null() {
        // SAFETY: produced by `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(m) });
    }
}

/// # Safety
/// `m` must be a live matrix handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_matrix_shape(
    m: *const RgMatrix,
    rows: *mut usize,
    cols: *mut usize,
) -> RgStatus {
    guard(|| {
        let m = unsafe { get(m, "matrix")? };
        unsafe {
            put_value(rows, m.0.nrows())?;
            put_value(cols, m.0.ncols())
        }
    })
}

/// Copies the entries as interleaved row-major doubles into `out`, which holds `len` doubles.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_matrix_read(m: *const RgMatrix, out: *mut f64, len: usize) -> RgStatus {
    guard(|| {
        let m = unsafe { get(m, "matrix")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 2 * m.0.len();
        if len < need {
            return Err(Failure(
                RgStatus::InvalidArgument,
                format!("buffer holds {len} doubles, need {need}"),
            ));
        }
        // SAFETY: checked length above.
        let buf = unsafe { std::slice::from_raw_parts_mut(out, need) };
        let cols = m.0.ncols();
        for ((i, j), z) in (0..m.0.nrows())
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .zip(buf.chunks_exact_mut(2))
        {
            z[0] = m.0[(i, j)].re;
            z[1] = m.0[(i, j)].im;
        }
        Ok(())
    })
}

/// Schatten `p`-norm; pass `INFINITY` for the operator norm.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_schatten_norm(m: *const RgMatrix, p: f64, out: *mut f64) -> RgStatus {
    guard(|| {
        let m = unsafe { get(m, "matrix")? };
        let v = schatten_norm(&m.0, p)?;
        unsafe { put_value(out, v) }
    })
}

/// Subspace spanned by the columns of `m`, which must have full column rank.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_subspace_from_span(
    m: *const RgMatrix,
    out: *mut *mut RgSubspace,
) -> RgStatus {
    guard(|| {
        let m = unsafe { get(m, "matrix")? };
        let s = Subspace::from_span(&m.0, &tol())?;
        unsafe { put(out, RgSubspace(s)) }
    })
}

/// `H+` for the polarization `C^{n_plus} + C^{n_minus}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_subspace_h_plus(
    n_plus: usize,
    n_minus: usize,
    out: *mut *mut RgSubspace,
) -> RgStatus {
    guard(|| {
        let pol = Polarization::new(n_plus, n_minus)?;
        unsafe { put(out, RgSubspace(pol.h_plus())) }
    })
}

/// # Safety
/// `s` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_subspace_free(s: *mut RgSubspace) {
    if !s.is_null() {
        // SAFETY: produced by `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(s) });
    }
}

/// # Safety
/// `s` must be a live subspace handle; `dim` and `ambient` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_subspace_dims(
    s: *const RgSubspace,
    dim: *mut usize,
    ambient: *mut usize,
) -> RgStatus {
    guard(|| {
        let s = unsafe { get(s, "subspace")? };
        unsafe {
            put_value(dim, s.0.dim())?;
            put_value(ambient, s.0.ambient_dim())
        }
    })
}

/// Orthogonal projector onto `s` as a new matrix.
///
/// # Safety
/// `s` must be a live subspace handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_subspace_projector(
    s: *const RgSubspace,
    out: *mut *mut RgMatrix,
) -> RgStatus {
    guard(|| {
        let s = unsafe { get(s, "subspace")? };
        unsafe { put(out, RgMatrix(s.0.projector().clone())) }
    })
}

/// Graph coordinate of `v` in the chart at `w`, an `(n - k) x k` matrix.
///
/// # Safety
/// `w` and `v` must be live subspace handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_chart_forward(
    w: *const RgSubspace,
    v: *const RgSubspace,
    out: *mut *mut RgMatrix,
) -> RgStatus {
    guard(|| {
        let (w, v) = unsafe { (get(w, "base")?, get(v, "subspace")?) };
        let coords = chart_forward(&w.0, &v.0, &tol())?;
        unsafe { put(out, RgMatrix(coords.coeff)) }
    })
}

/// Subspace with graph coordinate `coeff` in the chart at `w`.
///
/// # Safety
/// `w` must be a live subspace handle, `coeff` a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_chart_inverse(
    w: *const RgSubspace,
    coeff: *const RgMatrix,
    out: *mut *mut RgSubspace,
) -> RgStatus {
    guard(|| {
        let (w, a) = unsafe { (get(w, "base")?, get(coeff, "coefficient")?) };
        let coords = ChartCoordinates::new(w.0.clone(), a.0.clone())?;
        unsafe { put(out, RgSubspace(chart_inverse(&coords))) }
    })
}

/// Validates `m` as a partial isometry.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_arrow_new(m: *const RgMatrix, out: *mut *mut RgArrow) -> RgStatus {
    guard(|| {
        let m = unsafe { get(m, "matrix")? };
        let u = PartialIsometry::new(m.0.clone(), &tol())?;
        unsafe { put(out, RgArrow(u)) }
    })
}

/// # Safety
/// `a` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_arrow_free(a: *mut RgArrow) {
    if !a.is_null() {
        // SAFETY: produced by `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(a) });
    }
}

/// # Safety
/// `a` must be a live arrow handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_arrow_matrix(a: *const RgArrow, out: *mut *mut RgMatrix) -> RgStatus {
    guard(|| {
        let a = unsafe { get(a, "arrow")? };
        unsafe { put(out, RgMatrix(a.0.op().clone())) }
    })
}

/// Product `g h`; fails with `NotComposable` unless `s(g) = t(h)`.
///
/// # Safety
/// `g` and `h` must be live arrow handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_arrow_compose(
    g: *const RgArrow,
    h: *const RgArrow,
    out: *mut *mut RgArrow,
) -> RgStatus {
    guard(|| {
        let (g, h) = unsafe { (get(g, "left arrow")?, get(h, "right arrow")?) };
        let gh = compose(&g.0, &h.0, &tol())?;
        unsafe { put(out, RgArrow(gh)) }
    })
}

/// # Safety
/// `a` must be a live arrow handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_arrow_invert(a: *const RgArrow, out: *mut *mut RgArrow) -> RgStatus {
    guard(|| {
        let a = unsafe { get(a, "arrow")? };
        unsafe { put(out, RgArrow(invert(&a.0))) }
    })
}

/// Initial subspace `u*u`.
///
/// # Safety
/// `a` must be a live arrow handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_arrow_source(a: *const RgArrow, out: *mut *mut RgSubspace) -> RgStatus {
    guard(|| {
        let a = unsafe { get(a, "arrow")? };
        let s = groupoid::source(&a.0, &tol())?;
        unsafe { put(out, RgSubspace(s)) }
    })
}

/// Final subspace `uu*`.
///
/// # Safety
/// `a` must be a live arrow handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_arrow_target(a: *const RgArrow, out: *mut *mut RgSubspace) -> RgStatus {
    guard(|| {
        let a = unsafe { get(a, "arrow")? };
        let t = groupoid::target(&a.0, &tol())?;
        unsafe { put(out, RgSubspace(t)) }
    })
}

/// `||[u, P+]||_p` for the polarization with `n_plus` leading coordinates.
///
/// # Safety
/// `a` must be a live arrow handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_commutator_defect(
    a: *const RgArrow,
    n_plus: usize,
    p: f64,
    out: *mut f64,
) -> RgStatus {
    guard(|| {
        let a = unsafe { get(a, "arrow")? };
        let n = a.0.ambient_dim();
        if n_plus > n {
            return Err(Failure(
                RgStatus::DimensionMismatch,
                format!("n_plus {n_plus} exceeds dimension {n}"),
            ));
        }
        let pol = Polarization::new(n_plus, n - n_plus)?;
        let v = commutator_defect(&pol, &a.0, p)?;
        unsafe { put_value(out, v) }
    })
}

/// Runs a verification suite with `k = n_plus` and default tolerances and returns
/// the JSON report as a NUL-terminated string to be released with [`rg_string_free`].
/// `passed` receives 1 when every check passed and 0 otherwise.
///
/// # Safety
/// `json` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_run_suite(
    suite: RgSuite,
    n_plus: usize,
    n_minus: usize,
    trials: usize,
    seed: u64,
    json: *mut *mut c_char,
    passed: *mut i32,
) -> RgStatus {
    guard(|| {
        if json.is_null() || passed.is_null() {
            return Err(null("output pointer"));
        }
        let cfg = SuiteConfig {
            n_plus,
            n_minus,
            k: None,
            trials,
            seed,
            tolerances: tol(),
            schatten_order: 2.0,
        };
        let report = match suite {
            RgSuite::Groupoid => run_groupoid_axiom_suite(&cfg)?,
            RgSuite::Charts => run_chart_suite(&cfg)?,
        };
        let doc = Report::for_suite(&cfg, report)?;
        let text = render_report(&doc, Format::Json)?;
        let c = CString::new(text).map_err(|e| Failure(RgStatus::Internal, e.to_string()))?;
        unsafe {
            put_value(passed, i32::from(doc.all_passed()))?;
            put_value(json, c.into_raw())
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}
