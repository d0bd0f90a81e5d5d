//! C ABI over `setquad`.
//!
//! Objects are opaque handles created by `sq_*_new`-style constructors and
//! released with the matching `sq_*_free`. Every fallible call returns an
//! [`SqStatus`]; on failure [`sq_last_error_message`] describes the cause.
//! Results are written through out-pointers only on success.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use setquad::convexcal::{ConvexBody, DirectionGrid};
use setquad::error::Error;
use setquad::funcspace::{Modulus, Weight};
use setquad::geometry::{hausdorff, PointCloud, Vector};
use setquad::knots::{asymptotic_b, midpoint_knots, optimize_knots, uniform_optimal_error, OptimizeOptions};
use setquad::noisy::{active_cells, noisy_error_value, ErrorBudget};
use setquad::recovery::{decompose, phi_star, sharpness_gap, worst_case_error, KnotSet};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    CountMismatch = 4,
    OutOfDomain = 5,
    NotStrictlyIncreasing = 6,
    Nonconvergence = 7,
    GridMismatch = 8,
    BufferTooSmall = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for SqStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => SqStatus::DimensionMismatch,
            Error::GridMismatch => SqStatus::GridMismatch,
            Error::InvalidInput(_) => SqStatus::InvalidInput,
            Error::CountMismatch { .. } => SqStatus::CountMismatch,
            Error::OutOfDomain { .. } => SqStatus::OutOfDomain,
            Error::NotStrictlyIncreasing { .. } => SqStatus::NotStrictlyIncreasing,
            Error::QuadratureNonconvergence { .. } | Error::IntegrationNonconvergence { .. } => {
                SqStatus::Nonconvergence
            }
            Error::Io(_) => SqStatus::Io,
        }
    }
}

/// Modulus of continuity ω.
pub struct SqModulus(Modulus);
/// Weight P on [0, 1].
pub struct SqWeight(Weight);
/// Sorted distinct knots in [0, 1].
pub struct SqKnots(KnotSet);
/// Direction grid of a support-function representation.
pub struct SqGrid(Arc<DirectionGrid>);
/// Finite point cloud in R^m.
pub struct SqCloud(PointCloud);
/// Convex body stored by its support values on a grid.
pub struct SqBody(ConvexBody);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(SqStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(&e.to_string());
        Fail(SqStatus::from(&e))
    }
}

fn fail(status: SqStatus, msg: &str) -> Fail {
    set_error(msg);
    Fail(status)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SqStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("internal panic");
            SqStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| fail(SqStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn array<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(SqStatus::NullPointer, &format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(SqStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(SqStatus::NullPointer, "output pointer is null"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the most recent failed call on this thread ("" if none).
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn sq_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

// ---- moduli ----

/// ω(t) = c·t^alpha.
#[no_mangle]
pub unsafe extern "C" fn sq_modulus_power(c: f64, alpha: f64, out: *mut *mut SqModulus) -> SqStatus {
    guard(|| put_box(out, SqModulus(Modulus::power(c, alpha)?)))
}

/// ω(t) = min(slope·t, cap).
#[no_mangle]
pub unsafe extern "C" fn sq_modulus_capped_linear(slope: f64, cap: f64, out: *mut *mut SqModulus) -> SqStatus {
    guard(|| put_box(out, SqModulus(Modulus::capped_linear(slope, cap)?)))
}

/// Piecewise-linear ω through (t[i], values[i]).
#[no_mangle]
pub unsafe extern "C" fn sq_modulus_tabulated(
    t: *const f64,
    values: *const f64,
    len: usize,
    out: *mut *mut SqModulus,
) -> SqStatus {
    guard(|| {
        let t = array(t, len, "t")?.to_vec();
        let v = array(values, len, "values")?.to_vec();
        put_box(out, SqModulus(Modulus::tabulated(t, v)?))
    })
}

/// ω(t) for t in [0, 1].
#[no_mangle]
pub unsafe extern "C" fn sq_modulus_eval(m: *const SqModulus, t: f64, out: *mut f64) -> SqStatus {
    guard(|| put(out, get(m, "modulus")?.0.eval(t)?))
}

#[no_mangle]
pub unsafe extern "C" fn sq_modulus_free(m: *mut SqModulus) {
    free(m)
}

// ---- weights ----

/// P ≡ 1.
#[no_mangle]
pub unsafe extern "C" fn sq_weight_constant_one(out: *mut *mut SqWeight) -> SqStatus {
    guard(|| put_box(out, SqWeight(Weight::ConstantOne)))
}

/// P(x) = Σ coeffs[k]·x^k.
#[no_mangle]
pub unsafe extern "C" fn sq_weight_polynomial(coeffs: *const f64, len: usize, out: *mut *mut SqWeight) -> SqStatus {
    guard(|| {
        let c = array(coeffs, len, "coeffs")?.to_vec();
        put_box(out, SqWeight(Weight::polynomial(c)?))
    })
}

/// Piecewise-linear P through (x[i], values[i]).
#[no_mangle]
pub unsafe extern "C" fn sq_weight_tabulated(
    x: *const f64,
    values: *const f64,
    len: usize,
    out: *mut *mut SqWeight,
) -> SqStatus {
    guard(|| {
        let x = array(x, len, "x")?.to_vec();
        let v = array(values, len, "values")?.to_vec();
        put_box(out, SqWeight(Weight::tabulated(x, v)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn sq_weight_free(w: *mut SqWeight) {
    free(w)
}

// ---- knots ----

#[no_mangle]
pub unsafe extern "C" fn sq_knots_new(x: *const f64, len: usize, out: *mut *mut SqKnots) -> SqStatus {
    guard(|| {
        let x = array(x, len, "knots")?.to_vec();
        put_box(out, SqKnots(KnotSet::new(x)?))
    })
}

/// x_i = (2i − 1)/(2n).
#[no_mangle]
pub unsafe extern "C" fn sq_knots_midpoints(n: usize, out: *mut *mut SqKnots) -> SqStatus {
    guard(|| put_box(out, SqKnots(midpoint_knots(n)?)))
}

/// Locally optimal knots for P and ω; `out_error` may be null.
#[no_mangle]
pub unsafe extern "C" fn sq_knots_optimize(
    weight: *const SqWeight,
    modulus: *const SqModulus,
    n: usize,
    starts: usize,
    seed: u64,
    out: *mut *mut SqKnots,
    out_error: *mut f64,
) -> SqStatus {
    guard(|| {
        let opts = OptimizeOptions {
            starts,
            seed,
            ..Default::default()
        };
        let r = optimize_knots(&get(weight, "weight")?.0, &get(modulus, "modulus")?.0, n, &opts)?;
        if out.is_null() {
            return Err(fail(SqStatus::NullPointer, "output pointer is null"));
        }
        if !out_error.is_null() {
            out_error.write(r.error);
        }
        put_box(out, SqKnots(r.knots))
    })
}

#[no_mangle]
pub unsafe extern "C" fn sq_knots_len(k: *const SqKnots) -> usize {
    k.as_ref().map_or(0, |k| k.0.len())
}

/// Copies the knots into `buf`, which must hold `sq_knots_len` values.
#[no_mangle]
pub unsafe extern "C" fn sq_knots_copy(k: *const SqKnots, buf: *mut f64, len: usize) -> SqStatus {
    guard(|| {
        let k = get(k, "knots")?;
        copy_out(k.0.as_slice(), buf, len)
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), Fail> {
    if len < src.len() {
        return Err(fail(
            SqStatus::BufferTooSmall,
            &format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(fail(SqStatus::NullPointer, "buffer is null"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

#[no_mangle]
pub unsafe extern "C" fn sq_knots_free(k: *mut SqKnots) {
    free(k)
}

// ---- grids, clouds, bodies ----

/// Default grid for dimension `dim`.
#[no_mangle]
pub unsafe extern "C" fn sq_grid_default(dim: usize, out: *mut *mut SqGrid) -> SqStatus {
    guard(|| put_box(out, SqGrid(DirectionGrid::default_for(dim)?)))
}

/// Grid with `size` directions in dimension `dim`.
#[no_mangle]
pub unsafe extern "C" fn sq_grid_with_size(dim: usize, size: usize, out: *mut *mut SqGrid) -> SqStatus {
    guard(|| put_box(out, SqGrid(DirectionGrid::with_size(dim, size)?)))
}

#[no_mangle]
pub unsafe extern "C" fn sq_grid_len(g: *const SqGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn sq_grid_free(g: *mut SqGrid) {
    free(g)
}

/// Cloud of `points` points of dimension `dim`, row-major in `coords`.
#[no_mangle]
pub unsafe extern "C" fn sq_cloud_new(
    dim: usize,
    coords: *const f64,
    points: usize,
    out: *mut *mut SqCloud,
) -> SqStatus {
    guard(|| {
        let data = array(coords, dim.saturating_mul(points), "coords")?.to_vec();
        put_box(out, SqCloud(PointCloud::from_flat(dim, data)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn sq_cloud_free(c: *mut SqCloud) {
    free(c)
}

/// Hausdorff distance between two clouds.
#[no_mangle]
pub unsafe extern "C" fn sq_cloud_hausdorff(a: *const SqCloud, b: *const SqCloud, out: *mut f64) -> SqStatus {
    guard(|| put(out, hausdorff(&get(a, "a")?.0, &get(b, "b")?.0)?))
}

/// Support representation of co A.
#[no_mangle]
pub unsafe extern "C" fn sq_body_embed(c: *const SqCloud, g: *const SqGrid, out: *mut *mut SqBody) -> SqStatus {
    guard(|| put_box(out, SqBody(ConvexBody::embed(&get(c, "cloud")?.0, &get(g, "grid")?.0)?)))
}

#[no_mangle]
pub unsafe extern "C" fn sq_body_hausdorff(a: *const SqBody, b: *const SqBody, out: *mut f64) -> SqStatus {
    guard(|| put(out, get(a, "a")?.0.hausdorff(&get(b, "b")?.0)?))
}

/// Number of support values, equal to the grid size.
#[no_mangle]
pub unsafe extern "C" fn sq_body_len(b: *const SqBody) -> usize {
    b.as_ref().map_or(0, |b| b.0.support().len())
}

/// Copies the support values into `buf`, which must hold `sq_body_len` values.
#[no_mangle]
pub unsafe extern "C" fn sq_body_support(b: *const SqBody, buf: *mut f64, len: usize) -> SqStatus {
    guard(|| copy_out(get(b, "body")?.0.support(), buf, len))
}

#[no_mangle]
pub unsafe extern "C" fn sq_body_free(b: *mut SqBody) {
    free(b)
}

// ---- recovery ----

/// ∫₀¹ P(x) ω(dist(x, knots)) dx.
#[no_mangle]
pub unsafe extern "C" fn sq_worst_case_error(
    modulus: *const SqModulus,
    weight: *const SqWeight,
    knots: *const SqKnots,
    out: *mut f64,
) -> SqStatus {
    guard(|| {
        let v = worst_case_error(&get(modulus, "modulus")?.0, &get(weight, "weight")?.0, &get(knots, "knots")?.0)?;
        put(out, v)
    })
}

/// 2n ∫₀^{1/2n} ω.
#[no_mangle]
pub unsafe extern "C" fn sq_uniform_optimal_error(modulus: *const SqModulus, n: usize, out: *mut f64) -> SqStatus {
    guard(|| put(out, uniform_optimal_error(&get(modulus, "modulus")?.0, n)?))
}

/// The optimal method applied to `count` samples, one per knot.
#[no_mangle]
pub unsafe extern "C" fn sq_phi_star(
    samples: *const *const SqCloud,
    count: usize,
    knots: *const SqKnots,
    weight: *const SqWeight,
    grid: *const SqGrid,
    out: *mut *mut SqBody,
) -> SqStatus {
    guard(|| {
        let clouds = collect_clouds(samples, count)?;
        let cells = decompose(&get(knots, "knots")?.0, &get(weight, "weight")?.0)?;
        put_box(out, SqBody(phi_star(&clouds, &cells, &get(grid, "grid")?.0)?))
    })
}

unsafe fn collect_clouds(samples: *const *const SqCloud, count: usize) -> Result<Vec<PointCloud>, Fail> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if samples.is_null() {
        return Err(fail(SqStatus::NullPointer, "samples is null"));
    }
    slice::from_raw_parts(samples, count)
        .iter()
        .map(|&c| get(c, "sample").map(|c| c.0.clone()))
        .collect()
}

/// Lower bound of the sharpness certificate minus the closed form, in absolute value.
#[no_mangle]
pub unsafe extern "C" fn sq_sharpness_gap(
    modulus: *const SqModulus,
    weight: *const SqWeight,
    knots: *const SqKnots,
    grid: *const SqGrid,
    direction: *const f64,
    dim: usize,
    out: *mut f64,
) -> SqStatus {
    guard(|| {
        let a = Vector::new(array(direction, dim, "direction")?.to_vec())?;
        let s = sharpness_gap(
            &get(modulus, "modulus")?.0,
            &get(weight, "weight")?.0,
            &get(knots, "knots")?.0,
            &a,
            &get(grid, "grid")?.0,
        )?;
        put(out, s.gap)
    })
}

/// Σ_k Ω^{-1}(P((2k − 1)/2n)·Ω(1/n)).
#[no_mangle]
pub unsafe extern "C" fn sq_asymptotic_b(
    weight: *const SqWeight,
    modulus: *const SqModulus,
    n: usize,
    out: *mut f64,
) -> SqStatus {
    guard(|| {
        let r = asymptotic_b(&get(weight, "weight")?.0, &get(modulus, "modulus")?.0, &[n])?;
        put(out, r.b_extrapolated)
    })
}

// ---- samples with errors ----

unsafe fn budget(eps: *const f64, len: usize) -> Result<ErrorBudget, Fail> {
    Ok(ErrorBudget::new(array(eps, len, "epsilons")?.to_vec())?)
}

/// ∫₀¹ P(x)·min_k(eps[k] + ω(|x − x_k|)) dx.
#[no_mangle]
pub unsafe extern "C" fn sq_noisy_error_value(
    modulus: *const SqModulus,
    knots: *const SqKnots,
    eps: *const f64,
    len: usize,
    weight: *const SqWeight,
    out: *mut f64,
) -> SqStatus {
    guard(|| {
        let v = noisy_error_value(
            &get(modulus, "modulus")?.0,
            &get(knots, "knots")?.0,
            &budget(eps, len)?,
            &get(weight, "weight")?.0,
        )?;
        put(out, v)
    })
}

/// Writes the increasing active knot indices into `indices` (room for
/// `capacity` entries) and their number into `out_count`.
#[no_mangle]
pub unsafe extern "C" fn sq_noisy_active_indices(
    modulus: *const SqModulus,
    knots: *const SqKnots,
    eps: *const f64,
    len: usize,
    weight: *const SqWeight,
    indices: *mut usize,
    capacity: usize,
    out_count: *mut usize,
) -> SqStatus {
    guard(|| {
        let d = active_cells(
            &get(modulus, "modulus")?.0,
            &get(knots, "knots")?.0,
            &budget(eps, len)?,
            &get(weight, "weight")?.0,
        )?;
        if capacity < d.nu() {
            return Err(fail(
                SqStatus::BufferTooSmall,
                &format!("buffer holds {capacity} indices, {} needed", d.nu()),
            ));
        }
        if indices.is_null() {
            return Err(fail(SqStatus::NullPointer, "indices is null"));
        }
        ptr::copy_nonoverlapping(d.active_indices.as_ptr(), indices, d.nu());
        put(out_count, d.nu())
    })
}
