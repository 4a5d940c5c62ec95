//! C ABI over the `oodsel` core.
//!
//! Datasets are opaque handles created by `oodsel_dataset_load` or
//! `oodsel_dataset_from_arrays` and released with `oodsel_dataset_free`.
//! Every fallible call returns an [`OodselStatus`]; on failure the message is
//! available from `oodsel_last_error` on the same thread until the next call.
//! Panics never cross the boundary: they are reported as `OODSEL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oodsel::metrics::{feature_informativeness, feature_variation, model_variation, FeatureRef};
use oodsel::selection::{select, ModelRecord, R0Mode, SelectionConfig};
use oodsel::{load_dataset, DensityConfig, DivergenceKind, Error, FeatureDataset};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OodselStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    EmptyCell = 5,
    Panic = 6,
}

/// Divergence used for variation and informativeness.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OodselDivergence {
    TotalVariation = 0,
    SymmetricKl = 1,
    L2 = 2,
}

impl From<OodselDivergence> for DivergenceKind {
    fn from(d: OodselDivergence) -> Self {
        match d {
            OodselDivergence::TotalVariation => DivergenceKind::TotalVariation,
            OodselDivergence::SymmetricKl => DivergenceKind::symmetric_kl(),
            OodselDivergence::L2 => DivergenceKind::L2,
        }
    }
}

/// Opaque dataset handle.
pub struct OodselDataset {
    inner: FeatureDataset,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OodselStatus {
    match e {
        Error::Io { .. } => OodselStatus::Io,
        Error::Format { .. } | Error::Truncated { .. } | Error::Csv(_) | Error::Json(_) => OodselStatus::Format,
        Error::EmptyCell { .. } => OodselStatus::EmptyCell,
        _ => OodselStatus::InvalidArgument,
    }
}

struct Fail(OodselStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(OodselStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OodselStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OodselStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(&format!("internal panic: {msg}"));
            OodselStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn dataset<'a>(ds: *const OodselDataset) -> Result<&'a FeatureDataset, Fail> {
    ds.as_ref().map(|d| &d.inner).ok_or_else(|| null("dataset"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next `oodsel_*` call on the same thread.
#[no_mangle]
pub extern "C" fn oodsel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oodsel_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads an OODF (or `.csv`) feature file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oodsel_dataset_load(path: *const c_char, out: *mut *mut OodselDataset) -> OodselStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(OodselStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
        let ds = load_dataset(path)?;
        out.write(Box::into_raw(Box::new(OodselDataset { inner: ds })));
        Ok(())
    })
}

/// Builds a dataset from row-major `n × d` features, 1-based labels and domain ids.
///
/// # Safety
/// `features` must hold `n·d` floats, `labels` and `domains` `n` values each;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oodsel_dataset_from_arrays(
    n: usize,
    d: usize,
    k: u32,
    features: *const f32,
    labels: *const u16,
    domains: *const u16,
    out: *mut *mut OodselDataset,
) -> OodselStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(d)
            .ok_or_else(|| Fail(OodselStatus::InvalidArgument, "n·d overflows".into()))?;
        let features = slice(features, len, "features")?.to_vec();
        let labels = slice(labels, n, "labels")?.to_vec();
        let domains = slice(domains, n, "domains")?.to_vec();
        let ds = FeatureDataset::new(d, k, features, labels, domains)?;
        out.write(Box::into_raw(Box::new(OodselDataset { inner: ds })));
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `ds` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oodsel_dataset_free(ds: *mut OodselDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Sample count, feature dimension and class count.
///
/// # Safety
/// `ds` must be a live handle; each output pointer may be NULL to skip it.
#[no_mangle]
pub unsafe extern "C" fn oodsel_dataset_dims(
    ds: *const OodselDataset,
    n: *mut usize,
    d: *mut usize,
    k: *mut u32,
) -> OodselStatus {
    guard(|| {
        let ds = dataset(ds)?;
        if !n.is_null() {
            n.write(ds.n_samples());
        }
        if !d.is_null() {
            d.write(ds.dim());
        }
        if !k.is_null() {
            k.write(ds.n_classes());
        }
        Ok(())
    })
}

/// Number of distinct domain ids; when `ids` is non-NULL, up to `capacity`
/// sorted ids are copied into it.
///
/// # Safety
/// `ds` must be a live handle; `ids` must hold `capacity` values when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn oodsel_dataset_domains(
    ds: *const OodselDataset,
    ids: *mut u16,
    capacity: usize,
    count: *mut usize,
) -> OodselStatus {
    guard(|| {
        let all = dataset(ds)?.domain_ids();
        if !ids.is_null() {
            let n = all.len().min(capacity);
            ptr::copy_nonoverlapping(all.as_ptr(), ids, n);
        }
        write(count, all.len(), "count")
    })
}

/// Variation of coordinate `feature` over the listed domains.
///
/// # Safety
/// `ds` must be a live handle; `domains` must hold `n_domains` ids; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oodsel_feature_variation(
    ds: *const OodselDataset,
    feature: usize,
    domains: *const u16,
    n_domains: usize,
    divergence: OodselDivergence,
    out: *mut f64,
) -> OodselStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let domains = slice(domains, n_domains, "domains")?;
        let v = feature_variation(ds, &FeatureRef::Index(feature), domains, divergence.into(), &DensityConfig::default())?;
        write(out, v, "out")
    })
}

/// Informativeness of coordinate `feature` over the listed domains.
///
/// # Safety
/// As for `oodsel_feature_variation`.
#[no_mangle]
pub unsafe extern "C" fn oodsel_feature_informativeness(
    ds: *const OodselDataset,
    feature: usize,
    domains: *const u16,
    n_domains: usize,
    divergence: OodselDivergence,
    out: *mut f64,
) -> OodselStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let domains = slice(domains, n_domains, "domains")?;
        let v = feature_informativeness(ds, &FeatureRef::Index(feature), domains, divergence.into(), &DensityConfig::default())?;
        write(out, v, "out")
    })
}

/// Mean per-coordinate variation over the listed domains.
///
/// # Safety
/// As for `oodsel_feature_variation`.
#[no_mangle]
pub unsafe extern "C" fn oodsel_model_variation(
    ds: *const OodselDataset,
    domains: *const u16,
    n_domains: usize,
    divergence: OodselDivergence,
    out: *mut f64,
) -> OodselStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let domains = slice(domains, n_domains, "domains")?;
        let v = model_variation(ds, domains, divergence.into(), &DensityConfig::default())?;
        write(out, v, "out")
    })
}

/// Ranks `n` models by `accuracy − r0·variation`.
///
/// A negative `r0` selects the automatic estimate over the accuracy window.
/// `order` receives input indices best first; `scores` (optional) receives
/// each model's score at its input index; `r0_used` (optional) the factor applied.
///
/// # Safety
/// `ids` must hold `n` NUL-terminated strings; `accuracies`, `variations`,
/// `order` and (when non-NULL) `scores` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn oodsel_select(
    ids: *const *const c_char,
    accuracies: *const f64,
    variations: *const f64,
    n: usize,
    r0: f64,
    acc_window: f64,
    order: *mut usize,
    scores: *mut f64,
    r0_used: *mut f64,
) -> OodselStatus {
    guard(|| {
        let ids = slice(ids, n, "ids")?;
        let accuracies = slice(accuracies, n, "accuracies")?;
        let variations = slice(variations, n, "variations")?;
        if order.is_null() && n > 0 {
            return Err(null("order"));
        }
        let mut names = Vec::with_capacity(n);
        for (i, &p) in ids.iter().enumerate() {
            if p.is_null() {
                return Err(null(&format!("ids[{i}]")));
            }
            names.push(CStr::from_ptr(p).to_string_lossy().into_owned());
        }
        let records = names
            .iter()
            .zip(accuracies.iter().zip(variations))
            .map(|(id, (&a, &v))| ModelRecord::new(id.clone(), a, v))
            .collect::<oodsel::Result<Vec<_>>>()?;
        let cfg = SelectionConfig {
            r0: if r0 < 0.0 { R0Mode::Auto } else { R0Mode::Fixed(r0) },
            acc_window,
            ..SelectionConfig::default()
        };
        let ranking = select(&records, &cfg)?;
        for (rank, m) in ranking.ranked.iter().enumerate() {
            // select() rejects duplicate ids, so the lookup is unambiguous
            let idx = names.iter().position(|id| id == &m.model_id).unwrap_or(rank);
            order.add(rank).write(idx);
            if !scores.is_null() {
                scores.add(idx).write(m.score.unwrap_or(f64::NAN));
            }
        }
        if !r0_used.is_null() {
            r0_used.write(ranking.r0_used);
        }
        Ok(())
    })
}
