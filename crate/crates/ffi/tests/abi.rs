use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use oodsel::metrics::{feature_variation, FeatureRef};
use oodsel::synthetic::{gen_gaussian_lemma, GaussianLemmaSpec};
use oodsel_ffi::*;

fn last_error() -> String {
    let p = oodsel_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn lemma_file(dir: &Path) -> PathBuf {
    let ds = gen_gaussian_lemma(&GaussianLemmaSpec { t: 0.5, k: 4.0, n_per_domain: 2_000, seed: 3, exact_balance: false }).unwrap();
    let path = dir.join("lemma.oodf");
    oodsel::write_dataset(&ds, &path).unwrap();
    path
}

#[test]
fn load_query_and_free() {
    let dir = tempfile::tempdir().unwrap();
    let path = lemma_file(dir.path());
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut ds: *mut OodselDataset = ptr::null_mut();
    assert_eq!(unsafe { oodsel_dataset_load(cpath.as_ptr(), &mut ds) }, OodselStatus::Ok);
    assert!(oodsel_last_error().is_null());

    let (mut n, mut d, mut k) = (0usize, 0usize, 0u32);
    assert_eq!(unsafe { oodsel_dataset_dims(ds, &mut n, &mut d, &mut k) }, OodselStatus::Ok);
    assert_eq!((n, d, k), (8_000, 2, 2));
    let mut ids = [0u16; 8];
    let mut count = 0usize;
    assert_eq!(unsafe { oodsel_dataset_domains(ds, ids.as_mut_ptr(), ids.len(), &mut count) }, OodselStatus::Ok);
    assert_eq!(&ids[..count], &[1, 2, 3, 4]);

    // the ABI returns exactly what the library computes
    let reference = oodsel::load_dataset(&path).unwrap();
    let avail = [1u16, 2];
    let expected = feature_variation(
        &reference,
        &FeatureRef::Index(1),
        &avail,
        oodsel::DivergenceKind::TotalVariation,
        &oodsel::DensityConfig::default(),
    )
    .unwrap();
    let mut v = f64::NAN;
    let st = unsafe { oodsel_feature_variation(ds, 1, avail.as_ptr(), 2, OodselDivergence::TotalVariation, &mut v) };
    assert_eq!(st, OodselStatus::Ok);
    assert_eq!(v, expected);

    let mut inf = f64::NAN;
    let st = unsafe { oodsel_feature_informativeness(ds, 0, avail.as_ptr(), 2, OodselDivergence::SymmetricKl, &mut inf) };
    assert_eq!(st, OodselStatus::Ok);
    assert!(inf > 0.5, "{inf}");

    let mut mv = f64::NAN;
    let st = unsafe { oodsel_model_variation(ds, avail.as_ptr(), 2, OodselDivergence::L2, &mut mv) };
    assert_eq!(st, OodselStatus::Ok);
    assert!(mv.is_finite() && mv > 0.0);

    unsafe { oodsel_dataset_free(ds) };
    unsafe { oodsel_dataset_free(ptr::null_mut()) };
}

#[test]
fn error_codes_and_messages() {
    let mut ds: *mut OodselDataset = ptr::null_mut();
    let missing = CString::new("/nonexistent/file.oodf").unwrap();
    assert_eq!(unsafe { oodsel_dataset_load(missing.as_ptr(), &mut ds) }, OodselStatus::Io);
    assert!(last_error().contains("nonexistent"));
    assert!(ds.is_null());
    assert_eq!(unsafe { oodsel_dataset_load(ptr::null(), &mut ds) }, OodselStatus::NullPointer);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.oodf");
    std::fs::write(&bad, b"NOPE0000").unwrap();
    let cbad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { oodsel_dataset_load(cbad.as_ptr(), &mut ds) }, OodselStatus::Format);

    let x = [0.0f32, 1.0, 2.0];
    let y = [1u16, 3, 1];
    let e = [0u16, 0, 0];
    let st = unsafe { oodsel_dataset_from_arrays(3, 1, 2, x.as_ptr(), y.as_ptr(), e.as_ptr(), &mut ds) };
    assert_eq!(st, OodselStatus::InvalidArgument);
    assert!(last_error().contains("label out of range"));

    // one sample in the (0, 2) cell
    let y = [1u16, 1, 2];
    let st = unsafe { oodsel_dataset_from_arrays(3, 1, 2, x.as_ptr(), y.as_ptr(), e.as_ptr(), &mut ds) };
    assert_eq!(st, OodselStatus::Ok);
    let mut v = 0.0;
    let doms = [0u16];
    let st = unsafe { oodsel_feature_variation(ds, 0, doms.as_ptr(), 1, OodselDivergence::TotalVariation, &mut v) };
    assert_eq!(st, OodselStatus::EmptyCell);
    let st = unsafe { oodsel_feature_variation(ds, 0, doms.as_ptr(), 1, OodselDivergence::TotalVariation, ptr::null_mut()) };
    assert_ne!(st, OodselStatus::Ok);
    unsafe { oodsel_dataset_free(ds) };
    assert_eq!(
        unsafe { oodsel_feature_variation(ptr::null(), 0, doms.as_ptr(), 1, OodselDivergence::TotalVariation, &mut v) },
        OodselStatus::NullPointer
    );
}

#[test]
fn select_orders_models() {
    let names: Vec<CString> = ["spurious", "invariant", "mixed"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ids: Vec<*const std::ffi::c_char> = names.iter().map(|c| c.as_ptr()).collect();
    let acc = [0.90, 0.80, 0.85];
    let var = [0.8, 0.05, 0.4];
    let mut order = [usize::MAX; 3];
    let mut scores = [f64::NAN; 3];
    let mut r0 = f64::NAN;
    let st = unsafe {
        oodsel_select(ids.as_ptr(), acc.as_ptr(), var.as_ptr(), 3, 0.5, 0.1, order.as_mut_ptr(), scores.as_mut_ptr(), &mut r0)
    };
    assert_eq!(st, OodselStatus::Ok);
    assert_eq!(order, [1, 2, 0]);
    assert_eq!(r0, 0.5);
    assert!((scores[0] - 0.5).abs() < 1e-12 && (scores[1] - 0.775).abs() < 1e-12);

    // r0 = 0 reduces to validation accuracy
    let st = unsafe {
        oodsel_select(ids.as_ptr(), acc.as_ptr(), var.as_ptr(), 3, 0.0, 0.1, order.as_mut_ptr(), ptr::null_mut(), ptr::null_mut())
    };
    assert_eq!(st, OodselStatus::Ok);
    assert_eq!(order, [0, 2, 1]);

    // auto r0 on this pool
    let st = unsafe {
        oodsel_select(ids.as_ptr(), acc.as_ptr(), var.as_ptr(), 3, -1.0, 0.1, order.as_mut_ptr(), ptr::null_mut(), &mut r0)
    };
    assert_eq!(st, OodselStatus::Ok);
    assert!(r0 > 0.0);

    let dup: Vec<*const std::ffi::c_char> = vec![names[0].as_ptr(), names[0].as_ptr()];
    let st = unsafe {
        oodsel_select(dup.as_ptr(), acc.as_ptr(), var.as_ptr(), 2, 0.5, 0.1, order.as_mut_ptr(), ptr::null_mut(), ptr::null_mut())
    };
    assert_eq!(st, OodselStatus::InvalidArgument);
    assert!(last_error().contains("duplicate"));
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(oodsel_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles a C client against the generated header and, when the static
/// library is present, links and runs it.
#[test]
fn c_client_compiles_against_header() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = crate_dir.join("include");
    assert!(header_dir.join("oodsel.h").exists(), "build script writes the header");
    let src = crate_dir.join("tests/c/smoke.c");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if std::process::Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler available; skipping");
        return;
    }
    let status = std::process::Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&header_dir)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success(), "header does not compile as C99");

    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("liboodsel_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; link step skipped", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = std::process::Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "link against the static library failed");
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "variation ok");
}
