use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use plateau_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(plateau_last_error_message()) }.to_string_lossy().into_owned()
}

fn write_golden(dir: &Path, name: &str) -> CString {
    let path = dir.join(format!("{name}.json"));
    let p = cstr(path.to_str().unwrap());
    let st = unsafe { plateau_golden_write(cstr(name).as_ptr(), 0.1, p.as_ptr()) };
    assert_eq!(st, PlateauStatus::Ok, "{}", last_error());
    p
}

fn load(p: &CString) -> *mut PlateauComplex {
    let mut h = ptr::null_mut();
    let st = unsafe { plateau_complex_load(p.as_ptr(), &mut h) };
    assert_eq!(st, PlateauStatus::Ok, "{}", last_error());
    assert!(!h.is_null());
    h
}

#[test]
fn t_cone_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = load(&write_golden(dir.path(), "t-cone"));
    unsafe {
        let mut counts = PlateauCounts::default();
        assert_eq!(plateau_complex_counts(h, &mut counts), PlateauStatus::Ok);
        assert_eq!(counts.t_points, 1);
        assert_eq!(counts.junction_curves, 4);
        assert!(counts.triangles > 0 && counts.slots >= counts.vertices);

        let mut tag = PlateauFlatTag::Indeterminate;
        assert_eq!(plateau_classify(h, 1e-8, 1e-6, &mut tag), PlateauStatus::Ok);
        assert_eq!(tag, PlateauFlatTag::TCone);

        let mut lambda = f64::NAN;
        let mut stable = false;
        assert_eq!(plateau_stability_lambda_min(h, 1e-8, &mut lambda, &mut stable), PlateauStatus::Ok);
        assert!(lambda.is_finite() && stable, "lambda {lambda}");
        plateau_complex_free(h);
    }
}

#[test]
fn plane_area_matches_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_golden(dir.path(), "plane");
    let direct = plateau::complex::load_complex(p.to_str().unwrap()).unwrap();
    let expect = plateau::geometry::area_in_ball(&direct, &plateau::Vec3::zeros(), 0.5);
    let h = load(&p);
    let center = [0.0, 0.0, 0.0];
    let mut a = f64::NAN;
    unsafe {
        assert_eq!(plateau_area_in_ball(h, center.as_ptr(), 0.5, &mut a), PlateauStatus::Ok);
        assert_eq!(plateau_area_in_ball(h, center.as_ptr(), -1.0, &mut a), PlateauStatus::InvalidArgument);
        assert_eq!(plateau_area_in_ball(h, ptr::null(), 0.5, &mut a), PlateauStatus::NullArgument);
        plateau_complex_free(h);
    }
    assert_eq!(a.to_bits(), expect.to_bits());
    assert!((a / (std::f64::consts::PI * 0.25) - 1.0).abs() < 1e-3, "area {a}");
}

#[test]
fn errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        let p = write_golden(dir.path(), "mobius");
        assert_eq!(plateau_complex_load(p.as_ptr(), &mut h), PlateauStatus::Orientability);
        assert!(h.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(plateau_complex_parse(cstr("{not json").as_ptr(), &mut h), PlateauStatus::Parse);
        assert_eq!(plateau_complex_load(cstr("/nonexistent/x.json").as_ptr(), &mut h), PlateauStatus::Io);
        assert_eq!(plateau_complex_load(ptr::null(), &mut h), PlateauStatus::NullArgument);
        assert_eq!(
            plateau_golden_write(cstr("klein").as_ptr(), 0.1, cstr("/tmp/x").as_ptr()),
            PlateauStatus::UnknownCorpus
        );
        let mut counts = PlateauCounts::default();
        assert_eq!(plateau_complex_counts(ptr::null(), &mut counts), PlateauStatus::NullArgument);
        plateau_complex_free(ptr::null_mut());

        let bad = [0xffu8, 0];
        assert_eq!(plateau_complex_parse(bad.as_ptr().cast(), &mut h), PlateauStatus::InvalidUtf8);
    }
}

#[test]
fn parse_from_memory() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_golden(dir.path(), "y-cone");
    let text = cstr(&std::fs::read_to_string(p.to_str().unwrap()).unwrap());
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(plateau_complex_parse(text.as_ptr(), &mut h), PlateauStatus::Ok);
        assert_eq!(last_error(), "");
        let mut counts = PlateauCounts::default();
        plateau_complex_counts(h, &mut counts);
        assert_eq!(counts.junction_curves, 1);
        assert_eq!(counts.t_points, 0);
        plateau_complex_free(h);
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(plateau_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/plateau.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "plateau_complex_load",
        "plateau_complex_parse",
        "plateau_complex_free",
        "plateau_complex_counts",
        "plateau_area_in_ball",
        "plateau_stability_lambda_min",
        "plateau_classify",
        "plateau_golden_write",
        "plateau_last_error_message",
        "plateau_version",
        "PLATEAU_STATUS_OK = 0",
        "PLATEAU_FLAT_TAG_DOUBLE_T",
        "typedef struct PlateauComplex PlateauComplex;",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"plateau.h\"\nint f(void) { PlateauComplex *c = 0; PlateauCounts k;\n\
         return plateau_complex_counts(c, &k) == PLATEAU_STATUS_NULL_ARGUMENT; }\n",
    )
    .unwrap();
    let inc = header().parent().unwrap().to_path_buf();
    match Command::new(&cc).args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"]).arg(&inc).arg(&src).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler; skipping"),
    }
}
