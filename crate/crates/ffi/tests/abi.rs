use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use vindef_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(vindef_last_error()) }.to_string_lossy().into_owned()
}

fn table1() -> *mut VindefDiagram {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { vindef_diagram_table1(&mut d) }, VindefStatus::Ok);
    d
}

fn id(d: *const VindefDiagram, label: &str) -> usize {
    let label = CString::new(label).unwrap();
    let mut id = usize::MAX;
    assert_eq!(unsafe { vindef_diagram_find_label(d, label.as_ptr(), &mut id) }, VindefStatus::Ok);
    id
}

#[test]
fn table1_counts_and_propagation() {
    let d = table1();
    unsafe {
        assert_eq!(vindef_diagram_observable_count(d), 37);
        assert_eq!(vindef_diagram_context_count(d), 26);
        let seeds = [VindefSeed { id: id(d, "a"), value: 1 }, VindefSeed { id: id(d, "P_b"), value: 1 }];
        let (mut outcome, mut obs, mut trace) = (VindefOutcome::Fixpoint, 0usize, ptr::null_mut());
        assert_eq!(vindef_propagate(d, seeds.as_ptr(), 2, &mut outcome, &mut obs, &mut trace), VindefStatus::Ok);
        assert_eq!(outcome, VindefOutcome::Contradiction);
        let json = CStr::from_ptr(trace).to_str().unwrap().to_owned();
        assert!(json.starts_with('[') && json.contains("\"rule\":\"seed\""));
        vindef_string_free(trace);
        vindef_diagram_free(d);
    }
}

#[test]
fn json_round_trip() {
    let d = table1();
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(vindef_diagram_to_json(d, &mut json), VindefStatus::Ok);
        let mut d2 = ptr::null_mut();
        assert_eq!(vindef_diagram_from_json(json, &mut d2), VindefStatus::Ok);
        assert_eq!(vindef_diagram_context_count(d2), 26);
        vindef_string_free(json);
        vindef_diagram_free(d);
        vindef_diagram_free(d2);
    }
}

#[test]
fn build_and_search() {
    let src = CString::new("[[1,0,0],[0,1,0],[0,0,1]]").unwrap();
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(vindef_diagram_build(src.as_ptr(), &mut d), VindefStatus::Ok);
        let (mut n, mut capped) = (0usize, true);
        assert_eq!(vindef_search(d, 16, &mut n, &mut capped), VindefStatus::Ok);
        assert_eq!((n, capped), (3, false));
        vindef_diagram_free(d);

        let mut k = ptr::null_mut();
        assert_eq!(vindef_diagram_cabello18(&mut k), VindefStatus::Ok);
        assert_eq!(vindef_search(k, 16, &mut n, &mut capped), VindefStatus::Ok);
        assert_eq!((n, capped), (0, false));
        vindef_diagram_free(k);
    }
}

#[test]
fn localize_and_check() {
    let psi = [1.0, 0.0, 0.0];
    let phi = [0.2, 0.96f64.sqrt(), 0.0];
    unsafe {
        let (mut d, mut c) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(vindef_localize(psi.as_ptr(), phi.as_ptr(), &mut d, &mut c), VindefStatus::Ok);
        let mut ok = false;
        assert_eq!(vindef_check(d, c, 0.0, &mut ok), VindefStatus::Ok);
        assert!(ok, "{}", last_error());

        let mut json = ptr::null_mut();
        assert_eq!(vindef_certificate_to_json(c, &mut json), VindefStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().replacen("\"overlap\": 0.2", "\"overlap\": 0.3", 1);
        vindef_string_free(json);
        let text = CString::new(text).unwrap();
        let mut bad = ptr::null_mut();
        assert_eq!(vindef_certificate_from_json(text.as_ptr(), &mut bad), VindefStatus::Ok);
        assert_eq!(vindef_check(d, bad, 0.0, &mut ok), VindefStatus::Ok);
        assert!(!ok);
        assert!(last_error().contains("seed-shape"));

        vindef_certificate_free(bad);
        vindef_certificate_free(c);
        vindef_diagram_free(d);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let d = table1();
        let mut id = 0usize;
        let missing = CString::new("nope").unwrap();
        assert_eq!(vindef_diagram_find_label(d, missing.as_ptr(), &mut id), VindefStatus::UnknownObservable);
        assert!(last_error().contains("nope"));
        assert_eq!(vindef_diagram_find_label(d, ptr::null(), &mut id), VindefStatus::NullPointer);

        let seeds = [VindefSeed { id: 99, value: 1 }];
        let (mut o, mut obs) = (VindefOutcome::Fixpoint, 0usize);
        assert_eq!(vindef_propagate(d, seeds.as_ptr(), 1, &mut o, &mut obs, ptr::null_mut()), VindefStatus::UnknownObservable);
        let seeds = [VindefSeed { id: 0, value: 2 }];
        assert_eq!(vindef_propagate(d, seeds.as_ptr(), 1, &mut o, &mut obs, ptr::null_mut()), VindefStatus::Precondition);

        let garbage = CString::new("{not json").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(vindef_diagram_from_json(garbage.as_ptr(), &mut out), VindefStatus::Parse);
        assert!(out.is_null());

        let (psi, phi) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let (mut dd, mut cc) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(vindef_localize(psi.as_ptr(), phi.as_ptr(), &mut dd, &mut cc), VindefStatus::DegenerateOverlap);
        assert_eq!(vindef_diagram_observable_count(ptr::null()), 0);
        vindef_diagram_free(d);
        vindef_diagram_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vindef.h")).unwrap();
    for f in [
        "vindef_last_error",
        "vindef_string_free",
        "vindef_diagram_from_json",
        "vindef_diagram_build",
        "vindef_diagram_table1",
        "vindef_diagram_cabello18",
        "vindef_diagram_free",
        "vindef_diagram_find_label",
        "vindef_propagate",
        "vindef_search",
        "vindef_localize",
        "vindef_check",
        "vindef_certificate_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct VindefDiagram VindefDiagram;"));
    assert!(header.contains("VINDEF_STATUS_OK = 0"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempdir();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"vindef.h\"\nint main(void) { VindefDiagram *d = 0; VindefStatus s = vindef_diagram_table1(&d); (void)s; vindef_diagram_free(d); return 0; }\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().map(|o| o.status.success()).unwrap_or(false) {
            return Ok(cc);
        }
    }
    Err(())
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("vindef-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
