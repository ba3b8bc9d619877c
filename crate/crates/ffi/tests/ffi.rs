use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use proxcycle_ffi::*;

fn last_error() -> String {
    let p = pc_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { pc_string_free(p) };
    s
}

fn midpoint() -> *mut PcInstance {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { pc_gallery_midpoint(101, &mut inst) }, PcStatus::Ok);
    inst
}

#[test]
fn midpoint_round_trip() {
    let inst = midpoint();
    unsafe {
        let mut d = 0.0;
        assert_eq!(pc_instance_set_distance(inst, &mut d), PcStatus::Ok);
        assert_eq!(d, 2.0);

        let mut json = ptr::null_mut();
        assert_eq!(pc_instance_to_json(inst, &mut json), PcStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(pc_instance_from_json(json, &mut again), PcStatus::Ok);
        let mut dim = 0;
        assert_eq!(pc_instance_dim(again, &mut dim), PcStatus::Ok);
        assert_eq!(dim, 1);
        pc_string_free(json);
        pc_instance_free(again);
        pc_instance_free(inst);
    }
}

#[test]
fn certify_verdicts() {
    unsafe {
        let inst = midpoint();
        let (mut ok, mut n) = (false, 1);
        assert_eq!(pc_certify(inst, 500, 3, &mut ok, &mut n), PcStatus::Ok);
        assert!(ok);
        assert_eq!(n, 0);
        pc_instance_free(inst);

        let mut exp = ptr::null_mut();
        assert_eq!(pc_gallery_expansive(&mut exp), PcStatus::Ok);
        assert_eq!(pc_certify(exp, 500, 3, &mut ok, &mut n), PcStatus::Ok);
        assert!(!ok);
        assert!(n > 0);
        let mut json = ptr::null_mut();
        assert_eq!(pc_certify_json(exp, 500, 3, &mut json), PcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["certified"], false);
        pc_string_free(json);
        pc_instance_free(exp);
    }
}

#[test]
fn iterate_and_read_trace() {
    unsafe {
        let inst = midpoint();
        let x0 = [2.0];
        let mut trace = ptr::null_mut();
        let st = pc_iterate(inst, x0.as_ptr(), 1, PcPolicy::Nearest, 0, 10_000, 1e-6, &mut trace);
        assert_eq!(st, PcStatus::Ok);
        assert!(pc_trace_len(trace) > 20);

        let mut p = [0.0];
        assert_eq!(pc_trace_point(trace, 1, p.as_mut_ptr(), 1), PcStatus::Ok);
        assert_eq!(p[0], -1.5);
        let mut s = 0.0;
        assert_eq!(pc_trace_step_dist(trace, 0, &mut s), PcStatus::Ok);
        assert_eq!(s, 3.5);
        assert_eq!(pc_trace_step_dist(trace, 10_000, &mut s), PcStatus::Parameter);
        assert_eq!(pc_trace_point(trace, 0, p.as_mut_ptr(), 0), PcStatus::Parameter);

        let mut kind = PcOutcomeKind::NotConverged;
        let (mut za, mut zb) = (0.0, 0.0);
        assert_eq!(pc_trace_outcome(trace, &mut kind, &mut za, &mut zb, 1), PcStatus::Ok);
        assert_eq!(kind, PcOutcomeKind::BestProximityPair);
        assert!((za - 1.0).abs() <= 1e-6 && (zb + 1.0).abs() <= 1e-6);
        pc_trace_free(trace);
        pc_instance_free(inst);
    }
}

#[test]
fn intersecting_fixed_point() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(pc_gallery_intersecting(0.5, 101, &mut inst), PcStatus::Ok);
        let x0 = [1.0];
        let mut trace = ptr::null_mut();
        let st = pc_iterate(inst, x0.as_ptr(), 1, PcPolicy::FirstListed, 0, 10_000, 1e-6, &mut trace);
        assert_eq!(st, PcStatus::Ok);
        let mut kind = PcOutcomeKind::NotConverged;
        let mut z = 1.0;
        assert_eq!(
            pc_trace_outcome(trace, &mut kind, &mut z, ptr::null_mut(), 1),
            PcStatus::Ok
        );
        assert_eq!(kind, PcOutcomeKind::FixedPoint);
        assert!(z.abs() <= 1e-6);
        pc_trace_free(trace);
        pc_instance_free(inst);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut inst = ptr::null_mut();
        let bad = CString::new("{\"dimension\": 1}").unwrap();
        assert_eq!(pc_instance_from_json(bad.as_ptr(), &mut inst), PcStatus::InstanceFormat);
        assert!(inst.is_null());
        assert!(last_error().contains("instance format"));

        assert_eq!(pc_instance_from_json(ptr::null(), &mut inst), PcStatus::NullPointer);
        let invalid = [0xffu8, 0];
        assert_eq!(
            pc_instance_from_json(invalid.as_ptr().cast(), &mut inst),
            PcStatus::InvalidUtf8
        );
        assert_eq!(pc_gallery_intersecting(1.5, 101, &mut inst), PcStatus::Parameter);
        assert_eq!(pc_gallery_midpoint(1, ptr::null_mut()), PcStatus::NullPointer);

        let inst = midpoint();
        let x0 = [0.0];
        let mut trace = ptr::null_mut();
        let st = pc_iterate(inst, x0.as_ptr(), 1, PcPolicy::Nearest, 0, 100, 1e-6, &mut trace);
        assert_eq!(st, PcStatus::Domain);
        assert!(trace.is_null());
        assert_eq!(pc_trace_len(trace), 0);
        pc_instance_free(inst);

        let (mut k1, mut k2, mut w) = (0.0, 0.0, 0.0);
        assert_eq!(pc_derived_constants(1.2, 0.1, 0.1, &mut k1, &mut k2, &mut w), PcStatus::Parameter);
        pc_instance_free(ptr::null_mut());
        pc_trace_free(ptr::null_mut());
        pc_string_free(ptr::null_mut());
    }
}

#[test]
fn scalar_functions() {
    let (mut k1, mut k2, mut w) = (0.0, 0.0, 0.0);
    let st = unsafe { pc_derived_constants(0.5, 0.2, 0.3, &mut k1, &mut k2, &mut w) };
    assert_eq!(st, PcStatus::Ok);
    assert!((k1 - 0.5).abs() < 1e-12);
    assert!((k2 - 1.0 / 0.7).abs() < 1e-12);
    assert!((w - 0.35).abs() < 1e-12);

    assert_eq!(pc_classify_region(0.1, 0.2), PcRegion::Delta1);
    assert_eq!(pc_classify_region(0.5, 0.5), PcRegion::Outside);

    let a = [0.0, 0.0, 1.0, 0.0];
    let b = [0.0, 2.0];
    let (mut h, mut d) = (0.0, 0.0);
    let st = unsafe { pc_hausdorff(a.as_ptr(), 2, b.as_ptr(), 1, 2, &mut h, &mut d) };
    assert_eq!(st, PcStatus::Ok);
    assert!((h - 5f64.sqrt()).abs() < 1e-15);
    assert_eq!(d, 2.0);
    let st = unsafe { pc_hausdorff(a.as_ptr(), 0, b.as_ptr(), 1, 2, &mut h, &mut d) };
    assert_eq!(st, PcStatus::InstanceFormat);
}

fn include_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_exports() {
    let header = std::fs::read_to_string(include_dir().join("proxcycle.h")).unwrap();
    for name in [
        "pc_instance_from_json",
        "pc_gallery_midpoint",
        "pc_gallery_intersecting",
        "pc_gallery_multivalued_ball",
        "pc_gallery_expansive",
        "pc_gallery_finite_random",
        "pc_instance_free",
        "pc_instance_dim",
        "pc_instance_set_distance",
        "pc_instance_to_json",
        "pc_certify",
        "pc_certify_json",
        "pc_iterate",
        "pc_trace_free",
        "pc_trace_len",
        "pc_trace_point",
        "pc_trace_step_dist",
        "pc_trace_outcome",
        "pc_hausdorff",
        "pc_classify_region",
        "pc_derived_constants",
        "pc_last_error_message",
        "pc_string_free",
        "typedef struct PcInstance PcInstance;",
        "typedef struct PcTrace PcTrace;",
        "PC_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles and runs a C program against the static library.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("cc not found; skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libproxcycle_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());

    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
