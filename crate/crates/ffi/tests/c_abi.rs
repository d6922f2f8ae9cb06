use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mulmetric_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = mm_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_problem_solves() {
    unsafe {
        let mut problem = ptr::null_mut();
        assert_eq!(
            mm_problem_from_registry(cstr("paper-scalar").as_ptr(), &mut problem),
            MmStatus::Ok
        );
        for x0 in [0.1, 0.5, 1.0] {
            assert_eq!(mm_problem_set_x0(problem, &x0, 1), MmStatus::Ok);
            let mut report = ptr::null_mut();
            assert_eq!(mm_solve(problem, &mut report), MmStatus::Ok);
            let mut z = 0.0;
            assert_eq!(mm_report_fixed_point(report, &mut z, 1), MmStatus::Ok);
            assert!((z - 0.7411317711).abs() < 1e-9);
            assert!(mm_report_iterations(report) > 0);
            assert!(mm_report_error_bound_log(report) <= 1e-12);
            mm_report_free(report);
        }
        mm_problem_free(problem);
    }
}

#[test]
fn invalid_inputs_report_codes() {
    unsafe {
        let mut problem = ptr::null_mut();
        assert_eq!(
            mm_problem_from_registry(ptr::null(), &mut problem),
            MmStatus::NullPointer
        );
        assert_eq!(
            mm_problem_from_toml(cstr("kind = ").as_ptr(), &mut problem),
            MmStatus::ParseError
        );
        assert!(!last_error().is_empty());

        assert_eq!(
            mm_problem_from_registry(cstr("sqrt-toy").as_ptr(), &mut problem),
            MmStatus::Ok
        );
        let bad = -1.0;
        assert_eq!(mm_problem_set_x0(problem, &bad, 1), MmStatus::DomainError);
        assert_eq!(
            mm_problem_set_tolerance(problem, 0.0, 10),
            MmStatus::InvalidArgument
        );
        assert_eq!(mm_problem_set_tolerance(problem, 1e-12, 2), MmStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(mm_solve(problem, &mut report), MmStatus::NotConverged);
        assert!(!mm_report_converged(report));
        let mut small = [0.0f64; 0];
        assert_eq!(
            mm_report_fixed_point(report, small.as_mut_ptr(), 0),
            MmStatus::BufferTooSmall
        );
        mm_report_free(report);
        mm_problem_free(problem);

        assert_eq!(mm_solve(ptr::null(), &mut report), MmStatus::NullPointer);
        assert!(mm_report_residual_log(ptr::null()).is_nan());
    }
}

#[test]
fn toml_round_trip_and_sampling() {
    unsafe {
        let mut problem = ptr::null_mut();
        assert_eq!(
            mm_problem_from_registry(cstr("paper-scalar").as_ptr(), &mut problem),
            MmStatus::Ok
        );
        let mut text = ptr::null_mut();
        assert_eq!(mm_problem_to_toml(problem, &mut text), MmStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(mm_problem_from_toml(text, &mut again), MmStatus::Ok);
        mm_string_free(text);

        let mut lambda = 0.0;
        assert_eq!(mm_estimate_lambda(again, 2000, &mut lambda), MmStatus::Ok);
        assert!(lambda <= 0.997);
        let mut holds = false;
        assert_eq!(mm_verify_contraction(again, 2000, &mut holds), MmStatus::Ok);
        assert!(holds);
        mm_problem_free(again);
        mm_problem_free(problem);
    }
}

#[test]
fn distances() {
    unsafe {
        let mut d = 0.0;
        let (x, y) = ([2.0, 3.0], [1.0, 6.0]);
        assert_eq!(
            mm_dist_pos_vec(x.as_ptr(), y.as_ptr(), 2, &mut d),
            MmStatus::Ok
        );
        assert!((d.exp() - 4.0).abs() < 1e-14);
        let (x, y) = ([1.0, 0.0], [0.0, 0.0]);
        assert_eq!(
            mm_dist_exp(x.as_ptr(), y.as_ptr(), 2, 2.0, &mut d),
            MmStatus::Ok
        );
        assert!((d.exp() - 2.0).abs() < 1e-15);
        assert_eq!(
            mm_dist_exp(x.as_ptr(), y.as_ptr(), 2, 1.0, &mut d),
            MmStatus::DomainError
        );
        assert_eq!(mm_apriori_bound(2f64.ln(), 0.5, 10, &mut d), MmStatus::Ok);
        assert!((d - 2.0 / 1024.0 * 2f64.ln()).abs() < 1e-18);
        assert_eq!(
            mm_apriori_bound(1.0, 1.0, 1, &mut d),
            MmStatus::InvalidArgument
        );
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libmulmetric_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("mulmetric_smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
