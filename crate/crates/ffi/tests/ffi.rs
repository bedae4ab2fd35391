use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dpbb_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(dpbb_last_error()) }.to_string_lossy().into_owned()
}

fn preset(family: DpbbFamily, noise: f64, seed: u64, noisy: bool) -> *mut DpbbProblem {
    let mut p = ptr::null_mut();
    let st = unsafe { dpbb_problem_generate(family as u32, noise, seed, noisy, &mut p) };
    assert_eq!(st, DpbbStatus::Ok, "{}", last_error());
    p
}

#[test]
fn solves_first_example_with_trace() {
    let p = preset(DpbbFamily::Paper1, 0.0, 0, false);
    assert_eq!(unsafe { (dpbb_problem_rows(p), dpbb_problem_cols(p)) }, (10, 3));

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dpbb_solve_problem(p, &mut r) }, DpbbStatus::Ok);
    let mut x = [9u8; 3];
    assert_eq!(unsafe { dpbb_result_solution(r, x.as_mut_ptr(), 3) }, DpbbStatus::Ok);
    assert_eq!(x, [1, 0, 1]);
    assert!(unsafe { dpbb_result_final_sse(r) } <= 1e-9);

    let (mut s0, mut s1, mut d) = (0.0, 0.0, 9u8);
    assert_eq!(unsafe { dpbb_result_stage(r, 1, &mut s0, &mut s1, &mut d) }, DpbbStatus::Ok);
    assert!((s0 - 1.8389).abs() / 1.8389 < 1e-3);
    assert!(s1 <= 1e-20);
    assert_eq!(d, 1);
    assert_eq!(unsafe { dpbb_result_stage(r, 4, &mut s0, ptr::null_mut(), ptr::null_mut()) }, DpbbStatus::Dimension);
    assert_eq!(unsafe { dpbb_result_stage(r, 0, &mut s0, ptr::null_mut(), ptr::null_mut()) }, DpbbStatus::Dimension);

    let json = unsafe { dpbb_result_trace_json(r) };
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let doc: dpbb::trace::TraceDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.solution, vec![1, 0, 1]);
    unsafe {
        dpbb_string_free(json);
        dpbb_result_free(r);
        dpbb_problem_free(p);
    }
}

#[test]
fn matrix_round_trips_through_handles() {
    let p = preset(DpbbFamily::Paper2, 0.2, 7, true);
    let mut a = vec![0.0; 200];
    let mut b = vec![0.0; 20];
    unsafe {
        assert_eq!(dpbb_problem_copy_matrix(p, a.as_mut_ptr(), a.len()), DpbbStatus::Ok);
        assert_eq!(dpbb_problem_copy_rhs(p, b.as_mut_ptr(), b.len()), DpbbStatus::Ok);
        assert_eq!(dpbb_problem_copy_rhs(p, b.as_mut_ptr(), 5), DpbbStatus::BufferTooSmall);
    }
    let mut q = ptr::null_mut();
    let st = unsafe { dpbb_problem_new(20, 10, a.as_ptr(), b.as_ptr(), 0.0, &mut q) };
    assert_eq!(st, DpbbStatus::Ok);

    let (mut x1, mut x2) = ([0u8; 10], [0u8; 10]);
    let (mut s1, mut s2) = (0.0, 0.0);
    unsafe {
        assert_eq!(dpbb_oracle_solve(p, 24, x1.as_mut_ptr(), 10, &mut s1), DpbbStatus::Ok);
        assert_eq!(dpbb_oracle_solve(q, 24, x2.as_mut_ptr(), 10, &mut s2), DpbbStatus::Ok);
        assert_eq!(dpbb_oracle_solve(q, 4, x2.as_mut_ptr(), 10, &mut s2), DpbbStatus::InvalidSpec);
    }
    assert_eq!((x1, s1.to_bits()), (x2, s2.to_bits()));
    unsafe {
        dpbb_problem_free(p);
        dpbb_problem_free(q);
    }
}

#[test]
fn baseline_recovers_clean_second_example() {
    let p = preset(DpbbFamily::Paper2, 0.0, 0, false);
    let mut real = [0.0; 10];
    let mut bits = [0u8; 10];
    let mut sse = f64::NAN;
    let st = unsafe { dpbb_baseline_solve(p, real.as_mut_ptr(), bits.as_mut_ptr(), 10, &mut sse) };
    assert_eq!(st, DpbbStatus::Ok);
    assert_eq!(bits, [1, 0, 1, 1, 1, 0, 1, 1, 1, 0]);
    assert!(sse < 1e-9);
    unsafe { dpbb_problem_free(p) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut p = ptr::null_mut();
    let a = [1.0, 2.0, 3.0, 4.0];
    let b = [1.0, 1.0];
    assert_eq!(unsafe { dpbb_problem_new(2, 2, a.as_ptr(), b.as_ptr(), 0.0, &mut p) }, DpbbStatus::Dimension);
    assert!(last_error().contains("overdetermined"));
    assert!(p.is_null());

    let dup = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
    let b3 = [0.0; 3];
    assert_eq!(
        unsafe { dpbb_problem_new(3, 2, dup.as_ptr(), b3.as_ptr(), 0.0, &mut p) },
        DpbbStatus::RankDeficient
    );
    let nan = [1.0, f64::NAN, 0.0];
    assert_eq!(
        unsafe { dpbb_problem_new(3, 1, nan.as_ptr(), b3.as_ptr(), 0.0, &mut p) },
        DpbbStatus::Dimension
    );
    assert_eq!(
        unsafe { dpbb_problem_new(3, 1, ptr::null(), b3.as_ptr(), 0.0, &mut p) },
        DpbbStatus::NullPointer
    );
    assert_eq!(
        unsafe { dpbb_problem_new(3, 1, b3.as_ptr(), b3.as_ptr(), -1.0, &mut p) },
        DpbbStatus::InvalidSpec
    );
    assert_eq!(unsafe { dpbb_problem_generate(7, 0.0, 0, false, &mut p) }, DpbbStatus::InvalidSpec);
    assert_eq!(unsafe { dpbb_problem_generate(1, 3.0, 0, false, &mut p) }, DpbbStatus::InvalidSpec);

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dpbb_solve_problem(ptr::null(), &mut r) }, DpbbStatus::NullPointer);
    assert!(unsafe { dpbb_result_trace_json(ptr::null()) }.is_null());
    assert!(unsafe { dpbb_result_final_sse(ptr::null()) }.is_nan());
    assert_eq!(unsafe { dpbb_result_len(ptr::null()) }, 0);
    unsafe {
        dpbb_problem_free(ptr::null_mut());
        dpbb_result_free(ptr::null_mut());
        dpbb_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_exported_surface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dpbb.h")).unwrap();
    for name in [
        "dpbb_problem_new",
        "dpbb_problem_generate",
        "dpbb_problem_free",
        "dpbb_solve_problem",
        "dpbb_result_stage",
        "dpbb_result_trace_json",
        "dpbb_oracle_solve",
        "dpbb_baseline_solve",
        "dpbb_last_error",
        "DPBB_STATUS_RANK_DEFICIENT = 4",
        "typedef struct DpbbProblem DpbbProblem;",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

/// Compiles a small C program against the generated header and static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir: PathBuf = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libdpbb_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler not available");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("x=101 stage1=1.8389 decision=1"), "{stdout}");
    assert!(stdout.contains("square=3"), "{stdout}");
}
