use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qsdesign_ffi::*;

fn last_error() -> String {
    let p = qs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generate(n: usize, m: usize, seed: u64) -> Result<*mut QsDesign, QsStatus> {
    let mut d = ptr::null_mut();
    match unsafe { qs_generate(n, m, seed, ptr::null(), &mut d) } {
        QsStatus::Ok => Ok(d),
        s => {
            assert!(d.is_null());
            Err(s)
        }
    }
}

#[test]
fn generate_evaluate_copy() {
    let d = generate(6, 6, 0).unwrap();
    unsafe {
        assert_eq!((qs_design_runs(d), qs_design_components(d)), (6, 6));
        let mut r = QsMetrics::default();
        assert_eq!(qs_evaluate(d, &mut r), QsStatus::Ok);
        assert_eq!((r.d1, r.d2sq, r.dh, r.pair_count), (14, 40, 6, 1));
        assert!(r.r_ave_exact);
        assert_eq!((r.r_ave_num, r.r_ave_den), (1, 5));
        assert!(r.is_marginally_coupled);

        let mut o = vec![0u32; 36];
        assert_eq!(qs_design_copy_o(d, o.as_mut_ptr(), o.len()), QsStatus::Ok);
        assert_eq!(&o[..6], &[4, 6, 5, 3, 2, 1]);
        let mut x = vec![0u32; 35];
        assert_eq!(qs_design_copy_x(d, x.as_mut_ptr(), x.len()), QsStatus::BufferTooSmall);
        assert!(last_error().contains("36 needed"));
        qs_design_free(d);
    }
}

#[test]
fn error_codes() {
    assert_eq!(generate(7, 6, 0).unwrap_err(), QsStatus::Unsupported);
    assert!(last_error().contains("multiple"));
    assert_eq!(generate(9, 9, 0).unwrap_err(), QsStatus::Unsupported);
    unsafe {
        assert_eq!(qs_generate(6, 6, 0, ptr::null(), ptr::null_mut()), QsStatus::NullPointer);
        assert_eq!(qs_evaluate(ptr::null(), ptr::null_mut()), QsStatus::NullPointer);
        let mut cfg = qs_ta_config_default();
        cfg.outer = 0;
        let mut d = ptr::null_mut();
        assert_eq!(qs_generate(8, 8, 0, &cfg, &mut d), QsStatus::InvalidArgument);
        cfg.outer = 5;
        cfg.weight_den = 0;
        assert_eq!(qs_generate(8, 8, 0, &cfg, &mut d), QsStatus::InvalidArgument);
        qs_design_free(ptr::null_mut());
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("d.csv").to_str().unwrap()).unwrap();
    let d = generate(12, 6, 1).unwrap();
    unsafe {
        assert_eq!(qs_design_write(d, path.as_ptr()), QsStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qs_design_read(path.as_ptr(), &mut back), QsStatus::Ok);
        let (mut a, mut b) = (vec![0u32; 72], vec![0u32; 72]);
        qs_design_copy_x(d, a.as_mut_ptr(), 72);
        qs_design_copy_x(back, b.as_mut_ptr(), 72);
        assert_eq!(a, b);
        qs_design_free(back);
        qs_design_free(d);

        let missing = CString::new(dir.path().join("nope.csv").to_str().unwrap()).unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(qs_design_read(missing.as_ptr(), &mut none), QsStatus::Io);
        std::fs::write(dir.path().join("bad.csv"), "x1,o1\nz,1\n").unwrap();
        let bad = CString::new(dir.path().join("bad.csv").to_str().unwrap()).unwrap();
        assert_eq!(qs_design_read(bad.as_ptr(), &mut none), QsStatus::Parse);
    }
}

#[test]
fn tsp_profit() {
    let stays = [1.35, 2.09, 2.23, 2.75, 4.0, 2.81];
    let order = [6u32, 2, 5, 3, 1, 4];
    let mut f = 0.0;
    unsafe {
        assert_eq!(qs_tsp_profit(stays.as_ptr(), order.as_ptr(), 6, &mut f), QsStatus::Ok);
        assert!((f - 222.84).abs() < 0.01);
        let dup = [1u32, 1, 2, 3, 4, 5];
        assert_eq!(qs_tsp_profit(stays.as_ptr(), dup.as_ptr(), 6, &mut f), QsStatus::InvalidArgument);
    }
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Compiles `tests/smoke.c` against the generated header and the static
/// library, then runs it. Skipped when no C compiler or archive is found.
#[test]
fn c_program_links_and_runs() {
    let header_dir = manifest().join("include");
    assert!(header_dir.join("qsdesign.h").exists(), "header was not generated");
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let archive = profile_dir.join("libqsdesign_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no cc or {}", archive.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest().join("tests/smoke.c"))
        .arg("-I")
        .arg(&header_dir)
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(Path::new(&exe)).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "d1=14 d2sq=40 dH=6 r_ave=1/5 o11=4");
}
