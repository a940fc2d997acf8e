use std::ffi::{CStr, CString};
use std::f64::consts::LN_2;
use std::process::Command;
use std::ptr;

use besov_tree_ffi::*;

unsafe fn params(beta: f64, p: f64, depth: usize) -> *mut BtParams {
    let mut out = ptr::null_mut();
    assert_eq!(bt_params_new(2, LN_2, beta, 0.0, p, depth, &mut out), BtStatus::Ok);
    out
}

unsafe fn boundary(values: &[f64], depth: usize) -> *mut BtBoundary {
    let mut out = ptr::null_mut();
    assert_eq!(bt_boundary_new(2, depth, values.as_ptr(), values.len(), &mut out), BtStatus::Ok);
    out
}

#[test]
fn whitney_trace_round_trip() {
    unsafe {
        let pr = params(2.0 * LN_2, 1.0, 3);
        let vals = [1.0, -2.0, 0.5, 3.0, 0.0, 0.25, -1.0, 7.0];
        let f = boundary(&vals, 3);
        let mut u = ptr::null_mut();
        assert_eq!(bt_whitney_extend(f, pr, &mut u), BtStatus::Ok);
        assert_eq!(bt_tree_depth(u), 3);
        let mut t = ptr::null_mut();
        assert_eq!(bt_trace(u, &mut t), BtStatus::Ok);
        let mut back = [0.0; 8];
        assert_eq!(bt_boundary_len(t), 8);
        assert_eq!(bt_boundary_values(t, back.as_mut_ptr(), 8), BtStatus::Ok);
        assert_eq!(back, vals);
        let (mut lp, mut grad, mut total) = (0.0, 0.0, 0.0);
        assert_eq!(bt_newtonian_norm(u, pr, &mut lp, &mut grad, &mut total), BtStatus::Ok);
        assert!(lp > 0.0 && grad > 0.0 && (lp + grad - total).abs() < 1e-12);
        let mut e = 0.0;
        assert_eq!(bt_dyadic_energy(f, pr, &mut e), BtStatus::Ok);
        assert!(e > 0.0);
        assert_eq!(bt_lp_norm(f, 1.0, &mut e), BtStatus::Ok);
        assert_eq!(e, vals.iter().map(|v| v.abs()).sum::<f64>() / 8.0);
        bt_tree_free(u);
        bt_boundary_free(t);
        bt_boundary_free(f);
        bt_params_free(pr);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut pr = ptr::null_mut();
        assert_eq!(bt_params_new(1, LN_2, 1.0, 0.0, 1.0, 4, &mut pr), BtStatus::InvalidParams);
        assert!(pr.is_null());
        let msg = CStr::from_ptr(bt_last_error()).to_str().unwrap();
        assert!(msg.contains("K must be at least 2"), "{msg}");

        let mut f = ptr::null_mut();
        let vals = [1.0, 2.0, 3.0];
        assert_eq!(bt_boundary_new(2, 2, vals.as_ptr(), 3, &mut f), BtStatus::ShapeMismatch);
        assert_eq!(bt_boundary_new(2, 2, ptr::null(), 4, &mut f), BtStatus::NullPointer);

        // off the borderline exponent
        let pr = params(3.0 * LN_2, 1.0, 2);
        let f = boundary(&[1.0, 0.0, 0.0, 0.0], 2);
        let mut u = ptr::null_mut();
        assert_eq!(bt_gagliardo_extend(f, pr, &mut u), BtStatus::InvalidParams);
        assert!(u.is_null());

        let mut e = 0.0;
        assert_eq!(bt_dyadic_energy(f, pr, &mut e), BtStatus::Ok);
        assert!(bt_last_error().is_null());

        let missing = CString::new("/no/such/file.txt").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(bt_boundary_read(missing.as_ptr(), &mut g), BtStatus::Io);
        bt_boundary_free(f);
        bt_params_free(pr);
        bt_params_free(ptr::null_mut());
    }
}

#[test]
fn layered_and_alpha_extensions() {
    unsafe {
        let pr = params(2.0 * LN_2, 1.0, 6);
        let vals: Vec<f64> = (0..64).map(|i| if i < 16 { 1.0 } else { 0.0 }).collect();
        let f = boundary(&vals, 6);
        let mut u = ptr::null_mut();
        assert_eq!(bt_gagliardo_extend(f, pr, &mut u), BtStatus::Ok);
        bt_tree_free(u);
        let mut a = ptr::null_mut();
        assert_eq!(bt_alpha_extend(f, 2, pr, &mut a), BtStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(bt_trace(a, &mut t), BtStatus::Ok);
        let mut back = vec![0.0; 64];
        assert_eq!(bt_boundary_values(t, back.as_mut_ptr(), 64), BtStatus::Ok);
        assert_eq!(back, vals);
        let mut theta = ptr::null_mut();
        assert_eq!(bt_params_with_theta(pr, 0.5, &mut theta), BtStatus::Ok);
        let mut e = 0.0;
        assert_eq!(bt_double_integral_energy(f, theta, &mut e), BtStatus::Ok);
        assert!(e > 0.0);
        for h in [t] {
            bt_boundary_free(h);
        }
        bt_tree_free(a);
        bt_boundary_free(f);
        bt_params_free(theta);
        bt_params_free(pr);
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "besov_tree.h"

int main(void) {
    BtParams *p = NULL;
    BtBoundary *f = NULL, *t = NULL;
    BtTree *u = NULL;
    double vals[4] = {1.0, 2.0, -1.0, 0.5};
    double back[4];
    if (bt_params_new(2, 0.6931471805599453, 1.3862943611198906, 0.0, 1.0, 2, &p) != BT_STATUS_OK) return 1;
    if (bt_boundary_new(2, 2, vals, 4, &f) != BT_STATUS_OK) return 2;
    if (bt_whitney_extend(f, p, &u) != BT_STATUS_OK) return 3;
    if (bt_trace(u, &t) != BT_STATUS_OK) return 4;
    if (bt_boundary_values(t, back, 4) != BT_STATUS_OK) return 5;
    for (int i = 0; i < 4; i++) if (back[i] != vals[i]) return 6;
    bt_params_free(p);
    p = NULL;
    if (bt_params_new(1, 1.0, 1.0, 0.0, 1.0, 2, &p) != BT_STATUS_INVALID_PARAMS) return 7;
    if (bt_last_error() == NULL) return 8;
    bt_boundary_free(t);
    bt_boundary_free(f);
    bt_tree_free(u);
    printf("ok\n");
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = env!("CARGO_MANIFEST_DIR");
    // target/<profile>/deps/abi-xxxx -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libbesov_tree_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(format!("-I{crate_dir}/include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
