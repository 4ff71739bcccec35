use std::ffi::CStr;
use std::ptr;

use mpcr_ffi::*;

fn last_error() -> String {
    let p = mpcr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn params(kappa: u32, v: &[f64], z0: &[u64], seed: u64) -> *mut MpcrParams {
    let mut out = ptr::null_mut();
    let s = unsafe { mpcr_params_new(kappa, v.as_ptr(), z0.as_ptr(), v.len(), seed, &mut out) };
    assert_eq!(s, MpcrStatus::Ok);
    out
}

#[test]
fn params_lifecycle_and_validation() {
    let p = params(25, &[0.9, 0.2], &[1, 1], 7);
    unsafe {
        assert_eq!(mpcr_params_dim(p), 2);
        assert!((mpcr_params_k(p) / 1.9f64.powi(25) - 1.0).abs() < 1e-14);
        mpcr_params_free(p);
        mpcr_params_free(ptr::null_mut());
        assert_eq!(mpcr_params_dim(ptr::null()), 0);
    }

    let mut out = ptr::null_mut();
    let s = unsafe { mpcr_params_new(5, [0.2, 0.9].as_ptr(), [1u64, 1].as_ptr(), 2, 0, &mut out) };
    assert_eq!(s, MpcrStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(last_error().contains("non-increasing"));

    let s = unsafe { mpcr_params_new(80, [0.9].as_ptr(), [1u64].as_ptr(), 1, 0, &mut out) };
    assert_eq!(s, MpcrStatus::Numerical);

    let s = unsafe { mpcr_params_new(5, ptr::null(), [1u64].as_ptr(), 1, 0, &mut out) };
    assert_eq!(s, MpcrStatus::NullPointer);
}

#[test]
fn trajectories_match_core() {
    let p = params(10, &[0.9, 0.2], &[3, 2], 11);
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(
            mpcr_simulate(p, 10, MpcrMode::Coupled, 4, &mut t),
            MpcrStatus::Ok
        );
        assert_eq!(mpcr_trajectory_len(t), 11);

        let core = mpcr_core::ModelParams::new(10, vec![0.9, 0.2], vec![3, 2], 11).unwrap();
        let expected = mpcr_core::sim::simulate(
            &core,
            10,
            mpcr_core::SimMode::Coupled,
            &mut mpcr_core::RngStream::new(11, 4),
        )
        .unwrap();
        let (mut z, mut y) = ([0u64; 2], [0u64; 2]);
        for (i, s) in expected.states.iter().enumerate() {
            assert_eq!(
                mpcr_trajectory_state(t, i, z.as_mut_ptr(), y.as_mut_ptr(), 2),
                MpcrStatus::Ok
            );
            assert_eq!(z.to_vec(), s.z);
            assert_eq!(Some(y.to_vec()), s.y);
        }
        assert_eq!(
            mpcr_trajectory_state(t, 11, z.as_mut_ptr(), y.as_mut_ptr(), 2),
            MpcrStatus::OutOfRange
        );
        assert_eq!(
            mpcr_trajectory_state(t, 0, z.as_mut_ptr(), ptr::null_mut(), 1),
            MpcrStatus::BufferTooSmall
        );
        mpcr_trajectory_free(t);
        mpcr_params_free(p);
    }
}

#[test]
fn paired_records() {
    let p = params(12, &[0.9, 0.9], &[2, 1], 3);
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(mpcr_run_theorem2(p, -2, 16, &mut r), MpcrStatus::Ok);
        assert_eq!(mpcr_records_len(r), 16);
        let (mut sz, mut w, mut lim, mut h) = ([0.0; 2], [0.0; 2], [0.0; 2], 0.0);
        assert_eq!(
            mpcr_records_get(
                r,
                3,
                sz.as_mut_ptr(),
                w.as_mut_ptr(),
                lim.as_mut_ptr(),
                2,
                &mut h
            ),
            MpcrStatus::Ok
        );
        assert!(sz[0] <= w[0] && h > 0.0);
        let (mut x, mut xl, mut xt, mut lt) = ([0.0; 2], [0.0; 2], 0.0, 0.0);
        assert_eq!(
            mpcr_records_offset(r, 3, x.as_mut_ptr(), xl.as_mut_ptr(), 2, &mut xt, &mut lt),
            MpcrStatus::Ok
        );
        assert!((x[0] + x[1] - xt).abs() < 1e-12);
        assert!((xl[0] + xl[1] - lt).abs() < 1e-12);
        mpcr_records_free(r);

        assert_eq!(mpcr_run_theorem1(p, 4, &mut r), MpcrStatus::Ok);
        assert_eq!(
            mpcr_records_offset(
                r,
                0,
                x.as_mut_ptr(),
                ptr::null_mut(),
                2,
                ptr::null_mut(),
                ptr::null_mut()
            ),
            MpcrStatus::OutOfRange
        );
        mpcr_records_free(r);
        assert_eq!(mpcr_run_theorem1(p, 0, &mut r), MpcrStatus::InvalidArgument);
        mpcr_params_free(p);
    }
}

#[test]
fn map_functions() {
    let mut out = 0.0;
    let mut bound = 0.0;
    unsafe {
        assert_eq!(mpcr_f(1.0, 2, 0.9, &mut out), MpcrStatus::Ok);
        assert!((out - 1.9826530612244898).abs() < 1e-15);
        assert_eq!(mpcr_f_inverse(1.45, 0.5, &mut out), MpcrStatus::Ok);
        assert_eq!(
            mpcr_h(2.0, 0.9, 1e-10, &mut out, &mut bound),
            MpcrStatus::Ok
        );
        assert!((out - 1.084371955982323846).abs() <= bound);
        assert_eq!(
            mpcr_h(2.0, 0.9, 1e-30, &mut out, ptr::null_mut()),
            MpcrStatus::Numerical
        );

        let v = [0.9, 0.2];
        let (mut g, mut gb) = ([0.0; 2], [0.0; 2]);
        assert_eq!(
            mpcr_g(1.0, v.as_ptr(), 2, 1e-9, g.as_mut_ptr(), gb.as_mut_ptr()),
            MpcrStatus::Ok
        );
        assert!(g[0] < g[1] && g[1] < 1.0);

        let x = [0.3, 0.1];
        let mut y = [0.0; 2];
        assert_eq!(
            mpcr_multi_iterate(x.as_ptr(), 3, v.as_ptr(), 2, y.as_mut_ptr()),
            MpcrStatus::Ok
        );
        let mut back = [0.0; 2];
        assert_eq!(
            mpcr_multi_iterate(y.as_ptr(), -3, v.as_ptr(), 2, back.as_mut_ptr()),
            MpcrStatus::Ok
        );
        assert!((back[0] - 0.3).abs() < 1e-12 && (back[1] - 0.1).abs() < 1e-12);
    }
    let version = unsafe { CStr::from_ptr(mpcr_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mpcr.h")).unwrap();
    for name in [
        "mpcr_last_error",
        "mpcr_version",
        "mpcr_params_new",
        "mpcr_params_free",
        "mpcr_simulate",
        "mpcr_trajectory_state",
        "mpcr_run_theorem1",
        "mpcr_run_theorem2",
        "mpcr_records_get",
        "mpcr_records_offset",
        "mpcr_h",
        "mpcr_g",
        "mpcr_multi_iterate",
        "typedef struct MpcrParams MpcrParams",
        "MPCR_STATUS_BUFFER_TOO_SMALL = 4",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mpcr.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler available; skipped");
        return;
    };
    assert!(status.success());
}
