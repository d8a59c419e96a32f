use std::ffi::{c_char, CStr};
use std::ptr;

use mzbath_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { mz_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn bath() -> *mut MzBath {
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { mz_bath_new(100.0, 1e13, 0.1, 1e12, &mut b) }, MzStatus::Ok);
    b
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(mz_version()) };
    assert_eq!(v.to_str().unwrap(), mzbath::VERSION);
}

#[test]
fn density_matrix_round_trip_and_measures() {
    let re = [0.5, 0.5, 0.5, 0.5];
    let im = [0.0; 4];
    let mut dm = ptr::null_mut();
    unsafe {
        assert_eq!(mz_density_matrix_new(re.as_ptr(), im.as_ptr(), &mut dm), MzStatus::Ok);
        let (mut r, mut i) = ([0.0; 4], [1.0; 4]);
        assert_eq!(mz_density_matrix_elements(dm, r.as_mut_ptr(), i.as_mut_ptr()), MzStatus::Ok);
        assert_eq!((r, i), (re, im));
        let (mut s, mut cd, mut m) = (f64::NAN, f64::NAN, f64::NAN);
        assert_eq!(mz_von_neumann_entropy(dm, &mut s), MzStatus::Ok);
        assert_eq!(mz_distillable_coherence(dm, &mut cd), MzStatus::Ok);
        assert_eq!(mz_mixedness(dm, &mut m), MzStatus::Ok);
        assert!(s.abs() < 1e-12 && (cd - 1.0).abs() < 1e-12 && m.abs() < 1e-12);
        mz_density_matrix_free(dm);
        mz_density_matrix_free(ptr::null_mut());
    }
}

#[test]
fn invalid_state_reports_positivity() {
    let re = [0.5, 0.9, 0.9, 0.5];
    let im = [0.0; 4];
    let mut dm = ptr::null_mut();
    let st = unsafe { mz_density_matrix_new(re.as_ptr(), im.as_ptr(), &mut dm) };
    assert_eq!(st, MzStatus::Positivity);
    assert!(dm.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn relative_entropy_without_support_fails() {
    let pure0 = ([1.0, 0.0, 0.0, 0.0], [0.0; 4]);
    let pure1 = ([0.0, 0.0, 0.0, 1.0], [0.0; 4]);
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        mz_density_matrix_new(pure0.0.as_ptr(), pure0.1.as_ptr(), &mut a);
        mz_density_matrix_new(pure1.0.as_ptr(), pure1.1.as_ptr(), &mut b);
        let mut out = 0.0;
        assert_eq!(mz_relative_entropy(a, b, &mut out), MzStatus::Support);
        assert_eq!(mz_relative_entropy(a, a, &mut out), MzStatus::Ok);
        assert_eq!(out, 0.0);
        mz_density_matrix_free(a);
        mz_density_matrix_free(b);
    }
}

#[test]
fn bad_bath_names_the_field() {
    let mut b = ptr::null_mut();
    let st = unsafe { mz_bath_new(100.0, -1.0, 0.1, 1e12, &mut b) };
    assert_eq!(st, MzStatus::Config);
    assert!(last_error().contains("bath.cutoff"));
}

#[test]
fn null_arguments_are_reported() {
    let mut out = 0.0;
    assert_eq!(unsafe { mz_mixedness(ptr::null(), &mut out) }, MzStatus::NullPointer);
    assert!(last_error().contains("dm"));
    let b = bath();
    assert_eq!(unsafe { mz_spectral_density(b, 1e12, ptr::null_mut()) }, MzStatus::NullPointer);
    unsafe { mz_bath_free(b) };
}

#[test]
fn bath_and_interferometer_surface() {
    let b = bath();
    unsafe {
        let (mut rate, mut n) = (0.0, 0.0);
        assert_eq!(mz_bath_markov(b, &mut rate, &mut n), MzStatus::Ok);
        assert!(rate > 0.0 && n > 0.0);

        let mut j = 0.0;
        assert_eq!(mz_spectral_density(b, 1e12, &mut j), MzStatus::Ok);
        let mut kappa = 0.0;
        assert_eq!(mz_noise_kernel(b, 0.0, &mut kappa), MzStatus::Ok);
        assert!(kappa > 0.0);
        let mut mu = 1.0;
        assert_eq!(mz_dissipation_kernel(b, 0.0, &mut mu), MzStatus::Ok);
        assert_eq!(mu, 0.0);
        assert_eq!(mz_noise_kernel(b, -1.0, &mut kappa), MzStatus::Domain);

        let times = [0.0, 1e-13, 1e-12];
        let (mut d, mut g) = ([f64::NAN; 3], [f64::NAN; 3]);
        assert_eq!(
            mz_transient_coefficients(b, times.as_ptr(), 3, d.as_mut_ptr(), g.as_mut_ptr()),
            MzStatus::Ok
        );
        assert_eq!((d[0], g[0]), (0.0, 0.0));
        assert!(d[2] > 0.0);

        let mut cfg = ptr::null_mut();
        assert_eq!(mz_interferometer_new(std::f64::consts::FRAC_PI_2, b, &mut cfg), MzStatus::Ok);
        let (mut d1, mut d2) = (0.0, 0.0);
        assert_eq!(mz_detector_probabilities(cfg, 0.0, &mut d1, &mut d2), MzStatus::Ok);
        assert!((d1 - 0.5).abs() < 1e-12 && (d2 - 0.5).abs() < 1e-12);
        let mut v = 0.0;
        assert_eq!(mz_fringe_visibility(cfg, 0.0, &mut v), MzStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);

        let mut rho = ptr::null_mut();
        assert_eq!(mz_pipeline_state(cfg, 1e-9, &mut rho), MzStatus::Ok);
        let mut s = 0.0;
        assert_eq!(mz_von_neumann_entropy(rho, &mut s), MzStatus::Ok);
        assert!(s > 0.0 && s <= 1.0);
        mz_density_matrix_free(rho);

        let p = [-1e6, 0.0, 1e6];
        let mut dens = [0.0; 3];
        assert_eq!(mz_momentum_distribution(cfg, 0.0, p.as_ptr(), 3, dens.as_mut_ptr()), MzStatus::Ok);
        assert!(dens.iter().all(|&x| x >= 0.0));

        let mut sc = 1.0;
        assert_eq!(mz_entropy_closed_form(1.0, n, &mut sc), MzStatus::Ok);
        assert!(sc.abs() < 1e-12);

        mz_interferometer_free(cfg);
        mz_bath_free(b);
    }
}

#[test]
fn header_declares_the_surface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mzbath.h")).unwrap();
    for name in [
        "MZBATH_H",
        "MZ_STATUS_OK",
        "typedef struct MzBath MzBath",
        "mz_version",
        "mz_last_error_message",
        "mz_density_matrix_new",
        "mz_relative_entropy",
        "mz_transient_coefficients",
        "mz_interferometer_new",
        "mz_momentum_distribution",
        "mz_entropy_closed_form",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
