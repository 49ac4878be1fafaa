//! Drives the C interface the way a foreign caller would: through raw
//! pointers, C strings, and status codes, freeing everything by hand.

use std::ffi::{CStr, CString};
use std::ptr;

use dyadlab_ffi::*;

fn c(text: &str) -> CString {
    CString::new(text).unwrap()
}

unsafe fn last_error_text() -> String {
    let p = dyad_last_error();
    assert!(!p.is_null(), "expected an error message");
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn signal_2d(vals: &[f64], res: u32) -> *mut DyadSignal {
    let mut out = ptr::null_mut();
    let status = dyad_signal_new_2d(res, res, vals.as_ptr(), vals.len(), &mut out);
    assert_eq!(status, DyadStatus::Ok, "{}", last_error_text());
    out
}

#[test]
fn version_is_a_nonempty_static_string() {
    let p = dyad_version();
    assert!(!p.is_null());
    let text = unsafe { CStr::from_ptr(p) }.to_str().unwrap();
    assert!(!text.is_empty());
    assert!(text.split('.').count() >= 2, "not a version: {text}");
}

#[test]
fn forward_inverse_round_trip() {
    unsafe {
        let vals: Vec<f64> = (0..16).map(|i| (i as f64 * 0.71).cos()).collect();
        let sig = signal_2d(&vals, 2);
        assert_eq!(dyad_signal_dims(sig), 2);
        assert_eq!(dyad_signal_len(sig), 16);

        let mut coeffs = ptr::null_mut();
        assert_eq!(dyad_forward(sig, &mut coeffs), DyadStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(dyad_inverse(coeffs, &mut back), DyadStatus::Ok);

        let mut buf = vec![0.0; 16];
        assert_eq!(
            dyad_signal_copy_values(back, buf.as_mut_ptr(), buf.len()),
            DyadStatus::Ok
        );
        for (a, b) in vals.iter().zip(&buf) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }

        dyad_signal_free(sig);
        dyad_signal_free(back);
        dyad_coeffs_free(coeffs);
    }
}

#[test]
fn json_round_trip_preserves_values_exactly() {
    unsafe {
        let vals: Vec<f64> = (0..8).map(|i| 1.0 / (i as f64 + 3.0)).collect();
        let mut sig = ptr::null_mut();
        assert_eq!(
            dyad_signal_new_1d(3, vals.as_ptr(), vals.len(), &mut sig),
            DyadStatus::Ok
        );

        let mut json = ptr::null_mut();
        assert_eq!(dyad_signal_to_json(sig, &mut json), DyadStatus::Ok);
        let text = CStr::from_ptr(json).to_owned();
        let mut parsed = ptr::null_mut();
        assert_eq!(
            dyad_signal_parse(text.as_ptr(), &mut parsed),
            DyadStatus::Ok
        );

        let mut buf = vec![0.0; 8];
        assert_eq!(
            dyad_signal_copy_values(parsed, buf.as_mut_ptr(), buf.len()),
            DyadStatus::Ok
        );
        assert_eq!(vals, buf, "JSON round trip must be bit-exact");

        dyad_string_free(json);
        dyad_signal_free(sig);
        dyad_signal_free(parsed);
    }
}

#[test]
fn norm_agrees_with_the_library() {
    unsafe {
        let vals: Vec<f64> = (0..16).map(|i| ((i * 5 + 2) % 7) as f64 - 3.0).collect();
        let sig = signal_2d(&vals, 2);

        let mut got = 0.0;
        assert_eq!(
            dyad_norm(sig, c("hp-square").as_ptr(), 2.0, &mut got),
            DyadStatus::Ok
        );
        let f = dyadlab::Signal2D::new(dyadlab::Grid2D::new(2, 2).unwrap(), vals).unwrap();
        let want = dyadlab::functionals::norm_2d(&f, dyadlab::functionals::NormKind::HpSquare(2.0))
            .unwrap();
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");

        // inline exponent spelling is equivalent
        let mut inline = 0.0;
        assert_eq!(
            dyad_norm(sig, c("hp-square:2").as_ptr(), f64::NAN, &mut inline),
            DyadStatus::Ok
        );
        assert_eq!(got, inline);

        dyad_signal_free(sig);
    }
}

#[test]
fn apply_agrees_with_the_library() {
    unsafe {
        let gvals: Vec<f64> = (0..16).map(|i| ((i * 3 + 1) % 5) as f64).collect();
        let fvals: Vec<f64> = (0..16).map(|i| (i as f64 * 0.4).sin()).collect();
        let gsig = signal_2d(&gvals, 2);
        let fsig = signal_2d(&fvals, 2);
        let mut gc = ptr::null_mut();
        assert_eq!(dyad_forward(gsig, &mut gc), DyadStatus::Ok);

        let mut out = ptr::null_mut();
        assert_eq!(
            dyad_apply(c("pi2").as_ptr(), gc, fsig, &mut out),
            DyadStatus::Ok
        );
        let mut got = vec![0.0; 16];
        assert_eq!(
            dyad_signal_copy_values(out, got.as_mut_ptr(), got.len()),
            DyadStatus::Ok
        );

        let grid = dyadlab::Grid2D::new(2, 2).unwrap();
        let g = dyadlab::Signal2D::new(grid, gvals).unwrap();
        let f = dyadlab::Signal2D::new(grid, fvals).unwrap();
        let want = dyadlab::paraproduct::NamedOperator2D::new(
            dyadlab::paraproduct::OperatorKind2D::Pi2,
            g,
        )
        .apply(&f)
        .unwrap();
        for (a, b) in want.values().iter().zip(&got) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }

        dyad_signal_free(gsig);
        dyad_signal_free(fsig);
        dyad_signal_free(out);
        dyad_coeffs_free(gc);
    }
}

#[test]
fn constructed_family_has_the_advertised_bounds() {
    unsafe {
        let mut had = ptr::null_mut();
        assert_eq!(
            dyad_construct(c("hadamard").as_ptr(), 2, &mut had),
            DyadStatus::Ok
        );

        let mut bound = 0.0;
        assert_eq!(dyad_matrix_bound(had, &mut bound), DyadStatus::Ok);
        assert!((bound - 2f64.sqrt()).abs() <= 1e-9, "bound {bound}");

        let mut spectral = 0.0;
        assert_eq!(
            dyad_opnorm_l2(c("pi4").as_ptr(), had, &mut spectral),
            DyadStatus::Ok
        );
        assert!(spectral <= bound + 1e-6, "{spectral} exceeds {bound}");

        let mut json = ptr::null_mut();
        assert_eq!(dyad_coeffs_to_json(had, &mut json), DyadStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 9);

        dyad_string_free(json);
        dyad_coeffs_free(had);
    }
}

#[test]
fn failures_report_status_and_message() {
    unsafe {
        // null handle
        let mut coeffs = ptr::null_mut();
        assert_eq!(
            dyad_forward(ptr::null(), &mut coeffs),
            DyadStatus::NullPointer
        );
        assert!(last_error_text().contains("null"));

        // malformed JSON
        let mut sig = ptr::null_mut();
        assert_eq!(
            dyad_signal_parse(c("{oops").as_ptr(), &mut sig),
            DyadStatus::ParseError
        );

        // wrong value count for the grid
        let vals = [1.0, 2.0, 3.0];
        assert_eq!(
            dyad_signal_new_2d(1, 1, vals.as_ptr(), vals.len(), &mut sig),
            DyadStatus::DimensionMismatch
        );

        // non-finite cell
        let bad = [1.0, f64::NAN, 0.0, 0.0];
        assert_eq!(
            dyad_signal_new_2d(1, 1, bad.as_ptr(), bad.len(), &mut sig),
            DyadStatus::NonFinite
        );

        let good = [1.0, -1.0, 2.0, 0.5];
        let s = signal_2d(&good, 1);
        let mut gc = ptr::null_mut();
        assert_eq!(dyad_forward(s, &mut gc), DyadStatus::Ok);

        // missing exponent and unknown kind
        let mut x = 0.0;
        assert_eq!(
            dyad_norm(s, c("lp").as_ptr(), f64::NAN, &mut x),
            DyadStatus::InvalidArgument
        );
        assert!(last_error_text().contains("exponent"));
        assert_eq!(
            dyad_norm(s, c("nope").as_ptr(), 2.0, &mut x),
            DyadStatus::InvalidArgument
        );

        // operator arity against two-variable handles
        let mut out = ptr::null_mut();
        assert_eq!(
            dyad_apply(c("pig").as_ptr(), gc, s, &mut out),
            DyadStatus::DimensionMismatch
        );
        assert_eq!(
            dyad_apply(c("what").as_ptr(), gc, s, &mut out),
            DyadStatus::InvalidArgument
        );

        // a success clears the slot
        assert_eq!(dyad_norm(s, c("lp").as_ptr(), 2.0, &mut x), DyadStatus::Ok);
        assert!(dyad_last_error().is_null());

        dyad_signal_free(s);
        dyad_coeffs_free(gc);
    }
}

#[test]
fn header_is_generated_with_the_full_surface() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/dyadlab.h");
    let text = std::fs::read_to_string(header).expect("header missing; build.rs should write it");
    assert!(text.contains("#ifndef DYADLAB_H"));
    for name in [
        "dyad_signal_new_2d",
        "dyad_signal_free",
        "dyad_forward",
        "dyad_inverse",
        "dyad_norm",
        "dyad_apply",
        "dyad_opnorm_l2",
        "dyad_matrix_bound",
        "dyad_construct",
        "dyad_last_error",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}
