use std::ffi::{CStr, CString};
use std::ptr;

use polyent_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(polyent_last_error_message()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn measure(name: &str) -> *mut PolyentMeasure {
    let name = CString::new(name).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { polyent_measure_new(name.as_ptr(), &mut m) },
        PolyentStatus::Ok
    );
    m
}

fn density(n: u32, re: &[f64]) -> *mut PolyentState {
    let mut s = ptr::null_mut();
    let status = unsafe { polyent_state_density(n, re.as_ptr(), ptr::null(), &mut s) };
    assert_eq!(status, PolyentStatus::Ok, "{}", last_error());
    s
}

/// `p|Φ+><Φ+| + (1-p)|01><01|`, with concurrence `p`.
fn bell_mixture(p: f64) -> Vec<f64> {
    let mut re = vec![0.0; 16];
    re[0] = p / 2.0;
    re[3] = p / 2.0;
    re[12] = p / 2.0;
    re[15] = p / 2.0;
    re[5] = 1.0 - p;
    re
}

#[test]
fn roof_of_a_bell_mixture() {
    let m = measure("concurrence");
    let s = density(2, &bell_mixture(0.7));
    let mut roof = ptr::null_mut();
    unsafe {
        assert_eq!(polyent_roof(m, s, &mut roof), PolyentStatus::Ok);
        assert!((polyent_roof_value(roof) - 0.7).abs() < 1e-12);
        assert!(polyent_roof_is_exact(roof));
        let method = CStr::from_ptr(polyent_roof_method(roof)).to_str().unwrap();
        assert!(!method.is_empty());

        let n = polyent_roof_witness_len(roof);
        assert!(n > 0);
        let (mut total, mut w) = (0.0, 0.0);
        let (mut re, mut im) = ([0.0; 4], [0.0; 4]);
        for i in 0..n {
            let st =
                polyent_roof_witness_member(roof, i, &mut w, re.as_mut_ptr(), im.as_mut_ptr(), 4);
            assert_eq!(st, PolyentStatus::Ok);
            total += w;
        }
        assert!((total - 1.0).abs() < 1e-10);
        assert_eq!(
            polyent_roof_witness_member(roof, n, &mut w, re.as_mut_ptr(), im.as_mut_ptr(), 4),
            PolyentStatus::InvalidArgument
        );

        let mut exact = 0.0;
        assert_eq!(polyent_wootters(s, &mut exact), PolyentStatus::Ok);
        assert!((exact - 0.7).abs() < 1e-12, "{exact}");

        polyent_roof_free(roof);
        polyent_state_free(s);
        polyent_measure_free(m);
    }
}

#[test]
fn entangle_ghz_from_json() {
    let m = measure("tangle");
    let json = CString::new(
        r#"{"n_qubits": 3, "amplitudes": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}"#,
    )
    .unwrap();
    let mut s = ptr::null_mut();
    let mut v = 0.0;
    unsafe {
        assert_eq!(
            polyent_state_from_json(json.as_ptr(), &mut s),
            PolyentStatus::Ok
        );
        assert_eq!(polyent_state_qubits(s), 3);
        assert_eq!(polyent_measure_qubits(m), 3);
        assert_eq!(polyent_entangle(m, s, &mut v), PolyentStatus::Ok);
        polyent_state_free(s);
        polyent_measure_free(m);
    }
    assert!((v - 1.0).abs() < 1e-14);
}

#[test]
fn oracle_bounds_the_roof() {
    let m = measure("concurrence");
    let s = density(2, &bell_mixture(0.4));
    let mut v = 0.0;
    unsafe {
        assert_eq!(polyent_oracle(m, s, 4, 16, 1, &mut v), PolyentStatus::Ok);
        polyent_state_free(s);
        polyent_measure_free(m);
    }
    assert!((0.4 - 1e-9..0.4 + 2e-4).contains(&v), "{v}");
}

#[test]
fn ghzw_endpoints() {
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(polyent_ghzw_tangle(1.0, &mut v), PolyentStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(polyent_ghzw_tangle(0.2, &mut v), PolyentStatus::Ok);
        assert!(v.abs() < 1e-12);
        assert_eq!(
            polyent_ghzw_tangle(1.5, &mut v),
            PolyentStatus::InvalidArgument
        );
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut m = ptr::null_mut();
    let bogus = CString::new("negativity").unwrap();
    unsafe {
        assert_eq!(
            polyent_measure_new(bogus.as_ptr(), &mut m),
            PolyentStatus::InvalidArgument
        );
        assert!(m.is_null());
        assert!(last_error().contains("negativity"));

        assert_eq!(
            polyent_measure_new(ptr::null(), &mut m),
            PolyentStatus::NullPointer
        );

        let bad = CString::new("{").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(
            polyent_state_from_json(bad.as_ptr(), &mut s),
            PolyentStatus::Parse
        );

        let mut diag = vec![0.0; 16];
        for i in 0..3 {
            diag[5 * i] = 1.0 / 3.0;
        }
        let rank3 = density(2, &diag);
        let c = measure("concurrence");
        let mut roof = ptr::null_mut();
        assert_eq!(polyent_roof(c, rank3, &mut roof), PolyentStatus::Rank);
        assert!(roof.is_null());
        assert!(last_error().contains("rank"));

        let mut v = 0.0;
        assert_eq!(polyent_entangle(c, rank3, &mut v), PolyentStatus::Rank);

        polyent_state_free(rank3);
        polyent_measure_free(c);
        polyent_measure_free(ptr::null_mut());
        polyent_roof_free(ptr::null_mut());
        assert!(polyent_roof_value(ptr::null()).is_nan());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/polyent.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing");
    }
    let version = unsafe { CStr::from_ptr(polyent_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
