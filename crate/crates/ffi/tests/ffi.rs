use std::ffi::{c_char, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gconv_risk_ffi::*;

const UNIFORM_MAX: &str = r#"{"algebra":{"kind":"max"},"claims":{"family":"uniform","high":1},"premiums":{"family":"uniform","high":2}}"#;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    let n = unsafe { gcr_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(511)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn model(json: &str) -> *mut GcrModel {
    let text = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { gcr_model_from_json(text.as_ptr(), &mut m) }, GcrStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn closed_form_ruin_through_the_c_abi() {
    let m = model(UNIFORM_MAX);
    let mut r = GcrRuinResult {
        u: 0.0,
        survival: 0.0,
        ruin: 0.0,
        ci_low: 0.0,
        ci_high: 0.0,
        method: GcrMethod::Auto,
    };
    let status = unsafe { gcr_ruin(m, 0.5, GcrMethod::Auto, ptr::null(), &mut r) };
    assert_eq!(status, GcrStatus::Ok);
    assert_eq!(r.method, GcrMethod::ClosedForm);
    assert!((r.survival - 0.75593).abs() < 5e-6);
    assert!(r.ci_low.is_nan() && r.ci_high.is_nan());
    assert_eq!(last_error(), "");

    let opts = GcrMcOptions {
        paths: 20_000,
        horizon: 1000,
        ..gcr_mc_options_default()
    };
    let status = unsafe { gcr_ruin(m, 0.5, GcrMethod::MonteCarlo, &opts, &mut r) };
    assert_eq!(status, GcrStatus::Ok);
    assert_eq!(r.method, GcrMethod::MonteCarlo);
    assert!(r.ci_low <= 0.75593 && 0.75593 <= r.ci_high, "{r:?}");

    let status = unsafe { gcr_ruin(m, 0.5, GcrMethod::Volterra, ptr::null(), &mut r) };
    assert_eq!(status, GcrStatus::Unsupported);
    assert!(last_error().contains("volterra"));
    unsafe { gcr_model_free(m) };
}

#[test]
fn errors_map_to_status_codes() {
    let bad = CString::new(r#"{"family":"pareto2a"}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { gcr_distribution_from_json(bad.as_ptr(), &mut d) }, GcrStatus::InvalidArgument);
    assert!(d.is_null());
    assert!(last_error().contains("alpha"));

    assert_eq!(unsafe { gcr_distribution_from_json(ptr::null(), &mut d) }, GcrStatus::NullPointer);
    let invalid = [0xffu8 as c_char, 0];
    assert_eq!(unsafe { gcr_distribution_from_json(invalid.as_ptr(), &mut d) }, GcrStatus::InvalidUtf8);

    let certain = model(
        r#"{"algebra":{"kind":"alpha_stable","alpha":1},"claims":{"family":"exponential","mean":1},"premiums":{"family":"lom_alpha","gamma":1,"alpha":1},"beta":0.5}"#,
    );
    let mut r = GcrRuinResult {
        u: 0.0,
        survival: 0.0,
        ruin: 0.0,
        ci_low: 0.0,
        ci_high: 0.0,
        method: GcrMethod::Auto,
    };
    assert_eq!(unsafe { gcr_ruin(certain, 1.0, GcrMethod::Auto, ptr::null(), &mut r) }, GcrStatus::CertainRuin);
    assert_eq!(unsafe { gcr_ruin(certain, 1.0, GcrMethod::Auto, ptr::null(), ptr::null_mut()) }, GcrStatus::NullPointer);
    unsafe { gcr_model_free(certain) };
    unsafe { gcr_model_free(ptr::null_mut()) };

    let mut small = [0 as c_char; 4];
    let full = unsafe { gcr_last_error(small.as_mut_ptr(), small.len()) };
    assert!(full > 3);
    assert_eq!(small[3], 0);
}

#[test]
fn laws_walks_and_kernels() {
    let law = CString::new(r#"{"family":"uniform","high":2}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { gcr_distribution_from_json(law.as_ptr(), &mut d) }, GcrStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { gcr_distribution_cdf(d, 0.5, &mut v) }, GcrStatus::Ok);
    assert_eq!(v, 0.25);

    let mut a = vec![0.0; 64];
    let mut b = vec![0.0; 64];
    unsafe {
        assert_eq!(gcr_distribution_sample(d, 64, 9, a.as_mut_ptr()), GcrStatus::Ok);
        assert_eq!(gcr_distribution_sample(d, 64, 9, b.as_mut_ptr()), GcrStatus::Ok);
    }
    assert_eq!(a, b);
    assert!(a.iter().all(|&x| (0.0..=2.0).contains(&x)));

    let alg = CString::new(r#"{"kind":"max"}"#).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gcr_algebra_from_json(alg.as_ptr(), &mut g) }, GcrStatus::Ok);
    assert_eq!(unsafe { gcr_algebra_kernel(g, 0.5, &mut v) }, GcrStatus::Ok);
    assert_eq!(v, 1.0);
    let mut states = vec![0.0; 100];
    let status = unsafe { gcr_walk_terminal_states(g, d, 10, 1.5, 100, 3, states.as_mut_ptr()) };
    assert_eq!(status, GcrStatus::Ok);
    // A max walk from 1.5 never goes below its start.
    assert!(states.iter().all(|&x| (1.5..=2.0).contains(&x)));
    unsafe {
        gcr_algebra_free(g);
        gcr_distribution_free(d);
    }
}

#[test]
fn safety_report_fields() {
    let m = model(
        r#"{"algebra":{"kind":"kendall","alpha":1},"claims":{"family":"lom_kendall","c":1,"alpha":1},"premiums":{"family":"lom_kendall","c":1,"alpha":1},"u":2}"#,
    );
    let mut r = GcrSafetyReport {
        t: 0.0,
        margin: 0.0,
        condition_holds: false,
        premium_side: 0.0,
        claim_side: 0.0,
        closed_form_premium_side: 0.0,
        closed_form_margin: 0.0,
    };
    assert_eq!(unsafe { gcr_safety(m, 2.0, &mut r) }, GcrStatus::Ok);
    assert!(r.condition_holds);
    assert!((r.margin - 2.0).abs() < 1e-9);
    assert!((r.closed_form_premium_side - (2.0 * (-0.5f64).exp() + 3.0)).abs() < 1e-9);
    unsafe { gcr_model_free(m) };
}

#[test]
fn version_string() {
    let v = unsafe { std::ffi::CStr::from_ptr(gcr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles a small C program against the generated header and static library.
#[test]
fn c_program_links_against_the_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("gconv_risk.h").exists());
    // target/<profile>/deps/<this test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libgconv_risk_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <math.h>
#include <stdio.h>
#include "gconv_risk.h"

int main(void) {
    GcrModel *m = NULL;
    const char *json = "{\"algebra\":{\"kind\":\"max\"},\"claims\":{\"family\":\"uniform\",\"high\":1},"
                       "\"premiums\":{\"family\":\"uniform\",\"high\":2}}";
    if (gcr_model_from_json(json, &m) != GCR_STATUS_OK) return 10;
    GcrRuinResult r;
    if (gcr_ruin(m, 0.5, GCR_METHOD_CLOSED_FORM, NULL, &r) != GCR_STATUS_OK) return 11;
    gcr_model_free(m);
    if (fabs(r.survival - 0.75593) > 5e-6) return 12;
    if (gcr_model_from_json("{\"algebra\":1}", &m) != GCR_STATUS_INVALID_ARGUMENT) return 13;
    char buf[256];
    if (gcr_last_error(buf, sizeof buf) == 0) return 14;
    printf("%.5f\n", r.survival);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = work.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let compiled = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .expect("C compiler runs");
    assert!(compiled.status.success(), "{}", String::from_utf8_lossy(&compiled.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "0.75593");
}
