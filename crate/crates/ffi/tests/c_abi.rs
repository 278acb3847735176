use std::ffi::CStr;
use std::ptr;

use lcd_reduce_ffi::*;

fn mixture(dim: usize, locs: &[f64], weights: Option<&[f64]>) -> *mut LcdMixture {
    let mut m = ptr::null_mut();
    let w = weights.map_or(ptr::null(), |w| w.as_ptr());
    let s = unsafe { lcd_mixture_new(dim, locs.len() / dim, locs.as_ptr(), w, &mut m) };
    assert_eq!(s, LcdStatus::Ok);
    m
}

fn last_error() -> String {
    let p = lcd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn handle_round_trip() {
    let m = mixture(2, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], Some(&[1.0, 1.0, 2.0]));
    unsafe {
        assert_eq!(lcd_mixture_count(m), 3);
        assert_eq!(lcd_mixture_dim(m), 2);
        let mut locs = [0.0; 6];
        assert_eq!(lcd_mixture_locations(m, locs.as_mut_ptr(), 6), LcdStatus::Ok);
        assert_eq!(locs, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let mut w = [0.0; 3];
        assert_eq!(lcd_mixture_weights(m, w.as_mut_ptr(), 3), LcdStatus::Ok);
        assert_eq!(w, [0.25, 0.25, 0.5]);
        assert_eq!(lcd_mixture_weights(m, w.as_mut_ptr(), 2), LcdStatus::BufferTooSmall);
        assert!(last_error().contains("2 values"));
        lcd_mixture_free(m);
        lcd_mixture_free(ptr::null_mut());
        assert_eq!(lcd_mixture_count(ptr::null()), 0);
    }
}

#[test]
fn invalid_input_is_reported() {
    let mut m = ptr::null_mut();
    let locs = [0.0, 1.0];
    unsafe {
        assert_eq!(
            lcd_mixture_new(1, 2, locs.as_ptr(), [1.0, -1.0].as_ptr(), &mut m),
            LcdStatus::InvalidMixture
        );
        assert!(m.is_null());
        assert!(last_error().contains("weight"));
        assert_eq!(
            lcd_mixture_new(1, 2, ptr::null(), ptr::null(), &mut m),
            LcdStatus::NullPointer
        );
        let a = mixture(1, &[0.0], None);
        let b = mixture(2, &[0.0, 0.0], None);
        let mut r = LcdDistanceReport::default();
        assert_eq!(lcd_distance_approx(a, b, 100.0, &mut r), LcdStatus::DimensionMismatch);
        assert_eq!(lcd_distance_exact(a, a, -1.0, &mut r), LcdStatus::InvalidArgument);
        // A successful call clears the message.
        assert_eq!(lcd_distance_approx(a, a, 100.0, &mut r), LcdStatus::Ok);
        assert!(lcd_last_error_message().is_null());
        lcd_mixture_free(a);
        lcd_mixture_free(b);
    }
}

#[test]
fn distances_match_the_library() {
    use lcd_reduce::distance::{distance_approx, distance_exact};
    use lcd_reduce::DiracMixture;

    let y_locs = [-1.0, 0.5, 0.0, 0.0, 1.2, -0.3];
    let x_locs = [0.1, 0.2];
    let (x, y) = (mixture(2, &x_locs, None), mixture(2, &y_locs, None));
    let xr = DiracMixture::equal_weights_flat(2, x_locs.to_vec()).unwrap();
    let yr = DiracMixture::equal_weights_flat(2, y_locs.to_vec()).unwrap();
    unsafe {
        let mut r = LcdDistanceReport::default();
        assert_eq!(lcd_distance_approx(x, y, 50.0, &mut r), LcdStatus::Ok);
        let want = distance_approx(&xr, &yr, 50.0).unwrap();
        assert_eq!((r.total, r.d_y, r.d_xy, r.d_x, r.d_e), (want.total, want.d_y, want.d_xy, want.d_x, want.d_e));
        assert_eq!((r.constant, r.is_exact), (50.0, 0));
        assert_eq!(lcd_distance_exact(x, y, 2.0, &mut r), LcdStatus::Ok);
        assert_eq!(r.total, distance_exact(&xr, &yr, 2.0).unwrap().total);
        assert_eq!((r.constant, r.is_exact), (2.0, 1));

        let mut g = [0.0; 2];
        assert_eq!(
            lcd_grad_approx(x, y, 50.0, LcdKappa::CbMinusOne, g.as_mut_ptr(), 2),
            LcdStatus::Ok
        );
        assert!(g.iter().all(|v| v.is_finite()) && g.iter().any(|v| *v != 0.0));
        lcd_mixture_free(x);
        lcd_mixture_free(y);
    }
}

#[test]
fn reduce_through_the_abi() {
    let y = lcd_reduce::mixture::sample_standard_normal(200, 2, 4).unwrap();
    let orig = mixture(2, y.locations(), None);
    let mut cfg = lcd_reduce_config_default(5);
    cfg.seed = 4;
    let mut out = ptr::null_mut();
    let mut res = LcdReduceResult {
        status: LcdOptimStatus::MaxIters,
        iterations: 0,
        distance: f64::NAN,
    };
    unsafe {
        assert_eq!(lcd_reduce(orig, &cfg, &mut out, &mut res), LcdStatus::Ok);
        assert_eq!(lcd_mixture_count(out), 5);
        assert!(res.iterations > 0 && res.distance.is_finite() && res.distance >= 0.0);
        let mut again = ptr::null_mut();
        assert_eq!(lcd_reduce(orig, &cfg, &mut again, ptr::null_mut()), LcdStatus::Ok);
        let (mut a, mut b) = ([0.0; 10], [0.0; 10]);
        lcd_mixture_locations(out, a.as_mut_ptr(), 10);
        lcd_mixture_locations(again, b.as_mut_ptr(), 10);
        assert_eq!(a, b);
        lcd_mixture_free(again);
        lcd_mixture_free(out);

        cfg.target_count = 0;
        let mut none = ptr::null_mut();
        assert_eq!(lcd_reduce(orig, &cfg, &mut none, ptr::null_mut()), LcdStatus::InvalidArgument);
        assert!(none.is_null());
        lcd_mixture_free(orig);
    }
}

/// Compiles a small C program against the generated header and static
/// library. Skipped when no C compiler is available.
#[test]
fn header_compiles_and_links() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    // CARGO_TARGET_TMPDIR is <target>/tmp; the library sits in <target>/<profile>.
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = tmp.parent().unwrap().join(profile).join("liblcd_reduce_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let src = tmp.join("abi_smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "lcd_reduce.h"
int main(void) {
    double y[] = {-1.0, 1.0};
    double x[] = {0.0};
    LcdMixture *ym = NULL, *xm = NULL;
    if (lcd_mixture_new(1, 2, y, NULL, &ym) != LCD_STATUS_OK) return 1;
    if (lcd_mixture_new(1, 1, x, NULL, &xm) != LCD_STATUS_OK) return 1;
    LcdDistanceReport r;
    if (lcd_distance_approx(xm, ym, 100.0, &r) != LCD_STATUS_OK) return 1;
    LcdMixture *bad = NULL;
    double w[] = {1.0, 0.0};
    if (lcd_mixture_new(1, 2, y, w, &bad) != LCD_STATUS_INVALID_MIXTURE) return 1;
    if (lcd_last_error_message() == NULL) return 1;
    printf("%.6f\n", r.total);
    lcd_mixture_free(xm);
    lcd_mixture_free(ym);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.join("abi_smoke");
    let status = std::process::Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    let total: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(total > 0.0);
}
