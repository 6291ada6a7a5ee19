mod common;

use common::{expm, model};
use proptest::prelude::*;
use wilczynski::frame::{
    self, integrate_frame, integrate_segment, path_independence_residual, Axis,
};
use wilczynski::{Error, Mat4, Rect};

#[test]
fn lift_satisfies_canonical_system() {
    let m = model("non-minimal", "1", "1", "x", "y", Rect::unit(), 17);
    let field = integrate_frame(&m, &Mat4::identity()).unwrap();
    let h = 1e-3;
    for &(i, j) in &[(4, 4), (8, 11), (12, 6)] {
        let (x, y) = m.spec().node(i, j);
        let f = field.at(i, j);
        let lift = |axis, d: f64| {
            integrate_segment(&m, f, (x, y), axis, d, 8)
                .unwrap()
                .m
                .map(|r| r[0])
        };
        let at = |axis, d| lift(axis, d);
        let (fxp, fxm, fyp, fym) = (
            at(Axis::X, h),
            at(Axis::X, -h),
            at(Axis::Y, h),
            at(Axis::Y, -h),
        );
        let f0 = f.m.map(|r| r[0]);
        for r in 0..4 {
            let fxx = (fxp[r] - 2.0 * f0[r] + fxm[r]) / (h * h);
            let fyy = (fyp[r] - 2.0 * f0[r] + fym[r]) / (h * h);
            let fx = (fxp[r] - fxm[r]) / (2.0 * h);
            let fy = (fyp[r] - fym[r]) / (2.0 * h);
            assert!((fxx - fy - x * f0[r]).abs() < 1e-5, "f_xx at ({x}, {y})");
            assert!((fyy - fx - y * f0[r]).abs() < 1e-5, "f_yy at ({x}, {y})");
        }
    }
}

#[test]
fn determinant_is_preserved() {
    let m = model("coincidence", "1", "1", "1", "2", Rect::unit(), 33);
    let field = integrate_frame(&m, &Mat4::identity()).unwrap();
    assert!(field.max_det_drift <= 1e-9, "{}", field.max_det_drift);
    for f in &field.frames {
        assert!((f.determinant() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn non_unimodular_initial_frame_is_rejected() {
    let m = model("trivial", "1", "1", "0", "0", Rect::unit(), 5);
    assert!(matches!(
        integrate_frame(&m, &Mat4::identity().scale(2.0)),
        Err(Error::NonUnimodular { .. })
    ));
}

#[test]
fn invalid_surface_is_path_dependent() {
    let m = model("broken", "1", "1", "x", "0", Rect::unit(), 5);
    let coarse = path_independence_residual(&m, Rect::unit(), 16).unwrap();
    let fine = path_independence_residual(&m, Rect::unit(), 64).unwrap();
    assert!(
        fine > 0.1 && (coarse - fine).abs() < 0.01 * fine,
        "{coarse} {fine}"
    );
}

#[test]
fn segments_compose() {
    let m = model("curved", "1", "1", "2*x", "2*y", Rect::unit(), 5);
    let one = integrate_segment(&m, &Mat4::identity(), (0.1, 0.2), Axis::Y, 0.6, 48).unwrap();
    let a = integrate_segment(&m, &Mat4::identity(), (0.1, 0.2), Axis::Y, 0.3, 24).unwrap();
    let two = integrate_segment(&m, &a, (0.1, 0.5), Axis::Y, 0.3, 24).unwrap();
    assert!((one - two).max_abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_coefficients_follow_the_exponential(
        b in 0.5..2.0f64, c in 0.5..2.0f64, p in -1.0..1.0f64, q in -1.0..1.0f64, t in 0.0..0.5f64,
    ) {
        let m = model("constant", &b.to_string(), &c.to_string(), &p.to_string(), &q.to_string(), Rect::unit(), 5);
        let pair = frame::connection_at(&m, 0.0, 0.0).unwrap();
        let f = integrate_segment(&m, &Mat4::identity(), (0.0, 0.0), Axis::X, t, 256).unwrap();
        prop_assert!((f - expm(&pair.u.scale(t))).max_abs() < 1e-10);
        let g = integrate_segment(&m, &Mat4::identity(), (0.0, 0.0), Axis::Y, t, 256).unwrap();
        prop_assert!((g - expm(&pair.v.scale(t))).max_abs() < 1e-10);
    }
}
