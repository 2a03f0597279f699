use std::f64::consts::PI;

use polyext::ball::{
    fejer_mean, line_restriction_verdict, phase_modes, vallee_poussin_mean, w_coefficient, LineConfig,
    SphereFunction,
};
use polyext::gallery::{gallery_lookup, EntryFunction};
use polyext::geometry::{ComplexLine, Point2, C64};
use proptest::prelude::*;

fn sphere_entry(name: &str) -> SphereFunction {
    match gallery_lookup(name).unwrap().function {
        EntryFunction::Sphere(f) => f,
        EntryFunction::Disc(_) => panic!("{name} is a disc entry"),
    }
}

const CONTINUOUS_SPHERE_ENTRIES: [&str; 5] =
    ["w2_over_wbar", "outside_points", "moebius_abs_w", "ck_z_quotient", "ck_multi_point"];

fn disc_point(max: f64) -> impl Strategy<Value = C64> {
    (0.0..max, 0.0..2.0 * PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn g_of(sel: usize, z: C64) -> C64 {
    match sel {
        0 => C64::new(1.0, 0.0),
        1 => z * z - 0.3,
        2 => z.conj() + z.norm_sqr(),
        _ => (z * 0.7).exp(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w_coefficient_picks_single_modes(k in 0i32..=4, sel in 0usize..4, z in disc_point(0.95)) {
        let f = SphereFunction::new("w^k g", move |p: Point2| p.w.powi(k) * g_of(sel, p.z));
        for n in -4i64..=4 {
            let c = w_coefficient(&f, n, z, 64).unwrap();
            let want = if n == k as i64 { g_of(sel, z) } else { C64::new(0.0, 0.0) };
            prop_assert!((c - want).norm() < 1e-10, "n = {n}: {c} vs {want}");
        }
    }

    #[test]
    fn w_coefficient_is_linear(z in disc_point(0.9), n in -3i64..=3, a in disc_point(2.0)) {
        let f = SphereFunction::new("f", |p: Point2| p.w * p.w * p.z.conj() + p.w.conj());
        let g = SphereFunction::new("g", |p: Point2| C64::new(p.w.norm_sqr(), 0.0) * p.z + p.w);
        let h = SphereFunction::new("f + a g", move |p: Point2| {
            p.w * p.w * p.z.conj() + p.w.conj() + a * (C64::new(p.w.norm_sqr(), 0.0) * p.z + p.w)
        });
        let lhs = w_coefficient(&h, n, z, 64).unwrap();
        let rhs = w_coefficient(&f, n, z, 64).unwrap() + a * w_coefficient(&g, n, z, 64).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn reparametrized_lines_give_identical_verdicts(
        raw in prop::array::uniform4(-0.5f64..0.5),
        dir in prop::array::uniform4(-1.0f64..1.0),
        sigma in disc_point(0.5),
        tau in 0.0..2.0 * PI,
        which in 0usize..3,
    ) {
        let base = Point2::new(C64::new(raw[0], raw[1]), C64::new(raw[2], raw[3]));
        let d = Point2::new(C64::new(dir[0], dir[1]), C64::new(dir[2], dir[3]));
        prop_assume!(d.norm() > 0.1);
        let f = match which {
            0 => SphereFunction::new("poly", |p: Point2| p.z * p.z * p.w - 2.0 * p.w),
            1 => SphereFunction::new("conj z", |p: Point2| p.z.conj()),
            _ => sphere_entry("moebius_abs_w"),
        };
        let cfg = LineConfig::default();
        let l = ComplexLine::new(base, d).unwrap();
        let m = ComplexLine::new(l.at(sigma), l.direction * C64::from_polar(1.0, tau)).unwrap();
        let a = line_restriction_verdict(&f, &l, &cfg).unwrap();
        let b = line_restriction_verdict(&f, &m, &cfg).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert!((a.violation() - b.violation()).abs() < 1e-12, "{} vs {}", a.violation(), b.violation());
    }
}

#[test]
fn negative_modes_vanish_toward_the_rim() {
    for name in CONTINUOUS_SPHERE_ENTRIES {
        let f = sphere_entry(name);
        for n in -3i64..=-1 {
            for th in [0.3, 2.0, 4.1] {
                let at = |r: f64| w_coefficient(&f, n, C64::from_polar(r, th), 256).unwrap().norm();
                let (a, b) = (at(0.9), at(0.99));
                assert!(b <= a + 1e-12, "{name} n = {n}: {a} then {b}");
                assert!(b < 0.2, "{name} n = {n}: {b}");
            }
        }
    }
}

/// Max deviation from `f` on the fiber circle over `z` for both means.
fn mean_errors(f: &SphereFunction, z: C64, n: usize) -> (f64, f64) {
    let s = (1.0 - z.norm_sqr()).sqrt();
    let modes = phase_modes(f, z, 256).unwrap();
    let mut fejer: f64 = 0.0;
    let mut vp: f64 = 0.0;
    for k in 0..41 {
        let th = 0.153 * k as f64;
        let v = f.eval(Point2::new(z, C64::from_polar(s, th)));
        fejer = fejer.max((fejer_mean(&modes, n, th) - v).norm());
        vp = vp.max((vallee_poussin_mean(&modes, n, th) - v).norm());
    }
    (fejer, vp)
}

#[test]
fn cesaro_means_converge_on_smooth_members() {
    let smooth = [
        sphere_entry("moebius_abs_w"),
        SphereFunction::new("poly", |p: Point2| p.w * p.w * p.z.conj() + 3.0 * p.w.conj() - p.z),
    ];
    for f in &smooth {
        for z in [C64::new(0.3, -0.2), C64::new(-0.6, 0.1), C64::new(0.0, 0.8)] {
            let (e16, _) = mean_errors(f, z, 16);
            let (e32, _) = mean_errors(f, z, 32);
            let (e64, vp64) = mean_errors(f, z, 64);
            // Fejér means converge at rate 1/N on smooth data
            assert!(e32 <= 0.55 * e16 + 1e-14 && e64 <= 0.55 * e32 + 1e-14, "{}: {e16} {e32} {e64}", f.label);
            assert!(vp64 < 1e-3, "{}: {vp64}", f.label);
        }
    }
}

#[test]
fn quotient_entries_vanish_on_their_singular_locus() {
    for name in ["w2_over_wbar", "outside_points", "ck_multi_point"] {
        let f = sphere_entry(name);
        for th in [0.0, 1.0, 2.5] {
            let v = f.eval(Point2::new(C64::from_polar(1.0, th), C64::new(0.0, 0.0)));
            assert_eq!(v, C64::new(0.0, 0.0), "{name}");
        }
    }
    // the z quotient is singular on the preimage of z = 0, the line z = 1/2
    let f = sphere_entry("ck_z_quotient");
    let p = Point2::new(C64::new(0.5, 0.0), C64::new(0.75f64.sqrt(), 0.0));
    assert_eq!(f.eval(p), C64::new(0.0, 0.0));
}
