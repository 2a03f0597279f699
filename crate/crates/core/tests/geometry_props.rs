use std::f64::consts::PI;

use polyext::geometry::{
    ball_mobius, circle_from_hyperbolic, ct_circle, hyperbolic_center, mobius, CircleKind, ComplexLine,
    HyperbolicCircle, Point2, C64,
};
use proptest::prelude::*;

fn disc_point(max: f64) -> impl Strategy<Value = C64> {
    (0.0..max, 0.0..2.0 * PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn c2_point(scale: f64) -> impl Strategy<Value = Point2> {
    prop::array::uniform4(-scale..scale).prop_map(|v| Point2::new(C64::new(v[0], v[1]), C64::new(v[2], v[3])))
}

fn ball_point(max: f64) -> impl Strategy<Value = Point2> {
    c2_point(1.0).prop_filter_map("outside the ball", move |p| {
        let n = p.norm();
        (n < max).then_some(p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mobius_is_an_involution(alpha in disc_point(0.95), z in disc_point(1.0)) {
        let back = mobius(alpha, mobius(alpha, z).unwrap()).unwrap();
        prop_assert!((back - z).norm() < 1e-12);
    }

    #[test]
    fn hyperbolic_round_trip(alpha in disc_point(0.9), r in 0.05f64..0.9) {
        let h = HyperbolicCircle::new(alpha, r).unwrap();
        let c = circle_from_hyperbolic(&h);
        prop_assert_eq!(c.kind(), CircleKind::Interior);
        let h2 = hyperbolic_center(&c).unwrap();
        let c2 = circle_from_hyperbolic(&h2);
        prop_assert!((c2.center - c.center).norm() < 1e-9);
        prop_assert!((c2.radius - c.radius).abs() < 1e-9);
    }

    #[test]
    fn circle_points_are_mobius_images(alpha in disc_point(0.9), r in 0.05f64..0.9, theta in 0.0..2.0 * PI) {
        let c = circle_from_hyperbolic(&HyperbolicCircle::new(alpha, r).unwrap());
        // M_α is an involution, so a point q of the circle is M_α(R e^{iθ})
        // exactly when |M_α(q)| = R
        let q = c.point(theta);
        prop_assert!((mobius(alpha, q).unwrap().norm() - r).abs() < 1e-10);
    }

    #[test]
    fn ct_circles_have_hyperbolic_center_t(t in 0.05f64..0.95, frac in 0.01f64..0.99) {
        let big_t = t * frac;
        let c = ct_circle(t, big_t).unwrap();
        prop_assert!(matches!(c.kind(), CircleKind::Interior | CircleKind::TangentInternal));
        if c.kind() == CircleKind::Interior {
            let h = hyperbolic_center(&c).unwrap();
            prop_assert!((h.alpha - t).norm() < 1e-8, "{} vs {t}", h.alpha);
        }
    }

    #[test]
    fn ball_disc_boundary_is_on_the_sphere(base in ball_point(0.95), dir in c2_point(1.0), theta in 0.0..2.0 * PI) {
        prop_assume!(dir.norm() > 1e-3);
        let l = ComplexLine::new(base, dir).unwrap();
        let d = l.ball_disc().unwrap();
        prop_assert!((l.at(d.boundary_param(theta)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_mobius_preserves_lines(
        a in ball_point(0.9),
        base in ball_point(0.6),
        dir in c2_point(1.0),
        s in prop::array::uniform3((-0.3f64..0.3, -0.3f64..0.3)),
    ) {
        prop_assume!(dir.norm() > 1e-2);
        let l = ComplexLine::new(base, dir).unwrap();
        let pts: Vec<Point2> = s.iter().map(|(x, y)| l.at(C64::new(*x, *y))).collect();
        prop_assume!(pts.iter().all(|p| p.norm() < 1.0));
        let img: Vec<Point2> = pts.iter().map(|p| ball_mobius(a, *p).unwrap()).collect();
        let u = img[1] - img[0];
        let v = img[2] - img[0];
        prop_assume!(u.norm() > 1e-6 && v.norm() > 1e-6);
        let det = (u.z * v.w - u.w * v.z).norm() / (u.norm() * v.norm());
        prop_assert!(det < 1e-9, "rank test {det}");
    }

    #[test]
    fn lines_equal_iff_same_points(base in ball_point(0.9), dir in c2_point(1.0), sigma in disc_point(2.0), tau in 0.0..2.0 * PI) {
        prop_assume!(dir.norm() > 1e-2);
        let l = ComplexLine::new(base, dir).unwrap();
        let m = ComplexLine::new(l.at(sigma), dir * C64::from_polar(1.0, tau)).unwrap();
        prop_assert!(l.same_as(&m));
        prop_assert!((l.direction.norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn mobius_at_boundary_anchor_is_rejected() {
    assert!(mobius(C64::new(1.0, 0.0), C64::new(0.2, 0.0)).is_err());
    assert!(ct_circle(0.5, 0.6).is_err());
}
