mod common;

use common::{random_params, random_quadrant_point, rng};
use proptest::prelude::*;
use saddle_core::weier::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

prop_compose! {
    fn params()(seed in any::<u64>()) -> SurfaceParams {
        random_params(&mut rng(seed))
    }
}

prop_compose! {
    fn quadrant_point()(r in -1.5f64..1.5, th in 0.02f64..1.55) -> C64 {
        C64::from_polar(10f64.powf(r), th)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn w_squares_to_the_curve(p in params(), z in quadrant_point()) {
        let cp = CurvePoint::upper(&p, z);
        prop_assert!(cp.residual(&p) < 1e-12);
    }

    #[test]
    fn continuation_is_path_independent(p in params(), z in quadrant_point()) {
        let high = c(0.3 * z.re, 2.0 * z.im + 1.0);
        let low = c(2.0 * z.re + 1.5, 0.5 * z.im);
        let w1 = w_eval(&p, z, &[high], None).unwrap().w;
        let w2 = w_eval(&p, z, &[low], None).unwrap().w;
        prop_assert!((w1 - w2).norm() < 1e-10 * w1.norm());
        prop_assert!((w1 - w_upper(&p, z)).norm() < 1e-10 * w1.norm());
    }

    #[test]
    fn quartic_identity(p in params(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let z = c(re, im);
        let (b, x, y, xx) = (p.b, p.x, p.y, p.big_x);
        let lhs = (z - b) * (z + x) * (z - y) * (z + xx) * (z + xx)
            + (z + b) * (z - x) * (z + y) * (z - xx) * (z - xx);
        let s = sym_funcs(&p);
        let rhs = 2.0 * z * s.quartic(z * z);
        let scale = 2.0 * (z.norm() + b) * (z.norm() + x) * (z.norm() + y) * (z.norm() + xx).powi(2);
        prop_assert!((lhs - rhs).norm() < 1e-12 * scale);
    }

    #[test]
    fn odd_part_identity(p in params(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        // The companion expansion: the difference of the two products is
        // 2(S₁z⁴ + S₃z² + S₅) up to sign.
        let z = c(re, im);
        let (b, x, y, xx) = (p.b, p.x, p.y, p.big_x);
        let lhs = (z - b) * (z + x) * (z - y) * (z + xx) * (z + xx)
            - (z + b) * (z - x) * (z + y) * (z - xx) * (z - xx);
        let s = sym_funcs(&p);
        let rhs = 2.0 * s.even_part(z * z);
        let scale = 2.0 * (z.norm() + b) * (z.norm() + x) * (z.norm() + y) * (z.norm() + xx).powi(2);
        prop_assert!((lhs - rhs).norm() < 1e-12 * scale);
    }

    #[test]
    fn degenerate_coefficients(a in 0.05f64..0.99, b in 1.01f64..4.0) {
        let s = SymFuncs::from_moduli(b, a, a, 1.0);
        let one = 1.0 + s.s2 + s.s4;
        let at_a = a.powi(4) + s.s2 * a * a + s.s4;
        prop_assert!((one - (b + 1.0) * (1.0 - a).powi(3)).abs() < 1e-12 * (1.0 + b));
        prop_assert!((at_a - 4.0 * a * a * (1.0 - a) * (b - a)).abs() < 1e-12 * (1.0 + b));
    }

    #[test]
    fn vertical_normal_roots_are_quartic_zeros(p in params()) {
        let s = sym_funcs(&p);
        let vn = vertical_normal_points(&s);
        for r in vn.roots {
            let scale = 1.0 + s.s2.abs() + s.s4.abs();
            prop_assert!(s.quartic(r * r).norm() < 1e-10 * scale);
        }
        prop_assert_eq!(vn.off_axis, s.s2 * s.s2 < 4.0 * s.s4);
    }

    #[test]
    fn rotated_forms(p in params(), z in quadrant_point()) {
        let s = sym_funcs(&p);
        let cp = CurvePoint::upper(&p, z);
        if let Ok(rd) = rotated_data(&p, &s, &cp) {
            let g = g_eval(&p, &cp).unwrap();
            let dh = dh_eval(&p, &s, &cp).unwrap();
            let gg = rd.big_g;
            let lhs1 = (1.0 / gg - gg) * rd.dh_big;
            let rhs1 = (1.0 / g - g) * dh;
            let lhs2 = C64::i() * (1.0 / gg + gg) * rd.dh_big;
            let scale = (g.norm() + 1.0 / g.norm()) * dh.norm();
            prop_assert!((lhs1 - rhs1).norm() < 1e-10 * scale);
            prop_assert!((lhs2 + 2.0 * dh).norm() < 1e-10 * scale);
            prop_assert!(rd.closed_form_rel_err() < 1e-10);
        }
    }

    #[test]
    fn gauss_map_obeys_divisor_relation(p in params(), z in quadrant_point()) {
        let cp = CurvePoint::upper(&p, z);
        if let Ok(g) = g_eval(&p, &cp) {
            let lhs = cp.w * (g + C64::i()) / (g - C64::i());
            let rhs = (p.big_x + z) / (p.big_x - z);
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn phi_components_match_weierstrass_data(p in params(), z in quadrant_point()) {
        let s = sym_funcs(&p);
        let cp = CurvePoint::upper(&p, z);
        let v = phi_eval(&p, &s, &cp).unwrap();
        if let Some(g) = v.g.finite() {
            let dh = dh_eval(&p, &s, &cp).unwrap();
            let phi1 = 0.5 * (1.0 / g - g) * dh;
            let phi2 = 0.5 * C64::i() * (1.0 / g + g) * dh;
            let scale = (g.norm() + 1.0 / g.norm()) * dh.norm();
            prop_assert!((v.phi1 - phi1).norm() < 1e-10 * scale);
            prop_assert!((v.phi2 - phi2).norm() < 1e-10 * scale);
            prop_assert!((v.phi3 - dh).norm() < 1e-12 * dh.norm());
        }
    }

    #[test]
    fn invalid_orderings_are_rejected(a in 0.1f64..0.9, d in 0.001f64..0.09) {
        prop_assert!(SurfaceParams::new(a, 1.5, a + d, a, 1.2).is_err());
        prop_assert!(SurfaceParams::new(a, 1.5, a - d, a - d / 2.0, 1.2).is_err());
        prop_assert!(SurfaceParams::new(a, 1.1, a - d, a, 1.2).is_err());
        prop_assert!(SurfaceParams::new(a, 1.5, a - d, a, 0.99).is_err());
    }
}

#[test]
fn symmetry_table_on_random_parameters() {
    let mut r = rng(11);
    for _ in 0..20 {
        let p = random_params(&mut r);
        let s = sym_funcs(&p);
        for t in [0.3 * p.x, 0.8 * p.x] {
            let cp = CurvePoint::upper(&p, c(t, 0.0));
            let g = g_eval(&p, &cp).unwrap();
            let dh = dh_eval(&p, &s, &cp).unwrap();
            assert!(g.re.abs() < 1e-12 * g.norm() && g.im > 0.0, "LF g={g}");
            assert!(dh.im.abs() < 1e-12 * dh.norm() && dh.re > 0.0, "LF dh={dh}");
        }
        let t = 0.5 * (p.x + p.a);
        let cp = CurvePoint::upper(&p, c(t, 0.0));
        assert!((g_eval(&p, &cp).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(dh_eval(&p, &s, &cp).unwrap().re.abs() < 1e-12);
        let t = 0.5 * (p.y + p.b);
        let cp = CurvePoint::upper(&p, c(t, 0.0));
        let g = g_eval(&p, &cp).unwrap();
        let dh = dh_eval(&p, &s, &cp).unwrap();
        assert!(g.re.abs() < 1e-12 * g.norm() && g.im < 0.0, "CB g={g}");
        assert!(dh.im.abs() < 1e-12 * dh.norm() && dh.re < 0.0, "CB dh={dh}");
        for t in [0.1, 1.0, 10.0] {
            let g = g_eval(&p, &CurvePoint::upper(&p, c(0.0, t))).unwrap();
            assert!(g.im.abs() < 1e-12 * g.norm() && g.re > 0.0, "AL g={g}");
        }
    }
}

#[test]
fn anchor_and_end_values() {
    let mut r = rng(3);
    let p = random_params(&mut r);
    let s = sym_funcs(&p);
    let origin = CurvePoint::upper(&p, c(0.0, 0.0));
    assert_eq!(origin.w, c(1.0, 0.0));
    assert!(matches!(
        g_eval(&p, &origin),
        Err(WeierError::GaussMapPole { .. })
    ));
    let far = CurvePoint::upper(&p, c(0.0, 1e8));
    assert!((g_eval(&p, &far).unwrap() - 1.0).norm() < 1e-7);
    for e in [1.0, p.a] {
        let cp = CurvePoint { z: c(e, 0.0), w: c(1.0, 0.0) };
        assert!(matches!(dh_eval(&p, &s, &cp), Err(WeierError::PoleAtEnd { .. })));
    }
    let z = random_quadrant_point(&mut r);
    assert!(w_eval(&p, z, &[c(p.x, 0.0)], None).is_err());
}

#[test]
fn rotated_dh_vanishes_at_big_x() {
    let p = SurfaceParams::new(0.7, 1.6, 0.65, 0.74, 1.2).unwrap();
    assert!(dh_big_closed(&p, c(p.big_x, 0.0)).norm() < 1e-15);
}
