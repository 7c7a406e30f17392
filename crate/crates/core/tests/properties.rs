use proptest::prelude::*;

use yamabe_core::dynsys::{
    critical_points, curve_eval, eigenvalues, jacobian, rhs, s2_domain_start, AnalysisCurve, CurveId, VectorFieldId,
};
use yamabe_core::params::{make_params, phi_fn, xy_from_zw, zw_from_xy};
use yamabe_core::{PhasePoint, Regime, SolitonParams};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn xy_zw_round_trip(n in 3u32..=12, lx in -3.0f64..3.0, y in -50.0f64..50.0) {
        let p = SolitonParams::shrinking(n, 1.0).unwrap();
        let x = 10f64.powf(lx);
        let q = zw_from_xy(&p, x, y).unwrap();
        let c = xy_from_zw(&p, q).unwrap();
        prop_assert!(rel(c.first, x) <= 1e-12);
        prop_assert!((c.second - y).abs() <= 1e-12 * y.abs().max(1e-3));
    }
}

proptest! {
    #[test]
    fn jacobian_matches_differences(n in 3u32..=12, lambda in 0.3f64..4.0, z in 0.1f64..20.0, w in -5.0f64..5.0) {
        let p = SolitonParams::shrinking(n, lambda).unwrap();
        prop_assume!(w.abs() > 1e-3);
        let j = jacobian(VectorFieldId::ZW, &p, [z, w]).unwrap();
        let h = 1e-6;
        for (k, e) in [[h, 0.0], [0.0, h]].iter().enumerate() {
            let a = rhs(VectorFieldId::ZW, &p, [z + e[0], w + e[1]]).unwrap();
            let b = rhs(VectorFieldId::ZW, &p, [z - e[0], w - e[1]]).unwrap();
            for i in 0..2 {
                let fd = (a[i] - b[i]) / (2.0 * h);
                prop_assert!((fd - j[i][k]).abs() <= 1e-5 * j[i][k].abs().max(1.0), "entry {i}{k}: {fd} vs {}", j[i][k]);
            }
        }
    }

    #[test]
    fn eigen_sum_and_product(n in 3u32..=12, lambda in 0.05f64..10.0) {
        let p = SolitonParams::shrinking(n, lambda).unwrap();
        let cp = &critical_points(VectorFieldId::ZW, &p)[0];
        let ev = eigenvalues(&cp.jacobian);
        let nf = n as f64;
        let sum = ev[0].re + ev[1].re;
        let prod = (ev[0].re * ev[1].re - ev[0].im * ev[1].im, ev[0].re * ev[1].im + ev[0].im * ev[1].re);
        prop_assert!((sum + 1.0).abs() <= 1e-12);
        prop_assert!((prod.0 - 4.0 / ((nf + 2.0) * lambda)).abs() <= 1e-12);
        prop_assert!(prod.1.abs() <= 1e-12);
    }

    #[test]
    fn phi_vanishes_at_xi(n in 3u32..=12, lambda in 0.05f64..10.0) {
        let p = SolitonParams::shrinking(n, lambda).unwrap();
        let v = phi_fn(&p, p.xi()).unwrap();
        prop_assert!(v.abs() <= 1e-12 * p.xi().max(1.0));
        prop_assert!(rhs(VectorFieldId::ZW, &p, [p.xi(), 0.0]).unwrap().iter().all(|c| c.abs() <= 1e-12 * p.xi().max(1.0)));
    }

    #[test]
    fn threshold_forms_agree(n in 3u32..=12, lrbar in -3.0f64..3.0) {
        let p = make_params(n, Regime::Shrinking, 10f64.powf(lrbar)).unwrap();
        let nf = n as f64;
        prop_assume!(((nf + 2.0) * p.lambda() - (nf - 2.0)).abs() > 1e-9);
        prop_assert_eq!(p.above_threshold(), p.above_threshold_rbar());
        prop_assert_eq!(p.above_threshold(), p.lambda() > (nf - 2.0) / (nf + 2.0));
    }

    #[test]
    fn s2_branches_are_ordered(n in 3u32..=12, lambda in 0.6f64..4.0, t in 0.0f64..4.0) {
        let p = SolitonParams::shrinking(n, lambda).unwrap();
        let start = s2_domain_start(&p).unwrap();
        let z = start * 10f64.powf(t);
        let f1 = curve_eval(&AnalysisCurve::new(CurveId::S2a, &p).unwrap(), &p, z).unwrap();
        let f2 = curve_eval(&AnalysisCurve::new(CurveId::S2b, &p).unwrap(), &p, z).unwrap();
        let s1 = curve_eval(&AnalysisCurve::new(CurveId::S1, &p).unwrap(), &p, z).unwrap();
        prop_assert!(f2 <= f1 + 1e-12 * f1.abs());
        prop_assert!(f1 <= s1 + 1e-12 * s1.abs());
        prop_assert!(f2 < 0.0 && f1 < 0.0);
    }

    #[test]
    fn s2_branches_meet_at_z_alpha(n in prop::sample::select(vec![3u32, 4, 5, 7, 8, 9, 10]), lambda in 0.8f64..1.2) {
        let p = SolitonParams::shrinking(n, lambda).unwrap();
        let za = yamabe_core::dynsys::z_alpha(&p).unwrap();
        prop_assume!(za > p.xi());
        let a = AnalysisCurve::new(CurveId::S2a, &p).unwrap();
        let b = AnalysisCurve::new(CurveId::S2b, &p).unwrap();
        let f1 = curve_eval(&a, &p, za).unwrap();
        let f2 = curve_eval(&b, &p, za).unwrap();
        prop_assert!((f1 - f2).abs() <= 1e-5 * f1.abs());
    }

    #[test]
    fn curvature_identity(n in 3u32..=12, lambda in 0.3f64..4.0, z in 0.01f64..100.0, w in -10.0f64..10.0) {
        let p = SolitonParams::shrinking(n, lambda).unwrap();
        let q = PhasePoint::new(z, w);
        let r = yamabe_core::params::scalar_curvature(&p, q).unwrap();
        let e = (n as f64 - 2.0) / (n as f64 + 2.0);
        let expect = p.rho() * (1.0 + w * z.powf(-e));
        prop_assert!((r - expect).abs() <= 1e-12 * expect.abs().max(p.rho()));
    }
}
