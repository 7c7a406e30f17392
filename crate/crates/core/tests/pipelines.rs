use yamabe_core::asymptotics::{completeness_integral, End, Verdict};
use yamabe_core::dynsys::{curve_eval, s2_domain_start, trap_signed_distance, AnalysisCurve, CurveId, VectorFieldId};
use yamabe_core::integrate::{first_return_z, integrate, Direction, FirstReturn, StopSpec, Terminal};
use yamabe_core::solitons::*;
use yamabe_core::{PhasePoint, Regime, SolitonParams};

fn shrink(n: u32, lambda: f64) -> SolitonParams {
    SolitonParams::shrinking(n, lambda).unwrap()
}

#[test]
fn gamma_n6_is_complete() {
    let p = shrink(6, 1.0);
    let c = find_shrinker_gamma(&p, &ShrinkerOptions::default()).unwrap();
    assert_eq!(c.verdict, CertificateVerdict::CompleteNonProduct);
    let z0 = c.crossings[0];
    assert!(z0 > 0.0 && z0 < 1.0);
    let tail = &c.completeness[0];
    assert_eq!(tail.verdict, Verdict::Diverges);
    assert!((tail.exponent.unwrap() + 0.75).abs() <= 0.05);
    let prof = c.profile.as_ref().unwrap();
    assert!(prof.grid.iter().all(|g| g.phi > 0.0));
    assert!(prof.scalar_curvature.iter().all(|&r| r > 0.0));
    assert!(c.residual_max.unwrap() <= 1e-6);
    // r = 0 at the crossing; phi levels off toward (xi, 0)
    let i0 = prof.grid.iter().position(|g| g.r >= 0.0).unwrap();
    assert!(prof.grid[i0].phi_prime.abs() < 1e-2);
    let last = prof.grid.last().unwrap();
    assert!((last.phi - 40f64.powf(0.25)).abs() < 1e-5);
    assert!(prof.potential.windows(2).all(|f| f[1] > f[0]));
}

#[test]
fn gamma_node_and_other_dimensions() {
    let node = find_shrinker_gamma(&shrink(6, 3.0), &ShrinkerOptions::default()).unwrap();
    assert_eq!(node.verdict, CertificateVerdict::CompleteNonProduct);
    assert!(node.crossings.len() <= 1);
    assert!(matches!(node.profile.as_ref().unwrap().r_origin, Anchor::CriticalBall { .. }));
    for n in [5, 8] {
        let c = find_shrinker_gamma(&shrink(n, 1.0), &ShrinkerOptions::default()).unwrap();
        assert_eq!(c.verdict, CertificateVerdict::CompleteNonProduct, "n={n}");
        assert!(c.crossings.windows(2).all(|z| z[1] > z[0]));
    }
}

#[test]
fn gamma_at_the_threshold_meets_the_origin() {
    let p = shrink(6, 0.5);
    let c = find_shrinker_gamma(&p, &ShrinkerOptions::default()).unwrap();
    assert_eq!(c.verdict, CertificateVerdict::NoCompleteNonProduct);
    assert!(!c.phi_positive);
    let t = &c.trajectories[0];
    for s in &t.samples {
        let [z, w] = s.state;
        if (1.0..=1e4).contains(&z) {
            assert!((w + z.sqrt()).abs() <= 1e-3 * z.sqrt(), "z={z} w={w}");
        }
    }
}

#[test]
fn below_threshold_is_never_complete() {
    let c = find_shrinker_gamma(&shrink(6, 0.45), &ShrinkerOptions::default()).unwrap();
    assert_ne!(c.verdict, CertificateVerdict::CompleteNonProduct);
}

#[test]
fn wrong_regime_and_bad_seed() {
    let s = SolitonParams::steady(6).unwrap();
    assert!(find_shrinker_gamma(&s, &ShrinkerOptions::default()).is_err());
    let p = shrink(6, 1.0);
    let o = ShrinkerOptions { z_seed: Some(2.0), ..ShrinkerOptions::default() };
    assert!(matches!(find_shrinker_gamma(&p, &o), Err(yamabe_core::Error::SeedRejected { .. })));
}

#[test]
fn perturbed_seeds_leave_the_corridor() {
    let p = shrink(6, 1.0);
    let o = ShrinkerOptions::default();
    for d in [1e-6, -1e-6] {
        let out = uniqueness_probe(&p, &o, d, 1e4).unwrap();
        assert!(out.exit.is_some(), "delta {d}");
    }
    let pts = tail_separation(&p, &o, 1e3, 1e4, 1e-7, 8.0).unwrap();
    let slope = separation_slope(&pts);
    assert!((0.8..=1.2).contains(&slope), "{slope}");
}

#[test]
fn steady_sweeps() {
    for n in [5, 6, 8] {
        let p = SolitonParams::steady(n).unwrap();
        let spec = SweepSpec { nz: 5, nw: 5, ..SweepSpec::default() };
        let c = certify_steady_nonexistence(&p, &spec).unwrap();
        assert_eq!(c.verdict, CertificateVerdict::NoCompleteNonProduct, "n={n}: {:?}", c.notes);
        assert!(c.sweep.iter().all(|e| e.case != SteadyCase::Unclassified));
        if n == 5 {
            assert!(c.sweep.iter().all(|e| !e.vertical_asymptote));
        }
    }
    let shrinking = shrink(6, 1.0);
    assert!(certify_steady_nonexistence(&shrinking, &SweepSpec::default()).is_err());
}

#[test]
fn steady_line_w_one() {
    let p = SolitonParams::steady(6).unwrap();
    let stop = StopSpec::default().with_span(50.0);
    let fwd = integrate(VectorFieldId::ZW, &p, [1.0, 1.0], Direction::Forward, &stop).unwrap();
    assert!(fwd.samples.iter().all(|s| (s.state[1] - 1.0).abs() <= 1e-8));
    let bwd = integrate(VectorFieldId::ZW, &p, [1.0, 1.0], Direction::Backward, &StopSpec::default()).unwrap();
    assert_eq!(bwd.head, Terminal::HitBoundary);
    let v = completeness_integral(&bwd, &p, End::TowardSmallEnd).unwrap();
    assert_eq!(v.verdict, Verdict::Converges);
}

#[test]
fn trap_is_invariant_toward_large_z() {
    for n in [5, 6, 8] {
        let p = shrink(n, 1.0);
        let start = s2_domain_start(&p).unwrap();
        let stop = StopSpec { escape_radius: 1e5, ..StopSpec::default() }.with_events(&[]);
        for (k, id) in [CurveId::S2a, CurveId::S2b].iter().enumerate() {
            let c = AnalysisCurve::new(*id, &p).unwrap();
            for i in 0..10 {
                let z = start * 10f64.powf(0.2 + 0.3 * i as f64);
                let w = curve_eval(&c, &p, z).unwrap();
                let t = integrate(VectorFieldId::ZW, &p, [z, w], Direction::Backward, &stop).unwrap();
                assert_eq!(t.head, Terminal::Escaped, "n={n} curve {k} z={z}");
                for s in &t.samples {
                    let d = trap_signed_distance(&p, PhasePoint::new(s.state[0], s.state[1])).unwrap();
                    assert!(d >= -1e-8 * s.state[1].abs().max(1.0), "n={n} z={z}: {d}");
                }
            }
        }
    }
}

#[test]
fn return_map_increases() {
    let p = shrink(6, 1.0);
    for i in 1..=10 {
        let z0 = p.xi() * i as f64 / 11.0;
        match first_return_z(&p, z0).unwrap() {
            FirstReturn::Crossing(zb) => assert!(zb > z0 && zb < p.xi()),
            FirstReturn::Converged => {}
        }
    }
}

#[test]
fn rotational_solitons() {
    let s =
        find_rotational(&SolitonParams::rotational(3, Regime::Steady).unwrap(), &RotationalOptions::default()).unwrap();
    assert_eq!(s.verdict, CertificateVerdict::CompleteNonProduct);
    assert!(s.completeness[1].exponent.unwrap() >= -1.0);
    let prof = s.profile.as_ref().unwrap();
    // phi(0) = 0 with unit slope at the anchor
    assert!((prof.grid[0].phi - prof.grid[0].r).abs() < 1e-3 * prof.grid[0].r);

    let k = find_rotational(&SolitonParams::rotational(6, Regime::Shrinking).unwrap(), &RotationalOptions::default())
        .unwrap();
    assert_eq!(k.verdict, CertificateVerdict::CompleteNonProduct);
    assert_eq!(k.trajectories[0].terminal, Terminal::ConvergedToCriticalPoint);

    let rest = RotationalOptions { x_seed: Some(0.0), ..RotationalOptions::default() };
    let p = SolitonParams::rotational(3, Regime::Steady).unwrap();
    assert!(matches!(find_rotational(&p, &rest), Err(yamabe_core::Error::ClassificationFailed(_))));
}

#[test]
fn residual_detects_corruption() {
    let p = shrink(6, 1.0);
    let c = find_shrinker_gamma(&p, &ShrinkerOptions::default()).unwrap();
    let mut prof = c.profile.unwrap();
    assert!(profile_residual(&prof, &p) <= 1e-6);
    let mid = prof.grid.len() / 2;
    prof.grid[mid].phi_prime += 1e-3;
    assert!(profile_residual(&prof, &p) > 1e-3);
    assert!(profile_residual(&product_profile(&p, 5.0, 20).unwrap(), &p) <= 1e-12);
}
