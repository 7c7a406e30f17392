//! Library results against independent computations done here by hand.

use yamabe_core::asymptotics::{
    shrink_origin_seed, shrink_tail_seed, steady_origin_seed, tail_coeffs_matched, tail_coeffs_n6,
};
use yamabe_core::dynsys::{self, critical_points, jacobian, z_alpha, Classification, VectorFieldId};
use yamabe_core::params::{phi_fn, xy_from_zw, zw_from_xy};
use yamabe_core::{PhasePoint, SolitonParams};

fn shrink(n: u32, lambda: f64) -> SolitonParams {
    SolitonParams::shrinking(n, lambda).unwrap()
}

/// `Phi'` written out from `Phi = lambda z^((n-6)/(n+2)) - z^((n-2)/(n+2))`.
fn dphi(n: u32, lambda: f64, z: f64) -> f64 {
    let nf = n as f64;
    let e1 = (nf - 6.0) / (nf + 2.0);
    let e = (nf - 2.0) / (nf + 2.0);
    lambda * e1 * z.powf(e1 - 1.0) - e * z.powf(e - 1.0)
}

/// Largest root of `4 Phi' + 1` by scanning down from far out and bisecting.
fn z_alpha_bisect(n: u32, lambda: f64) -> f64 {
    let g = |z: f64| 4.0 * dphi(n, lambda, z) + 1.0;
    let mut hi = 1e8;
    let mut lo = hi;
    while lo > 1e-8 {
        lo = hi * 0.99;
        if g(lo).signum() != g(hi).signum() {
            break;
        }
        hi = lo;
    }
    if lo <= 1e-8 {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == g(hi).signum() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn z_alpha_matches_bisection() {
    for n in [3, 4, 5, 7, 8, 10, 12] {
        for lambda in [0.8, 1.0, 2.0, 5.0] {
            let p = shrink(n, lambda);
            let lib = z_alpha(&p).unwrap();
            let hand = z_alpha_bisect(n, lambda);
            if hand == 0.0 {
                assert_eq!(lib, 0.0, "n={n} lambda={lambda}");
            } else {
                assert!((lib - hand).abs() <= 1e-9 * hand, "n={n} lambda={lambda}: {lib} vs {hand}");
            }
        }
    }
    assert!(z_alpha(&shrink(6, 1.0)).is_err());
}

/// Tail coefficients in `zeta = z^(-4/(n+2))` from
/// `Y^2 + Y^3 = lambda zeta Y^3 - e zeta Y - 4/(n+2) zeta^2 Y'`, `w = z^e / Y`:
/// the `zeta^k` coefficient is linear in `c_k` with slope one.
fn tail_by_hand(n: u32, lambda: f64, terms: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut c = vec![0.0; terms];
    c[0] = -1.0;
    let conv2 = |c: &[f64], k: usize| -> f64 { (0..=k).map(|i| c[i] * c[k - i]).sum() };
    let conv3 = |c: &[f64], k: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..=k {
            for j in 0..=k - i {
                s += c[i] * c[j] * c[k - i - j];
            }
        }
        s
    };
    for k in 1..terms {
        // with c_k = 0 the k-th coefficients omit exactly the c_k terms
        let y2 = conv2(&c, k);
        let y3 = conv3(&c, k);
        c[k] = lambda * conv3(&c, k - 1) - y2 - y3 - (nf - 2.0 + 4.0 * (k as f64 - 1.0)) / (nf + 2.0) * c[k - 1];
    }
    c
}

#[test]
fn tail_recurrence_agrees_with_matching() {
    let p = shrink(6, 1.0);
    let printed = tail_coeffs_n6(1.0, 12);
    let matched = tail_coeffs_matched(&p, 12);
    let hand = tail_by_hand(6, 1.0, 12);
    assert_eq!(printed[0], -1.0);
    assert!((printed[1] + 0.5).abs() < 1e-15);
    for i in 0..=10 {
        assert!((printed[i] - matched[i]).abs() <= 1e-12 * matched[i].abs().max(1.0), "i={i}");
        assert!((hand[i] - matched[i]).abs() <= 1e-12 * matched[i].abs().max(1.0), "i={i}");
    }
    for n in [3, 5, 8, 12] {
        for lambda in [0.9, 1.0, 2.5] {
            let lib = shrink_tail_seed(&shrink(n, lambda), 10).unwrap().coeffs;
            let hand = tail_by_hand(n, lambda, 10);
            for i in 0..10 {
                assert!((lib[i] - hand[i]).abs() <= 1e-11 * hand[i].abs().max(1.0), "n={n} i={i}");
            }
        }
    }
}

#[test]
fn tail_seed_solves_the_abel_equation() {
    for (n, lambda) in [(6, 1.0), (5, 2.0), (9, 1.5)] {
        let p = shrink(n, lambda);
        let seed = shrink_tail_seed(&p, 20).unwrap();
        for z in [2e3, 1e4, 1e5] {
            let (q, dw) = seed.eval_tail(z);
            // w w' + w = Phi, with w' by central differences of the series
            let h = z * 1e-5;
            let fd = (seed.eval_tail(z + h).0.w - seed.eval_tail(z - h).0.w) / (2.0 * h);
            assert!((fd - dw).abs() <= 1e-6 * dw.abs());
            let res = q.w * dw + q.w - phi_fn(&p, z).unwrap();
            assert!(res.abs() <= 1e-9 * q.w.abs(), "n={n} z={z}: {res}");
        }
    }
}

/// Origin coefficients in `zeta = u^4` from
/// `m W^2 + u W W_u = (n+2)(lambda - u^4 W - sigma u^4)`.
fn origin_by_hand(n: u32, lambda: f64, sigma: f64, terms: usize) -> Vec<f64> {
    let nf = n as f64;
    let m = nf - 2.0;
    let mut a = vec![0.0; terms];
    a[0] = ((nf + 2.0) * lambda / m).sqrt();
    for k in 1..terms {
        // coefficient of a_k is (2m + 4k) a_0
        let mut rest = 0.0;
        for i in 1..k {
            let j = k - i;
            rest += m * a[i] * a[j] + 4.0 * a[i] * j as f64 * a[j];
        }
        let mut rhs = -(nf + 2.0) * a[k - 1];
        if k == 1 {
            rhs -= (nf + 2.0) * sigma;
        }
        a[k] = (rhs - rest) / ((2.0 * m + 4.0 * k as f64) * a[0]);
    }
    a
}

#[test]
fn origin_series_by_hand() {
    for n in 3..=12 {
        let p = SolitonParams::steady(n).unwrap();
        let lib = steady_origin_seed(&p, 8).unwrap().coeffs;
        let hand = origin_by_hand(n, 1.0, 0.0, 8);
        for k in 0..8 {
            assert!((lib[k] - hand[k]).abs() <= 1e-12 * hand[k].abs().max(1.0), "n={n} k={k}");
        }
    }
    for n in 7..=12 {
        for lambda in [0.7, 1.0, 3.0] {
            let p = shrink(n, lambda);
            let s = shrink_origin_seed(&p, 8).unwrap();
            let nf = n as f64;
            let a0 = s.coeffs[0];
            assert!(((nf - 2.0) * a0 * a0 - (nf + 2.0) * lambda).abs() <= 1e-12 * (nf + 2.0) * lambda);
            let hand = origin_by_hand(n, lambda, 1.0, 8);
            for (k, (c, h)) in s.coeffs.iter().zip(&hand).enumerate() {
                assert!((c - h).abs() <= 1e-12 * h.abs().max(1.0), "n={n} k={k}");
            }
            assert!(s.residual(0.05).abs() < 1e-12);
        }
    }
}

#[test]
fn linearization_anchors() {
    let p = shrink(6, 1.0);
    let j = jacobian(VectorFieldId::ZW, &p, [1.0, 0.0]).unwrap();
    assert_eq!(j, [[0.0, 1.0], [-0.5, -1.0]]);
    let cps = critical_points(VectorFieldId::ZW, &p);
    assert_eq!(cps.len(), 1);
    assert_eq!(cps[0].class, Classification::StableFocus);

    // (n + 2) lambda = 16 exactly is a node, just below is a focus
    let node = shrink(6, 2.0);
    assert_eq!(critical_points(VectorFieldId::ZW, &node)[0].class, Classification::StableNode);
    let focus = shrink(6, 2.0 - 1e-9);
    assert_eq!(critical_points(VectorFieldId::ZW, &focus)[0].class, Classification::StableFocus);

    // steady n = 3: hyperbolic saddle at the origin with eigenvalues +-sqrt(5)
    let s3 = SolitonParams::steady(3).unwrap();
    let origin = &critical_points(VectorFieldId::UwSteady, &s3)[0];
    assert_eq!(origin.class, Classification::Saddle);
    let mut ev: Vec<f64> = origin.eigenvalues.iter().map(|e| e.re).collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] + 5f64.sqrt()).abs() <= 1e-12 && (ev[1] - 5f64.sqrt()).abs() <= 1e-12);
    // nilpotent for n >= 4
    let s5 = SolitonParams::steady(5).unwrap();
    assert_eq!(critical_points(VectorFieldId::UwSteady, &s5)[0].class, Classification::TopologicalSaddle);
}

#[test]
fn transforms_by_hand() {
    // n = 6: K = 40, x = (40 z)^(1/4), y = w (40 z)^(-1/2)
    let p = shrink(6, 1.0);
    let c = xy_from_zw(&p, PhasePoint::new(2.5, 3.0)).unwrap();
    assert!((c.first - 100f64.powf(0.25)).abs() < 1e-14);
    assert!((c.second - 0.3).abs() < 1e-15);
    let q = zw_from_xy(&p, c.first, c.second).unwrap();
    assert!((q.z - 2.5).abs() < 1e-14 && (q.w - 3.0).abs() < 1e-14);
    assert!(dynsys::rhs(VectorFieldId::ZW, &p, [-1.0, 1.0]).is_err());
}
