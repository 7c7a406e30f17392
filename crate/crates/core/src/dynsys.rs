//! Vector fields, critical points, and the curves that organise the
//! shrinker phase plane.
//!
//! | id          | state    | system                                                        |
//! |-------------|----------|---------------------------------------------------------------|
//! | `ZW`        | `(z, w)` | `z' = w`, `w' = Phi(z) - w`                                   |
//! | `XY`        | `(x, y)` | `x' = 2(n-1)xy`, `y' = Rbar - (n-1)(n-2)y^2 - x^2(y + rho)`   |
//! | `UW_STEADY` | `(u, w)` | `u' = w`, `w' = (n+2)(lambda u^(2n-5) - u^(n+1) w)`           |
//! | `UW_SHRINK` | `(u, w)` | `u' = w`, `w' = (n+2)(lambda u^(2n-5) - u^(2n-1) - u^(n+1) w)` |
//!
//! The `UW` systems are the `ZW` system after `u = z^(1/(n+2))` and the
//! time change `ds = (n+2) u^(n+1) dt`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{powf, powi, sqrt};
use crate::params::{chart_constant, phi_fn, phi_prime, Chart, ChartPoint, PhasePoint, Regime, SolitonParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VectorFieldId {
    ZW,
    XY,
    #[cfg_attr(feature = "serde", serde(rename = "UW_STEADY"))]
    UwSteady,
    #[cfg_attr(feature = "serde", serde(rename = "UW_SHRINK"))]
    UwShrink,
}

impl VectorFieldId {
    pub fn as_str(self) -> &'static str {
        match self {
            VectorFieldId::ZW => "ZW",
            VectorFieldId::XY => "XY",
            VectorFieldId::UwSteady => "UW_STEADY",
            VectorFieldId::UwShrink => "UW_SHRINK",
        }
    }

    /// The `(u, w)` system matching the regime of `p`.
    pub fn uw_for(p: &SolitonParams) -> Self {
        match p.regime() {
            Regime::Steady => VectorFieldId::UwSteady,
            Regime::Shrinking => VectorFieldId::UwShrink,
        }
    }

    /// Column names of the state, e.g. `("z", "w")`.
    pub fn coordinates(self) -> (&'static str, &'static str) {
        match self {
            VectorFieldId::ZW => ("z", "w"),
            VectorFieldId::XY => ("x", "y"),
            VectorFieldId::UwSteady | VectorFieldId::UwShrink => ("u", "w"),
        }
    }

    /// Name of the trajectory parameter.
    pub fn parameter(self) -> &'static str {
        match self {
            VectorFieldId::ZW => "s",
            _ => "t",
        }
    }
}

pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Classification {
    Saddle,
    TopologicalSaddle,
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Location {
    ZW(PhasePoint),
    Chart(ChartPoint),
}

impl Location {
    /// Coordinates in the chart of the owning vector field.
    pub fn coords(&self) -> [f64; 2] {
        match self {
            Location::ZW(q) => [q.z, q.w],
            Location::Chart(c) => [c.first, c.second],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalPoint {
    pub location: Location,
    pub jacobian: Matrix2,
    pub eigenvalues: [Eigenvalue; 2],
    pub class: Classification,
}

fn check_finite(state: [f64; 2]) -> Result<()> {
    for v in state {
        if !v.is_finite() {
            return Err(Error::Domain { what: "state", at: v });
        }
    }
    Ok(())
}

pub(crate) fn uw_sigma(vf: VectorFieldId) -> f64 {
    if vf == VectorFieldId::UwShrink {
        1.0
    } else {
        0.0
    }
}

/// `(u, w)` field without the `u >= 0` check; polynomial, so the integrator
/// may evaluate it slightly past the boundary while locating it.
pub(crate) fn uw_rhs(p: &SolitonParams, sigma: f64, u: f64, w: f64) -> [f64; 2] {
    let n = p.n();
    let np2 = p.nf() + 2.0;
    let lead = p.lambda() * powi(u, 2 * n - 5) - sigma * powi(u, 2 * n - 1) - powi(u, n + 1) * w;
    [w, np2 * lead]
}

pub(crate) fn xy_rhs(p: &SolitonParams, x: f64, y: f64) -> [f64; 2] {
    let n = p.nf();
    [2.0 * (n - 1.0) * x * y, p.rbar() - (n - 1.0) * (n - 2.0) * y * y - x * x * (y + p.rho())]
}

/// Right-hand side of the selected system.
pub fn rhs(vf: VectorFieldId, p: &SolitonParams, state: [f64; 2]) -> Result<[f64; 2]> {
    check_finite(state)?;
    let [a, b] = state;
    match vf {
        VectorFieldId::ZW => Ok([b, phi_fn(p, a)? - b]),
        VectorFieldId::XY => Ok(xy_rhs(p, a, b)),
        VectorFieldId::UwSteady | VectorFieldId::UwShrink => {
            if a < 0.0 {
                return Err(Error::Domain { what: "u", at: a });
            }
            Ok(uw_rhs(p, uw_sigma(vf), a, b))
        }
    }
}

/// Analytic jacobian of [`rhs`].
pub fn jacobian(vf: VectorFieldId, p: &SolitonParams, state: [f64; 2]) -> Result<Matrix2> {
    check_finite(state)?;
    let [a, b] = state;
    let n = p.nf();
    match vf {
        VectorFieldId::ZW => Ok([[0.0, 1.0], [phi_prime(p, a)?, -1.0]]),
        VectorFieldId::XY => Ok([
            [2.0 * (n - 1.0) * b, 2.0 * (n - 1.0) * a],
            [-2.0 * a * (b + p.rho()), -2.0 * (n - 1.0) * (n - 2.0) * b - a * a],
        ]),
        VectorFieldId::UwSteady | VectorFieldId::UwShrink => {
            if a < 0.0 {
                return Err(Error::Domain { what: "u", at: a });
            }
            Ok(uw_jacobian(p, uw_sigma(vf), a, b))
        }
    }
}

fn uw_jacobian(p: &SolitonParams, sigma: f64, u: f64, w: f64) -> Matrix2 {
    let k = p.n();
    let n = p.nf();
    let dwu = (n + 2.0)
        * (p.lambda() * (2.0 * n - 5.0) * powi(u, 2 * k - 6)
            - sigma * (2.0 * n - 1.0) * powi(u, 2 * k - 2)
            - (n + 1.0) * powi(u, k) * w);
    [[0.0, 1.0], [dwu, -(n + 2.0) * powi(u, k + 1)]]
}

/// Eigenvalues of a real 2x2 matrix, larger real part first.
pub fn eigenvalues(m: &Matrix2) -> [Eigenvalue; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    eigen_from(tr, tr * tr - 4.0 * det)
}

fn eigen_from(tr: f64, disc: f64) -> [Eigenvalue; 2] {
    if disc >= 0.0 {
        let s = sqrt(disc);
        [Eigenvalue { re: (tr + s) / 2.0, im: 0.0 }, Eigenvalue { re: (tr - s) / 2.0, im: 0.0 }]
    } else {
        let s = sqrt(-disc) / 2.0;
        [Eigenvalue { re: tr / 2.0, im: s }, Eigenvalue { re: tr / 2.0, im: -s }]
    }
}

/// Classification from the linearization alone.
pub fn classify(ev: &[Eigenvalue; 2]) -> Classification {
    let [a, b] = ev;
    if a.im != 0.0 {
        return if a.re < 0.0 {
            Classification::StableFocus
        } else if a.re > 0.0 {
            Classification::UnstableFocus
        } else {
            Classification::Degenerate
        };
    }
    if a.re == 0.0 || b.re == 0.0 {
        Classification::Degenerate
    } else if a.re > 0.0 && b.re < 0.0 || a.re < 0.0 && b.re > 0.0 {
        Classification::Saddle
    } else if a.re < 0.0 {
        Classification::StableNode
    } else {
        Classification::UnstableNode
    }
}

/// Rest point `(xi, 0)` of the shrinking `(z, w)` system, with the jacobian
/// in closed form.
fn xi_point(p: &SolitonParams) -> CriticalPoint {
    let np2l = (p.nf() + 2.0) * p.lambda();
    let jac = [[0.0, 1.0], [-4.0 / np2l, -1.0]];
    let ev = eigen_from(-1.0, 1.0 - 16.0 / np2l);
    let class = if np2l >= 16.0 { Classification::StableNode } else { Classification::StableFocus };
    CriticalPoint { location: Location::ZW(PhasePoint::new(p.xi(), 0.0)), jacobian: jac, eigenvalues: ev, class }
}

fn chart_point(chart: Chart, first: f64, second: f64) -> Location {
    Location::Chart(ChartPoint { chart, first, second })
}

fn from_matrix(location: Location, jacobian: Matrix2) -> CriticalPoint {
    let eigenvalues = eigenvalues(&jacobian);
    CriticalPoint { location, jacobian, eigenvalues, class: classify(&eigenvalues) }
}

/// All rest points in the closed chart domain.
///
/// The `(z, w)` chart never lists the origin: `Phi` is not differentiable
/// there, and the point is treated in the `(u, w)` chart instead.
pub fn critical_points(vf: VectorFieldId, p: &SolitonParams) -> Vec<CriticalPoint> {
    let n = p.nf();
    match vf {
        VectorFieldId::ZW => {
            if p.is_shrinking() {
                vec![xi_point(p)]
            } else {
                Vec::new()
            }
        }
        VectorFieldId::UwSteady | VectorFieldId::UwShrink => {
            let sigma = uw_sigma(vf);
            let j0 = uw_jacobian(p, sigma, 0.0, 0.0);
            let mut origin = from_matrix(chart_point(Chart::UW, 0.0, 0.0), j0);
            if p.n() >= 4 {
                origin.class = Classification::TopologicalSaddle;
            }
            let mut out = vec![origin];
            if sigma > 0.0 {
                let u = powf(p.lambda(), 0.25);
                out.push(from_matrix(chart_point(Chart::UW, u, 0.0), uw_jacobian(p, sigma, u, 0.0)));
            }
            out
        }
        VectorFieldId::XY => {
            let y0 = sqrt(p.rbar() / ((n - 1.0) * (n - 2.0)));
            let mut out = Vec::new();
            for y in [y0, -y0] {
                let jac = [[2.0 * (n - 1.0) * y, 0.0], [0.0, -2.0 * (n - 1.0) * (n - 2.0) * y]];
                out.push(from_matrix(chart_point(Chart::XY, 0.0, y), jac));
            }
            if p.rho() > 0.0 {
                let x = sqrt(p.rbar() / p.rho());
                let jac = [[0.0, 2.0 * (n - 1.0) * x], [-2.0 * x * p.rho(), -x * x]];
                out.push(from_matrix(chart_point(Chart::XY, x, 0.0), jac));
            }
            out
        }
    }
}

/// Largest positive root of `4 Phi'(z) + 1 = 0` for the shrinker, or `0`
/// when the equation has no positive root (`n > 6`, large `lambda`).
///
/// With `v = z^(4/(n+2))` the equation is the quadratic
/// `(n+2) v^2 - 4(n-2) v + 4(n-6) lambda = 0`.
pub fn z_alpha(p: &SolitonParams) -> Result<f64> {
    if !p.is_shrinking() {
        return Err(Error::WrongRegime("shrinking"));
    }
    if p.n() == 6 {
        return Err(Error::ZAlphaUndefined);
    }
    let n = p.nf();
    let disc = (n - 2.0) * (n - 2.0) - (n + 2.0) * (n - 6.0) * p.lambda();
    if disc <= 0.0 {
        return Ok(0.0);
    }
    let v = 2.0 * ((n - 2.0) + sqrt(disc)) / (n + 2.0);
    Ok(powf(v, (n + 2.0) / 4.0))
}

/// Left end of the `S2` branches and of the trapping region:
/// `max(z_alpha, xi)`, and `max(4, lambda^2)` when `n = 6`.
pub fn s2_domain_start(p: &SolitonParams) -> Result<f64> {
    if !p.is_shrinking() {
        return Err(Error::WrongRegime("shrinking"));
    }
    if p.n() == 6 {
        return Ok(p.xi().max(4.0));
    }
    Ok(z_alpha(p)?.max(p.xi()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CurveId {
    /// `w = Phi(z)`, where trajectories have horizontal tangents.
    S1,
    /// Upper branch `f1` of the inflection locus.
    S2a,
    /// Lower branch `f2` of the inflection locus.
    S2b,
    /// `w = -z^((n-2)/(n+2))`.
    S3,
}

impl CurveId {
    pub const ALL: [CurveId; 4] = [CurveId::S1, CurveId::S2a, CurveId::S2b, CurveId::S3];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveId::S1 => "S1",
            CurveId::S2a => "S2a",
            CurveId::S2b => "S2b",
            CurveId::S3 => "S3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnalysisCurve {
    pub id: CurveId,
    pub domain_lo: f64,
    pub domain_hi: f64,
}

impl AnalysisCurve {
    /// Curve with its natural domain. `S2a`/`S2b` exist only for shrinkers.
    pub fn new(id: CurveId, p: &SolitonParams) -> Result<Self> {
        let lo = match id {
            CurveId::S1 if p.n() < 6 => f64::MIN_POSITIVE,
            CurveId::S1 | CurveId::S3 => 0.0,
            CurveId::S2a | CurveId::S2b => s2_domain_start(p)?,
        };
        Ok(AnalysisCurve { id, domain_lo: lo, domain_hi: f64::INFINITY })
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.domain_lo && z <= self.domain_hi
    }
}

/// Ordinate of the curve at `z`.
pub fn curve_eval(c: &AnalysisCurve, p: &SolitonParams, z: f64) -> Result<f64> {
    if !c.contains(z) || z.is_nan() {
        return Err(Error::Domain { what: c.id.as_str(), at: z });
    }
    match c.id {
        CurveId::S1 => phi_fn(p, z),
        CurveId::S3 => Ok(-powf(z, p.e_rho())),
        CurveId::S2a | CurveId::S2b => {
            let (f1, f2) = s2_branches(p, z)?;
            Ok(if c.id == CurveId::S2a { f1 } else { f2 })
        }
    }
}

/// `(f1, f2) = -Phi/(2Phi') +- (Phi/(2Phi')) sqrt(1 + 4Phi')`.
pub(crate) fn s2_branches(p: &SolitonParams, z: f64) -> Result<(f64, f64)> {
    let phi = phi_fn(p, z)?;
    let dphi = phi_prime(p, z)?;
    let mut arg = 1.0 + 4.0 * dphi;
    if arg < 0.0 {
        // the domain start is a root, so allow rounding there
        if arg > -1e-12 {
            arg = 0.0;
        } else {
            return Err(Error::Domain { what: "1 + 4 Phi'", at: z });
        }
    }
    let q = phi / (2.0 * dphi);
    let root = q * sqrt(arg);
    Ok((-q + root, -q - root))
}

/// Membership in the closed trapping region
/// `T = { f2 <= w <= f1, z >= max(z_alpha, xi) }`.
pub fn in_trap(p: &SolitonParams, q: PhasePoint) -> bool {
    matches!(trap_signed_distance(p, q), Ok(d) if d >= 0.0)
}

/// Positive inside the trapping region, zero on its boundary, negative
/// outside. Distances are taken coordinate-wise and are not Euclidean.
pub fn trap_signed_distance(p: &SolitonParams, q: PhasePoint) -> Result<f64> {
    let start = s2_domain_start(p)?;
    if q.z < start {
        return Ok(q.z - start);
    }
    let (f1, f2) = s2_branches(p, q.z)?;
    Ok((q.z - start).min(f1 - q.w).min(q.w - f2))
}

/// Signed distance to the corridor between `S2a` (below) and `S1` (above),
/// for `z` in the `S2` domain.
pub fn corridor_distance(p: &SolitonParams, q: PhasePoint) -> Result<f64> {
    let (f1, _) = s2_branches(p, q.z)?;
    Ok((q.w - f1).min(phi_fn(p, q.z)? - q.w))
}

/// `(z, w)` coordinates of a chart state; `None` outside `z > 0`.
pub(crate) fn to_zw(vf: VectorFieldId, p: &SolitonParams, s: [f64; 2]) -> Option<PhasePoint> {
    match vf {
        VectorFieldId::ZW => Some(PhasePoint::new(s[0], s[1])),
        VectorFieldId::UwSteady | VectorFieldId::UwShrink => {
            (s[0] > 0.0).then(|| PhasePoint::new(powi(s[0], p.n() + 2), s[1]))
        }
        VectorFieldId::XY => {
            if s[0] > 0.0 {
                let n = p.nf();
                let z = powf(s[0], (n + 2.0) / 2.0) / chart_constant(p.n());
                Some(PhasePoint::new(z, s[1] * powf(s[0], (n - 2.0) / 2.0)))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    fn shrink(n: u32, l: f64) -> SolitonParams {
        SolitonParams::shrinking(n, l).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let p = shrink(6, 1.0);
        assert_eq!(rhs(VectorFieldId::ZW, &p, [1.0, 0.0]).unwrap(), [0.0, 0.0]);
        let s = SolitonParams::steady(6).unwrap();
        let v = rhs(VectorFieldId::ZW, &s, [4.0, 1.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-14);
        let v = rhs(VectorFieldId::XY, &p, [1.0, 0.0]).unwrap();
        assert_eq!(v, [0.0, p.rbar() - p.rho()]);
        let s3 = SolitonParams::steady(3).unwrap();
        assert_eq!(rhs(VectorFieldId::UwSteady, &s3, [0.0, 0.0]).unwrap(), [0.0, 0.0]);
        assert!(rhs(VectorFieldId::UwSteady, &s3, [-0.1, 0.0]).is_err());
        assert!(rhs(VectorFieldId::ZW, &s3, [0.0, 1.0]).is_err());
    }

    #[test]
    fn xi_rest_point() {
        let cps = critical_points(VectorFieldId::ZW, &shrink(6, 1.0));
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].jacobian, [[0.0, 1.0], [-0.5, -1.0]]);
        assert_eq!(cps[0].class, Classification::StableFocus);
        assert_eq!(cps[0].location.coords(), [1.0, 0.0]);
        let cps = critical_points(VectorFieldId::ZW, &shrink(6, 3.0));
        assert_eq!(cps[0].class, Classification::StableNode);
        assert!((cps[0].location.coords()[0] - 9.0).abs() < 1e-12);
        // (n+2) lambda = 16 is a node
        assert_eq!(critical_points(VectorFieldId::ZW, &shrink(6, 2.0))[0].class, Classification::StableNode);
        assert!(critical_points(VectorFieldId::ZW, &SolitonParams::steady(5).unwrap()).is_empty());
    }

    #[test]
    fn uw_origin() {
        let s3 = SolitonParams::steady(3).unwrap();
        let cps = critical_points(VectorFieldId::UwSteady, &s3);
        assert_eq!(cps[0].class, Classification::Saddle);
        let r5 = 5f64.sqrt();
        assert!((cps[0].eigenvalues[0].re - r5).abs() < 1e-12);
        assert!((cps[0].eigenvalues[1].re + r5).abs() < 1e-12);
        for n in 4..=9 {
            let s = SolitonParams::steady(n).unwrap();
            assert_eq!(critical_points(VectorFieldId::UwSteady, &s)[0].class, Classification::TopologicalSaddle);
        }
        let cps = critical_points(VectorFieldId::UwShrink, &shrink(7, 2.0));
        assert_eq!(cps.len(), 2);
        assert!((cps[1].location.coords()[0] - 2f64.powf(0.25)).abs() < 1e-15);
        assert!(matches!(cps[1].class, Classification::StableFocus | Classification::StableNode));
    }

    #[test]
    fn xy_saddle_for_round_fiber() {
        for (n, ev) in [(3u32, 4.0), (6, 10.0)] {
            let p = SolitonParams::rotational(n, Regime::Steady).unwrap();
            let cps = critical_points(VectorFieldId::XY, &p);
            let top = cps.iter().find(|c| c.location.coords() == [0.0, 1.0]).unwrap();
            assert_eq!(top.class, Classification::Saddle);
            assert!((top.eigenvalues[0].re - ev).abs() < 1e-12);
            let nf = n as f64;
            assert!((top.eigenvalues[1].re + 2.0 * (nf - 1.0) * (nf - 2.0)).abs() < 1e-12);
        }
        let p = SolitonParams::rotational(6, Regime::Shrinking).unwrap();
        let cps = critical_points(VectorFieldId::XY, &p);
        assert_eq!(cps.len(), 3);
        assert!(matches!(cps[2].class, Classification::StableFocus | Classification::StableNode));
    }

    #[test]
    fn z_alpha_cases() {
        assert_eq!(z_alpha(&shrink(10, 8.0)).unwrap(), 0.0);
        assert_eq!(z_alpha(&shrink(6, 1.0)), Err(Error::ZAlphaUndefined));
        assert!(z_alpha(&SolitonParams::steady(5).unwrap()).is_err());
        for (n, l) in [(3u32, 1.0), (5, 1.0), (5, 0.2), (8, 1.0), (12, 0.3)] {
            let p = shrink(n, l);
            let za = z_alpha(&p).unwrap();
            assert!(za > 0.0);
            assert!((4.0 * phi_prime(&p, za).unwrap() + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn curve_examples() {
        let p = shrink(6, 1.0);
        let c = |id| AnalysisCurve::new(id, &p).unwrap();
        let f1 = curve_eval(&c(CurveId::S2a), &p, 9.0).unwrap();
        assert!((f1 - (-6.0 + 2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(curve_eval(&c(CurveId::S1), &p, 1.0).unwrap(), 0.0);
        assert_eq!(curve_eval(&c(CurveId::S3), &p, 4.0).unwrap(), -2.0);
        assert!(curve_eval(&c(CurveId::S2a), &p, 3.0).is_err());
        let (a, b) = s2_branches(&p, 4.0).unwrap();
        assert!((a + 2.0).abs() < 1e-12 && (b + 2.0).abs() < 1e-12);
        assert!(AnalysisCurve::new(CurveId::S2a, &make_params(6, Regime::Steady, 1.0).unwrap()).is_err());
    }

    #[test]
    fn trap_examples() {
        let p = shrink(6, 1.0);
        assert!(in_trap(&p, PhasePoint::new(9.0, -3.0)));
        assert!(!in_trap(&p, PhasePoint::new(9.0, 0.0)));
        assert!(!in_trap(&p, PhasePoint::new(0.5, -1.0)));
        assert!(in_trap(&p, PhasePoint::new(4.0, -2.0)));
    }
}
