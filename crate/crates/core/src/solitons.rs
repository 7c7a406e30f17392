//! End-to-end procedures: the complete shrinker trajectory, the steady
//! nonexistence sweep, the rotationally symmetric soliton, and the
//! reconstruction of the warp function with its ODE residual.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::asymptotics::{
    completeness_integral, least_squares, rotational_saddle_seed, shrink_tail_seed, CompletenessVerdict, End,
    SeriesSeed, Verdict,
};
use crate::dynsys::{corridor_distance, critical_points, s2_domain_start, to_zw, Location, VectorFieldId};
use crate::error::{Error, Result};
use crate::integrate::{
    integrate, integrate_both, potential_rate, upward_crossings, Direction, EventKind, Sample, StopSpec, Target,
    Terminal, Tolerances, Trajectory,
};
use crate::math::{abs, exp, hypot, ln, powf, powi, sqrt};
use crate::params::{phi_fn, xy_from_zw, PhasePoint, Regime, SolitonParams};

/// Bound on the ODE residual for a certified profile.
pub const RESIDUAL_BOUND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CertificateKind {
    ShrinkerGamma,
    SteadySweep,
    Rotational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CertificateVerdict {
    CompleteNonProduct,
    NoCompleteNonProduct,
    Inconclusive,
}

/// Where `r = 0` sits on a reconstructed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Anchor {
    /// The first sample.
    Start,
    /// The first upward crossing of the `z`-axis.
    ZAxisCrossing,
    /// First entry into the ball of `radius` around a point of the chart.
    CriticalBall { at: [f64; 2], radius: f64 },
    /// `phi = 0`, reached before the first sample: the first sample lies at
    /// `r = r_seed` and has potential `f = f_seed`.
    PhiZero { r_seed: f64, f_seed: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfilePoint {
    pub r: f64,
    pub phi: f64,
    pub phi_prime: f64,
}

/// `phi(r)` on the base line, with `R = phi' + rho` and the potential `f`
/// (`f' = phi`, `f = 0` at the anchor).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WarpProfile {
    pub grid: Vec<ProfilePoint>,
    pub r_origin: Anchor,
    pub scalar_curvature: Vec<f64>,
    pub potential: Vec<f64>,
}

impl WarpProfile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// How a steady trajectory fails to be complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SteadyCase {
    /// Meets the `w`-axis at a finite `w != 0`.
    WAxisHit,
    /// Runs into the origin.
    OriginHit,
    /// Enters the fourth quadrant and falls below `w = -z`.
    FourthQuadrantDecay,
    /// Some other end with a convergent integral.
    OtherConvergent,
    Unclassified,
}

impl SteadyCase {
    pub fn describe(self) -> &'static str {
        match self {
            SteadyCase::WAxisHit => "(a) meets the w-axis at finite w",
            SteadyCase::OriginHit => "(b) meets the w-axis at the origin",
            SteadyCase::FourthQuadrantDecay => "(c) fourth-quadrant decay below w = -z",
            SteadyCase::OtherConvergent => "convergent end outside the case analysis",
            SteadyCase::Unclassified => "no convergent end found",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepEntry {
    pub start: [f64; 2],
    pub case: SteadyCase,
    /// Verdicts toward the small and the large end of the parameter.
    pub completeness: Vec<CompletenessVerdict>,
    pub passed: bool,
    /// An end goes off to infinity in `w` while `z` stays small.
    pub vertical_asymptote: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolitonCertificate {
    pub params: SolitonParams,
    pub kind: CertificateKind,
    pub trajectories: Vec<Trajectory>,
    /// Small end first. Empty for sweeps, whose verdicts sit on the entries.
    pub completeness: Vec<CompletenessVerdict>,
    pub phi_positive: bool,
    pub residual_max: Option<f64>,
    pub verdict: CertificateVerdict,
    pub notes: Vec<String>,
    /// Upward `z`-axis crossings, in order.
    pub crossings: Vec<f64>,
    pub tolerances: Tolerances,
    pub profile: Option<WarpProfile>,
    pub sweep: Vec<SweepEntry>,
    /// Grid starts left out of a sweep.
    pub skipped: Vec<[f64; 2]>,
}

impl SolitonCertificate {
    fn new(p: &SolitonParams, kind: CertificateKind, tol: Tolerances) -> Self {
        SolitonCertificate {
            params: *p,
            kind,
            trajectories: Vec::new(),
            completeness: Vec::new(),
            phi_positive: false,
            residual_max: None,
            verdict: CertificateVerdict::Inconclusive,
            notes: Vec::new(),
            crossings: Vec::new(),
            tolerances: tol,
            profile: None,
            sweep: Vec::new(),
            skipped: Vec::new(),
        }
    }

    /// `CompleteNonProduct` only when both ends diverge, `phi > 0` and the
    /// residual is within bound; `NoCompleteNonProduct` when an end
    /// converges or `phi` vanishes; `Inconclusive` otherwise.
    fn settle(&mut self, allow_complete: bool) {
        let all_div = self.completeness.len() == 2 && self.completeness.iter().all(|c| c.verdict == Verdict::Diverges);
        let any_conv = self.completeness.iter().any(|c| c.verdict == Verdict::Converges);
        let res_ok = matches!(self.residual_max, Some(r) if r <= RESIDUAL_BOUND);
        self.verdict = if allow_complete && all_div && self.phi_positive && res_ok {
            CertificateVerdict::CompleteNonProduct
        } else if any_conv || !self.phi_positive {
            CertificateVerdict::NoCompleteNonProduct
        } else {
            CertificateVerdict::Inconclusive
        };
    }
}

// ---------------------------------------------------------------------------
// profiles

/// Rates of `r` and of the auxiliary component per unit of the reported
/// parameter.
fn rates(vf: VectorFieldId, p: &SolitonParams, s: [f64; 2]) -> (f64, f64) {
    let nf = p.nf();
    let n = p.n();
    let c = p.metric_constant();
    match vf {
        VectorFieldId::ZW => {
            if s[0] > 0.0 {
                (c * powf(s[0], -2.0 / (nf + 2.0)), 1.0)
            } else {
                (f64::NAN, 1.0)
            }
        }
        VectorFieldId::XY => (2.0 * (nf - 1.0) * s[0], 2.0 * (nf - 1.0) * s[0] * s[0]),
        _ => (c * (nf + 2.0) * powi(s[0], n - 1), (nf + 2.0) * powi(s[0], n + 1)),
    }
}

/// `(r, aux)` at `param`, by Hermite interpolation with the exact rates.
fn r_aux_at(traj: &Trajectory, param: f64) -> Option<(f64, f64)> {
    let s = &traj.samples;
    let i = s.partition_point(|q| q.param <= param);
    if i == 0 || i > s.len() {
        return None;
    }
    if i == s.len() {
        let l = s[s.len() - 1];
        return (l.param == param).then_some((l.r, l.aux));
    }
    let (a, b) = (&s[i - 1], &s[i]);
    let h = b.param - a.param;
    let th = (param - a.param) / h;
    let (ra, xa) = rates(traj.vf, &traj.params, a.state);
    let (rb, xb) = rates(traj.vf, &traj.params, b.state);
    let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
    let h10 = th * (1.0 - th) * (1.0 - th);
    let h01 = th * th * (3.0 - 2.0 * th);
    let h11 = th * th * (th - 1.0);
    let herm = |ya: f64, da: f64, yb: f64, db: f64| {
        if da.is_finite() && db.is_finite() {
            h00 * ya + h10 * h * da + h01 * yb + h11 * h * db
        } else {
            ya + th * (yb - ya)
        }
    };
    Some((herm(a.r, ra, b.r, rb), herm(a.aux, xa, b.aux, xb)))
}

/// `(phi, phi')` of a sample.
fn warp_of(vf: VectorFieldId, p: &SolitonParams, s: [f64; 2]) -> Option<(f64, f64)> {
    if vf == VectorFieldId::XY {
        return (s[0] > 0.0).then_some((s[0], s[1]));
    }
    let q = to_zw(vf, p, s)?;
    if !(q.z > 0.0) {
        return None;
    }
    let c = xy_from_zw(p, q).ok()?;
    Some((c.first, c.second))
}

/// Rebuilds `phi(r)`, `R(r)` and the potential from a trajectory.
///
/// `r` comes from the arclength carried by the integrator, i.e. the
/// quadrature of `C w^(-1) z^(-2/(n+2)) dz`; the potential from the
/// parameter `s` (`f = C K^(2/(n+2)) s`) or directly in the `(x, y)` chart.
pub fn reconstruct_warp(traj: &Trajectory, p: &SolitonParams, anchor: Anchor) -> Result<WarpProfile> {
    if traj.samples.is_empty() {
        return Err(Error::InsufficientSamples { found: 0 });
    }
    let (r0, aux0, f_shift) = match anchor {
        Anchor::Start => (traj.first().r, traj.first().aux, 0.0),
        Anchor::PhiZero { r_seed, f_seed } => (traj.first().r - r_seed, traj.first().aux, f_seed),
        Anchor::ZAxisCrossing => {
            let e = traj
                .events_of(EventKind::ZAxisCrossing, Some(true))
                .next()
                .ok_or(Error::ClassificationFailed("no upward z-axis crossing to anchor at"))?;
            let (r, a) = r_aux_at(traj, e.param).ok_or(Error::ClassificationFailed("anchor outside the samples"))?;
            (r, a, 0.0)
        }
        Anchor::CriticalBall { at, radius } => {
            let s = traj
                .samples
                .iter()
                .find(|s| hypot(s.state[0] - at[0], s.state[1] - at[1]) <= radius)
                .ok_or(Error::ClassificationFailed("trajectory never enters the anchor ball"))?;
            (s.r, s.aux, 0.0)
        }
    };
    let f_rate = if traj.vf == VectorFieldId::XY { 1.0 } else { potential_rate(p) };
    let mut grid = Vec::with_capacity(traj.samples.len());
    let mut scal = Vec::with_capacity(traj.samples.len());
    let mut pot = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let (phi, dphi) = warp_of(traj.vf, p, s.state).ok_or(Error::NonPositivePhi { param: s.param })?;
        grid.push(ProfilePoint { r: s.r - r0, phi, phi_prime: dphi });
        scal.push(dphi + p.rho());
        pot.push(f_rate * (s.aux - aux0) + f_shift);
    }
    Ok(WarpProfile { grid, r_origin: anchor, scalar_curvature: scal, potential: pot })
}

/// Constant profile `phi = sqrt(Rbar / rho)`: the Riemannian product.
pub fn product_profile(p: &SolitonParams, r_span: f64, points: usize) -> Result<WarpProfile> {
    if !(p.rho() > 0.0) {
        return Err(Error::WrongRegime("shrinking"));
    }
    let phi0 = sqrt(p.rbar() / p.rho());
    let m = points.max(2);
    let grid: Vec<ProfilePoint> =
        (0..m).map(|i| ProfilePoint { r: r_span * i as f64 / (m - 1) as f64, phi: phi0, phi_prime: 0.0 }).collect();
    let pot = grid.iter().map(|g| phi0 * g.r).collect();
    Ok(WarpProfile { scalar_curvature: vec![p.rho(); m], grid, r_origin: Anchor::Start, potential: pot })
}

/// Largest `|LHS - RHS|` of
/// `phi' + rho = Rbar/phi^2 - (n-1)(n-2)(phi'/phi)^2 - 2(n-1) phi''/phi`
/// over interior grid points, with `phi''` from three-point differences
/// of `phi'`. Points closer than `1e-9` (relative) to their predecessor
/// are skipped. `NaN` for fewer than three usable points.
pub fn profile_residual(profile: &WarpProfile, p: &SolitonParams) -> f64 {
    let g = &profile.grid;
    let mut idx: Vec<usize> = Vec::with_capacity(g.len());
    for (i, q) in g.iter().enumerate() {
        if let Some(&j) = idx.last() {
            let gap = q.r - g[j].r;
            if !(abs(gap) > 1e-9 * abs(q.r).max(1.0)) {
                continue;
            }
        }
        idx.push(i);
    }
    if idx.len() < 3 {
        return f64::NAN;
    }
    let nf = p.nf();
    let mut worst = 0.0f64;
    for w in idx.windows(3) {
        let (a, b, c) = (&g[w[0]], &g[w[1]], &g[w[2]]);
        let h1 = b.r - a.r;
        let h2 = c.r - b.r;
        let ddphi = -h2 / (h1 * (h1 + h2)) * a.phi_prime
            + (h2 - h1) / (h1 * h2) * b.phi_prime
            + h1 / (h2 * (h1 + h2)) * c.phi_prime;
        let phi = b.phi;
        let dphi = b.phi_prime;
        let lhs = dphi + p.rho();
        let rhs = p.rbar() / (phi * phi)
            - (nf - 1.0) * (nf - 2.0) * (dphi / phi) * (dphi / phi)
            - 2.0 * (nf - 1.0) * ddphi / phi;
        let d = abs(lhs - rhs);
        if !(d <= worst) {
            worst = d;
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// shrinker

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShrinkerOptions {
    pub terms: usize,
    /// Seed abscissa; `10^3 max(1, xi)` when absent.
    pub z_seed: Option<f64>,
    /// The series part of the trajectory extends to `tail_factor * z_seed`.
    pub tail_factor: f64,
    /// Series samples per decade of `z` in the series part.
    pub tail_density: usize,
    pub tol: Tolerances,
    /// Largest `r` step of the integrated part (controls the residual).
    pub max_dr: f64,
    pub max_steps: usize,
}

impl Default for ShrinkerOptions {
    fn default() -> Self {
        ShrinkerOptions {
            terms: 20,
            z_seed: None,
            tail_factor: 1e3,
            tail_density: 200,
            tol: Tolerances::default(),
            max_dr: 2e-3,
            max_steps: 2_000_000,
        }
    }
}

/// Relative residual bound for accepting a tail seed.
const SEED_RESIDUAL: f64 = 1e-9;

fn default_z_seed(p: &SolitonParams) -> f64 {
    1e3 * p.xi().max(1.0)
}

/// Tail seed and the seed point, after checking the series is accurate
/// there.
fn checked_tail(p: &SolitonParams, opts: &ShrinkerOptions) -> Result<(SeriesSeed, f64)> {
    let seed = shrink_tail_seed(p, opts.terms)?;
    let z_seed = opts.z_seed.unwrap_or_else(|| default_z_seed(p));
    if !(z_seed > 0.0) || !z_seed.is_finite() {
        return Err(Error::SeedRejected { z: z_seed });
    }
    let x = powf(z_seed, -1.0 / (p.nf() + 2.0));
    let scale = abs(phi_fn(p, z_seed)?).max(1.0);
    let res = seed.residual(x);
    if !(abs(res) <= SEED_RESIDUAL * scale) {
        return Err(Error::SeedRejected { z: z_seed });
    }
    Ok((seed, z_seed))
}

/// Series samples for `z` from `z_far` down to (excluding) `z_seed`, with
/// `s` and `r` measured from the seed by Simpson quadrature in `ln z`.
fn tail_samples(seed: &SeriesSeed, p: &SolitonParams, z_seed: f64, z_far: f64, per_decade: usize) -> Vec<Sample> {
    let t0 = ln(z_seed);
    let t1 = ln(z_far);
    let m = libm::ceil((t1 - t0) / core::f64::consts::LN_10 * per_decade as f64 - 1e-9).max(1.0) as usize;
    let h = (t1 - t0) / m as f64;
    let c = p.metric_constant();
    let er = 1.0 - 2.0 / (p.nf() + 2.0);
    // integrands of s and r in t = ln z
    let g = |t: f64| {
        let z = exp(t);
        let w = seed.eval_tail(z).0.w;
        (z / w, c * powf(z, er) / w)
    };
    let mut out = Vec::with_capacity(m);
    let (mut s, mut r) = (0.0, 0.0);
    let mut ga = g(t0);
    for k in 0..m {
        let ta = t0 + k as f64 * h;
        let gm = g(ta + 0.5 * h);
        let gb = g(ta + h);
        s += h / 6.0 * (ga.0 + 4.0 * gm.0 + gb.0);
        r += h / 6.0 * (ga.1 + 4.0 * gm.1 + gb.1);
        ga = gb;
        let z = exp(ta + h);
        out.push(Sample { param: s, state: seed.eval_tail(z).0.as_array(), r, aux: s });
    }
    out.reverse();
    out
}

/// Checks the fourth-quadrant stretch before the first upward `z`-axis
/// crossing against the corridor `f1 <= w <= Phi` (for `z` in the `S2`
/// domain) and against `w > -z^((n-2)/(n+2))`. Returns the first violation.
fn region_violation(p: &SolitonParams, traj: &Trajectory) -> Result<Option<(PhasePoint, &'static str)>> {
    let zs = s2_domain_start(p)?;
    let e = p.e_rho();
    for s in &traj.samples {
        let q = PhasePoint::new(s.state[0], s.state[1]);
        if q.w >= 0.0 {
            break;
        }
        let tol = 1e-9 * abs(q.w).max(1.0);
        if q.z >= zs && corridor_distance(p, q)? < -tol {
            return Ok(Some((q, "S1/S2a corridor")));
        }
        if q.w + powf(q.z, e) <= -tol {
            return Ok(Some((q, "S3")));
        }
    }
    Ok(None)
}

/// Smallest `z` at which `phi` counts as positive.
const PHI_FLOOR: f64 = 1e-8;

/// Finds the complete shrinker trajectory: seeds on the tail series, runs
/// forward through the fourth quadrant to `(xi, 0)`, checks the corridor,
/// and certifies completeness, positivity and the ODE residual.
pub fn find_shrinker_gamma(p: &SolitonParams, opts: &ShrinkerOptions) -> Result<SolitonCertificate> {
    if !p.is_shrinking() {
        return Err(Error::WrongRegime("shrinking"));
    }
    let mut cert = SolitonCertificate::new(p, CertificateKind::ShrinkerGamma, opts.tol);
    let above = p.above_threshold();
    if !above {
        cert.notes.push(format!(
            "below threshold: lambda = {} <= (n-2)/(n+2) = {}; a complete non-product verdict is never issued",
            p.lambda(),
            p.threshold()
        ));
    }
    let (seed, z_seed) = checked_tail(p, opts)?;
    let w_seed = seed.eval_tail(z_seed).0.w;
    let z_far = opts.tail_factor.max(1.0) * z_seed;

    let stop = StopSpec {
        max_span: f64::INFINITY,
        max_steps: opts.max_steps,
        escape_radius: 10.0 * z_far,
        tol: opts.tol,
        max_dr: opts.max_dr,
        ..StopSpec::default()
    }
    .with_events(&[EventKind::ZAxisCrossing, EventKind::S1Crossing])
    .with_target(Target::xi(p));
    let body = integrate(VectorFieldId::ZW, p, [z_seed, w_seed], Direction::Forward, &stop)?;

    let mut samples = tail_samples(&seed, p, z_seed, z_far, opts.tail_density.max(1));
    samples.extend_from_slice(&body.samples);
    let traj = Trajectory { samples, head: Terminal::AsymptoticTail, ..body };
    cert.notes
        .push(format!("seeded at z = {z_seed:e} from {} series terms; series samples up to z = {z_far:e}", opts.terms));

    if let Some((q, which)) = region_violation(p, &traj)? {
        if above && p.n() == 6 {
            return Err(Error::TrajectoryLeftRegion { z: q.z, w: q.w });
        }
        cert.notes.push(format!("left the {which} bound at (z, w) = ({}, {})", q.z, q.w));
    }

    cert.crossings = upward_crossings(&traj);
    if cert.crossings.windows(2).all(|c| c[1] > c[0]) {
        if cert.crossings.len() > 1 {
            cert.notes.push(String::from("z-axis crossing abscissae increase monotonically (no periodic orbit seen)"));
        }
    } else {
        cert.notes.push(String::from("z-axis crossing abscissae are not monotone"));
    }
    let node = (p.nf() + 2.0) * p.lambda() >= 16.0;
    if traj.terminal == Terminal::ConvergedToCriticalPoint {
        cert.notes.push(String::from(if node { "approach to (xi, 0): node" } else { "approach to (xi, 0): focus" }));
    }

    let zmin = traj.samples.iter().map(|s| s.state[0]).fold(f64::INFINITY, f64::min);
    cert.phi_positive = traj.terminal != Terminal::HitBoundary && zmin > PHI_FLOOR;
    if !cert.phi_positive {
        cert.notes.push(format!("phi reaches zero: the trajectory meets the w-axis (min z = {zmin:e})"));
    }

    let small = completeness_integral(&traj, p, End::TowardSmallEnd)?;
    let large = completeness_integral(&traj, p, End::TowardLargeEnd)?;
    cert.completeness = vec![small, large];

    // profile over the part with phi > 0
    let anchor = if traj.terminal == Terminal::ConvergedToCriticalPoint && !cert.crossings.is_empty() && !node {
        Anchor::ZAxisCrossing
    } else if traj.terminal == Terminal::ConvergedToCriticalPoint {
        Anchor::CriticalBall { at: [p.xi(), 0.0], radius: 0.1 * p.xi() }
    } else {
        Anchor::Start
    };
    let positive =
        Trajectory { samples: traj.samples.iter().copied().filter(|s| s.state[0] > 0.0).collect(), ..traj.clone() };
    let profile = reconstruct_warp(&positive, p, anchor)?;
    cert.residual_max = Some(profile_residual(&profile, p));
    if cert.phi_positive && profile.scalar_curvature.iter().any(|&r| !(r > 0.0)) {
        cert.notes.push(String::from("scalar curvature is not positive everywhere"));
    }
    cert.profile = Some(profile);
    cert.trajectories.push(traj);
    cert.settle(above);
    Ok(cert)
}

/// Where a perturbed tail leaves the corridor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeOutcome {
    pub delta: f64,
    /// First point outside the corridor, if any.
    pub exit: Option<PhasePoint>,
    pub terminal: Terminal,
}

/// Perturbs the seed ordinate by `delta` and follows the trajectory toward
/// larger `z` until it leaves the `S1`/`S2a` corridor or reaches `z_max`.
pub fn uniqueness_probe(p: &SolitonParams, opts: &ShrinkerOptions, delta: f64, z_max: f64) -> Result<ProbeOutcome> {
    let (seed, z_seed) = checked_tail(p, opts)?;
    let w = seed.eval_tail(z_seed).0.w + delta;
    let stop = StopSpec {
        max_span: f64::INFINITY,
        max_steps: opts.max_steps,
        escape_radius: z_max,
        tol: opts.tol,
        ..StopSpec::default()
    }
    .with_events(&[EventKind::ZAxisCrossing]);
    let traj = integrate(VectorFieldId::ZW, p, [z_seed, w], Direction::Backward, &stop)?;
    let zs = s2_domain_start(p)?;
    let exit = traj.samples.iter().rev().find_map(|s| {
        let q = PhasePoint::new(s.state[0], s.state[1]);
        match corridor_distance(p, q) {
            Ok(d) if q.z >= zs && d >= 0.0 => None,
            _ => Some(q),
        }
    });
    Ok(ProbeOutcome { delta, exit, terminal: traj.head })
}

/// `(n+2)/4 z^(4/(n+2))`: the exponent rate at which neighbouring tails
/// separate (`2 sqrt(z)` for `n = 6`).
pub fn separation_model(p: &SolitonParams, z: f64) -> f64 {
    let a = 4.0 / (p.nf() + 2.0);
    powf(z, a) / a
}

/// Log-separation of a perturbed tail from the series tail between `z_lo`
/// and `z_hi`. The range is cut into segments over which the model rate
/// grows by at most `per_segment`; on each, the base is re-read from the
/// series and the perturbation restarted at relative size `delta`.
/// Returns `(separation_model(z), cumulative ln growth)` at segment ends.
pub fn tail_separation(
    p: &SolitonParams,
    opts: &ShrinkerOptions,
    z_lo: f64,
    z_hi: f64,
    delta: f64,
    per_segment: f64,
) -> Result<Vec<[f64; 2]>> {
    let seed = shrink_tail_seed(p, opts.terms)?;
    if z_lo < seed.tail_min_z() {
        return Err(Error::SeedRejected { z: z_lo });
    }
    let stop = StopSpec { max_span: f64::INFINITY, max_steps: opts.max_steps, tol: opts.tol, ..StopSpec::default() }
        .with_events(&[]);
    let mut out = vec![[separation_model(p, z_lo), 0.0]];
    let mut z = z_lo;
    let mut acc = 0.0;
    let a = 4.0 / (p.nf() + 2.0);
    while z < z_hi * (1.0 - 1e-12) {
        let m = separation_model(p, z) + per_segment;
        let z_next = powf(m * a, 1.0 / a).min(z_hi);
        let w = seed.eval_tail(z).0.w;
        let d0 = delta * abs(w);
        let s = StopSpec { escape_radius: z_next, ..stop.clone() };
        let traj = integrate(VectorFieldId::ZW, p, [z, w + d0], Direction::Backward, &s)?;
        if traj.head != Terminal::Escaped {
            return Err(Error::ClassificationFailed("perturbed tail did not reach the segment end"));
        }
        let end = traj.first().state;
        let d1 = end[1] - seed.eval_tail(end[0]).0.w;
        acc += ln(abs(d1 / d0));
        z = end[0];
        out.push([separation_model(p, z), acc]);
    }
    Ok(out)
}

/// Slope of `ln growth` against the model rate, by least squares.
pub fn separation_slope(points: &[[f64; 2]]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|q| q[0]).collect();
    let ys: Vec<f64> = points.iter().map(|q| q[1]).collect();
    least_squares(&xs, &ys).0
}

// ---------------------------------------------------------------------------
// steady

/// Grid of sweep starts: `nz` log-spaced `z` by `nw` linear `w`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepSpec {
    pub z_range: [f64; 2],
    pub w_range: [f64; 2],
    pub nz: usize,
    pub nw: usize,
    pub log_z: bool,
    pub stop: StopSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            z_range: [1e-2, 1e2],
            w_range: [-5.0, 5.0],
            nz: 10,
            nw: 10,
            log_z: true,
            stop: StopSpec { max_span: 200.0, max_steps: 50_000, max_step: 0.5, ..StopSpec::default() }
                .with_events(&[EventKind::ZAxisCrossing, EventKind::S1Crossing]),
        }
    }
}

fn lerp(a: f64, b: f64, i: usize, m: usize) -> f64 {
    if m <= 1 {
        return a;
    }
    a + (b - a) * i as f64 / (m - 1) as f64
}

impl SweepSpec {
    /// Starts in row-major order (`z` outer), and the starts left out
    /// because they lie on the invariant line `w = 1` (`n = 6`).
    pub fn starts(&self, p: &SolitonParams) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
        let mut keep = Vec::new();
        let mut skip = Vec::new();
        for i in 0..self.nz {
            let z = if self.log_z {
                exp(lerp(ln(self.z_range[0]), ln(self.z_range[1]), i, self.nz))
            } else {
                lerp(self.z_range[0], self.z_range[1], i, self.nz)
            };
            for j in 0..self.nw {
                let w = lerp(self.w_range[0], self.w_range[1], j, self.nw);
                if p.n() == 6 && abs(w - p.lambda()) <= 1e-6 {
                    skip.push([z, w]);
                } else {
                    keep.push([z, w]);
                }
            }
        }
        (keep, skip)
    }
}

fn steady_end_case(traj: &Trajectory, end: End, v: &CompletenessVerdict) -> SteadyCase {
    if v.verdict != Verdict::Converges {
        return SteadyCase::Unclassified;
    }
    let (term, s) = match end {
        End::TowardSmallEnd => (traj.head, traj.first().state),
        End::TowardLargeEnd => (traj.terminal, traj.last().state),
    };
    match term {
        Terminal::HitBoundary if abs(s[1]) > 1e-8 => SteadyCase::WAxisHit,
        Terminal::HitBoundary | Terminal::ConvergedToCriticalPoint => SteadyCase::OriginHit,
        _ if s[1] < 0.0 && v.exponent.is_some() => SteadyCase::FourthQuadrantDecay,
        _ => SteadyCase::OtherConvergent,
    }
}

/// `w + z` falls along the last decade of `z` toward the given end.
fn below_diagonal_trend(traj: &Trajectory, end: End) -> bool {
    let ss: Vec<&Sample> = match end {
        End::TowardSmallEnd => traj.samples.iter().collect(),
        End::TowardLargeEnd => traj.samples.iter().rev().collect(),
    };
    let z_end = ss[0].state[0];
    let mut prev: Option<f64> = None;
    for s in ss.iter().take_while(|s| s.state[0] >= z_end / 10.0) {
        let d = s.state[0] + s.state[1];
        // walking away from the end, so w + z grows
        if let Some(pd) = prev {
            if d < pd - 1e-9 * abs(pd).max(1.0) {
                return false;
            }
        }
        prev = Some(d);
    }
    true
}

/// Integrates one sweep start both ways and classifies its ends.
pub fn sweep_start(p: &SolitonParams, start: [f64; 2], stop: &StopSpec) -> (SweepEntry, Option<Trajectory>) {
    let failed = |note: String| SweepEntry {
        start,
        case: SteadyCase::Unclassified,
        completeness: Vec::new(),
        passed: false,
        vertical_asymptote: false,
        note,
    };
    let traj = match integrate_both(VectorFieldId::ZW, p, start, stop) {
        Ok(t) => t,
        Err(e) => return (failed(format!("integration failed: {e}")), None),
    };
    let mut verdicts = Vec::new();
    let mut case = SteadyCase::Unclassified;
    let mut notes: Vec<String> = Vec::new();
    for end in [End::TowardSmallEnd, End::TowardLargeEnd] {
        match completeness_integral(&traj, p, end) {
            Ok(v) => {
                let c = steady_end_case(&traj, end, &v);
                if c == SteadyCase::FourthQuadrantDecay && p.n() == 6 && !below_diagonal_trend(&traj, end) {
                    notes.push(String::from("w + z does not decrease toward the fourth-quadrant end"));
                }
                if c != SteadyCase::Unclassified && (case == SteadyCase::Unclassified || (c as u8) < (case as u8)) {
                    case = c;
                }
                verdicts.push(v);
            }
            Err(e) => notes.push(format!("{end:?}: {e}")),
        }
    }
    let vertical = [(traj.head, traj.first().state), (traj.terminal, traj.last().state)]
        .iter()
        .any(|(t, s)| *t == Terminal::Escaped && s[0] < 1.0);
    if vertical {
        notes.push(String::from("an end has the w-axis as vertical asymptote"));
    }
    let passed = verdicts.iter().any(|v| v.verdict == Verdict::Converges);
    let entry = SweepEntry {
        start,
        case,
        completeness: verdicts,
        passed,
        vertical_asymptote: vertical,
        note: notes.join("; "),
    };
    (entry, Some(traj))
}

/// Folds per-start results into the sweep certificate.
pub fn assemble_sweep(
    p: &SolitonParams,
    spec: &SweepSpec,
    results: Vec<(SweepEntry, Option<Trajectory>)>,
    skipped: Vec<[f64; 2]>,
) -> SolitonCertificate {
    let mut cert = SolitonCertificate::new(p, CertificateKind::SteadySweep, spec.stop.tol);
    cert.phi_positive = true;
    for (e, t) in results {
        cert.sweep.push(e);
        if let Some(t) = t {
            cert.trajectories.push(t);
        }
    }
    let all = !cert.sweep.is_empty() && cert.sweep.iter().all(|e| e.passed);
    cert.verdict = if all { CertificateVerdict::NoCompleteNonProduct } else { CertificateVerdict::Inconclusive };
    let count = |c: SteadyCase| cert.sweep.iter().filter(|e| e.case == c).count();
    cert.notes.push(format!(
        "{} starts: {} w-axis hits, {} origin hits, {} fourth-quadrant decays, {} other, {} unclassified",
        cert.sweep.len(),
        count(SteadyCase::WAxisHit),
        count(SteadyCase::OriginHit),
        count(SteadyCase::FourthQuadrantDecay),
        count(SteadyCase::OtherConvergent),
        count(SteadyCase::Unclassified)
    ));
    if !skipped.is_empty() {
        cert.notes.push(format!("{} starts on the invariant line w = lambda skipped", skipped.len()));
    }
    if cert.sweep.iter().any(|e| e.vertical_asymptote) {
        cert.notes.push(String::from("some trajectory has the w-axis as vertical asymptote"));
    }
    cert.skipped = skipped;
    cert
}

/// Runs the sweep sequentially; see [`sweep_start`] for parallel use.
pub fn certify_steady_nonexistence(p: &SolitonParams, spec: &SweepSpec) -> Result<SolitonCertificate> {
    if p.regime() != Regime::Steady {
        return Err(Error::WrongRegime("steady"));
    }
    let (starts, skipped) = spec.starts(p);
    let results = starts.iter().map(|&s| sweep_start(p, s, &spec.stop)).collect();
    Ok(assemble_sweep(p, spec, results, skipped))
}

// ---------------------------------------------------------------------------
// rotational

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotationalOptions {
    pub terms: usize,
    /// Seed abscissa `x = phi`; `min(0.1, validity / 20)` when absent.
    pub x_seed: Option<f64>,
    pub tol: Tolerances,
    pub max_dr: f64,
    /// Relative part of the `r` step cap, for runs whose `r` grows large.
    pub max_dr_rel: f64,
    /// Escape radius in `x` for runs without an interior critical point.
    /// Kept moderate: the slow decay `y ~ Rbar/x^2` is stiff.
    pub escape_radius: f64,
    pub max_steps: usize,
}

impl Default for RotationalOptions {
    fn default() -> Self {
        RotationalOptions {
            terms: 12,
            x_seed: None,
            tol: Tolerances::default(),
            max_dr: 5e-4,
            max_dr_rel: 1e-3,
            escape_radius: 30.0,
            max_steps: 2_000_000,
        }
    }
}

/// Simpson quadrature of `g` over `[0, b]`.
fn simpson(g: impl Fn(f64) -> f64, b: f64, m: usize) -> f64 {
    let h = b / (2 * m) as f64;
    let mut acc = g(0.0) + g(b);
    for k in 1..2 * m {
        acc += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Shoots the rotationally symmetric soliton along the unstable manifold
/// of `(0, 1)` in the `(x, y)` chart.
pub fn find_rotational(p: &SolitonParams, opts: &RotationalOptions) -> Result<SolitonCertificate> {
    let nf = p.nf();
    let k = (nf - 1.0) * (nf - 2.0);
    if abs(p.rbar() - k) > 1e-12 * k {
        return Err(Error::InconsistentParams("rotational normalization needs Rbar = (n-1)(n-2)"));
    }
    let seed = rotational_saddle_seed(p, opts.terms)?;
    let x_s = opts.x_seed.unwrap_or_else(|| (0.05 * seed.validity_hint).min(0.1));
    if !(x_s >= 0.0) || !x_s.is_finite() {
        return Err(Error::SeedRejected { z: x_s });
    }
    let y_s = seed.eval_rotational(x_s).0;
    if x_s > 0.0 && !(abs(seed.residual(x_s)) <= 1e-10) {
        return Err(Error::SeedRejected { z: x_s });
    }

    let mut stop = StopSpec {
        max_span: f64::INFINITY,
        max_steps: opts.max_steps,
        escape_radius: opts.escape_radius,
        tol: opts.tol,
        max_dr: opts.max_dr,
        max_dr_rel: opts.max_dr_rel,
        ..StopSpec::default()
    }
    .with_events(&[EventKind::ZAxisCrossing]);
    for c in critical_points(VectorFieldId::XY, p) {
        let at = c.location.coords();
        if at[0] > 0.0 {
            stop.targets.push(Target::Point { at, radius: 1e-6, field_tol: Some(1e-6) });
            stop.escape_radius = stop.escape_radius.max(10.0 * at[0]);
        }
    }
    let traj = integrate(VectorFieldId::XY, p, [x_s, y_s], Direction::Forward, &stop)?;
    if traj.samples.len() < 2 {
        return Err(Error::ClassificationFailed("seed is a rest point"));
    }

    let mut cert = SolitonCertificate::new(p, CertificateKind::Rotational, opts.tol);
    let r_seed = simpson(|x| 1.0 / seed.eval_rotational(x).0, x_s, 32);
    let f_seed = simpson(|x| x / seed.eval_rotational(x).0, x_s, 32);
    cert.notes.push(format!("seeded at phi = {x_s:e} from {} series terms", opts.terms));

    let pole = CompletenessVerdict {
        direction: End::TowardSmallEnd,
        verdict: Verdict::Diverges,
        numeric_tail: r_seed,
        rate_model: String::from("smooth closing point: phi(0) = 0, phi'(0) = 1"),
        exponent: None,
        coefficient: None,
        window_samples: 0,
    };
    let large = completeness_integral(&traj, p, End::TowardLargeEnd)?;
    match traj.terminal {
        Terminal::ConvergedToCriticalPoint => cert.notes.push(String::from("approaches the interior critical point")),
        Terminal::Escaped => cert.notes.push(String::from("escapes to large phi")),
        t => cert.notes.push(format!("run ended with {t:?}")),
    }
    cert.completeness = vec![pole, large];
    cert.crossings = upward_crossings(&traj);
    cert.phi_positive = traj.samples.iter().all(|s| s.state[0] > 0.0) && traj.terminal != Terminal::HitBoundary;
    let profile = reconstruct_warp(&traj, p, Anchor::PhiZero { r_seed, f_seed })?;
    cert.residual_max = Some(profile_residual(&profile, p));
    cert.profile = Some(profile);
    cert.trajectories.push(traj);
    cert.settle(true);
    Ok(cert)
}

/// Location of a rest point, in `(z, w)` when it has one.
pub fn location_zw(p: &SolitonParams, loc: &Location) -> Option<PhasePoint> {
    match loc {
        Location::ZW(q) => Some(*q),
        Location::Chart(c) => {
            let vf = match c.chart {
                crate::params::Chart::XY => VectorFieldId::XY,
                crate::params::Chart::UW => VectorFieldId::uw_for(p),
            };
            to_zw(vf, p, [c.first, c.second])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_profile_has_no_residual() {
        let p = SolitonParams::shrinking(6, 1.0).unwrap();
        let prof = product_profile(&p, 10.0, 11).unwrap();
        assert!(profile_residual(&prof, &p) <= 1e-12);
        let phi0 = powf(40.0, 0.25);
        assert!((prof.grid[0].phi - phi0).abs() < 1e-12);
    }

    #[test]
    fn rest_point_reconstructs_to_product() {
        let p = SolitonParams::shrinking(6, 2.0).unwrap();
        let t = integrate(VectorFieldId::ZW, &p, [p.xi(), 0.0], Direction::Forward, &StopSpec::default()).unwrap();
        let prof = reconstruct_warp(&t, &p, Anchor::Start).unwrap();
        let phi0 = powf(40.0 * p.xi(), 0.25);
        assert!((prof.grid[0].phi - phi0).abs() < 1e-12);
        assert!((prof.scalar_curvature[0] - p.rho()).abs() < 1e-15);
    }

    #[test]
    fn tail_samples_are_on_the_series() {
        let p = SolitonParams::shrinking(6, 1.0).unwrap();
        let seed = shrink_tail_seed(&p, 12).unwrap();
        let s = tail_samples(&seed, &p, 1e3, 1e4, 50);
        assert_eq!(s.len(), 50);
        assert!((s[0].state[0] - 1e4).abs() < 1e-6);
        // params decrease toward larger z, in order
        assert!(s.windows(2).all(|q| q[0].param < q[1].param));
        assert!(s.iter().all(|q| q.r < 0.0 && q.aux == q.param));
    }
}
