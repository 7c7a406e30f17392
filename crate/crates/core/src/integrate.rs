//! Adaptive integration with event location.
//!
//! [`integrate`] runs a Dormand-Prince 5(4) pair on one of the systems in
//! [`crate::dynsys`]. Besides the two phase variables it carries
//!
//! * `r`, the arclength of the base line, so `phi(r)` can be rebuilt, and
//! * an auxiliary quantity: the parameter `s` of the `(z, w)` system for the
//!   `(z, w)` and `(u, w)` charts, or the potential `f` (with `f' = phi`)
//!   for the `(x, y)` chart.
//!
//! `(z, w)` runs are hybrid: below `z = z_switch` the state moves to the
//! `(u, w)` chart, where the field is polynomial and the `w`-axis is an
//! ordinary line, and it moves back once `z > 2 z_switch`. Samples are
//! always reported as `(z, w)` against `s`.
//!
//! Events are located by bisection on sub-steps of the accepted step, i.e.
//! each probe is a fresh Runge-Kutta step from the step start.

use alloc::vec;
use alloc::vec::Vec;

use crate::dynsys::{rhs, trap_signed_distance, uw_rhs, uw_sigma, xy_rhs, VectorFieldId};
use crate::error::{Error, Result};
use crate::math::{hypot, powf, powi};
use crate::params::{chart_constant, phi_fn, PhasePoint, SolitonParams};
use crate::rk::{self, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// Event kinds, in the order used to break ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EventKind {
    /// First coordinate vanishes: `z = 0` (`u = 0`), or `x = 0`.
    WAxisCrossing,
    /// Second coordinate vanishes: `w = 0`, or `y = 0`.
    ZAxisCrossing,
    /// `w = Phi(z)`.
    S1Crossing,
    TrapEntry,
    TrapExit,
    Escape,
    Convergence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Event {
    pub kind: EventKind,
    pub param: f64,
    pub state: [f64; 2],
    /// The defining function increases through zero as the parameter grows.
    pub rising: bool,
}

/// How one end of a trajectory came about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Terminal {
    ConvergedToCriticalPoint,
    Escaped,
    HitBoundary,
    MaxSteps,
    MaxSpan,
    /// The end is the prescribed start point.
    Seed,
    /// The end continues analytically along an asymptotic series.
    AsymptoticTail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub param: f64,
    pub state: [f64; 2],
    /// Base arclength, relative to the start point.
    pub r: f64,
    /// Parameter `s` for `(z, w)`/`(u, w)` runs, potential `f` for `(x, y)`.
    pub aux: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { atol: 1e-10, rtol: 1e-10 }
    }
}

/// A rest point to stop at.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Target {
    /// Point of the run's own chart (`(z, w)` for hybrid runs). Reached when
    /// the state is within `radius` and, if given, the field norm is below
    /// `field_tol`.
    Point { at: [f64; 2], radius: f64, field_tol: Option<f64> },
    /// Origin of the `(u, w)` chart, measured in `(u, w)`.
    UwOrigin { radius: f64 },
}

impl Target {
    /// `(xi, 0)` with the default ball and field tolerance.
    pub fn xi(p: &SolitonParams) -> Self {
        Target::Point { at: [p.xi(), 0.0], radius: 1e-6, field_tol: Some(1e-6) }
    }

    pub fn uw_origin() -> Self {
        Target::UwOrigin { radius: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StopSpec {
    /// Largest allowed change of the parameter (`s` for hybrid runs).
    pub max_span: f64,
    pub max_steps: usize,
    /// Escape when `max(first, |second|) >= escape_radius`.
    pub escape_radius: f64,
    pub targets: Vec<Target>,
    pub events: Vec<EventKind>,
    pub tol: Tolerances,
    /// Cap on the step in the reported parameter.
    pub max_step: f64,
    /// Cap on the change of `r` per step: `max(max_dr, max_dr_rel |r|)`.
    pub max_dr: f64,
    pub max_dr_rel: f64,
    /// `z` below which hybrid runs use the `(u, w)` chart; `0` disables.
    pub z_switch: f64,
}

impl Default for StopSpec {
    fn default() -> Self {
        StopSpec {
            max_span: 1e4,
            max_steps: 200_000,
            escape_radius: 1e6,
            targets: Vec::new(),
            events: vec![EventKind::ZAxisCrossing, EventKind::S1Crossing],
            tol: Tolerances::default(),
            max_step: f64::INFINITY,
            max_dr: f64::INFINITY,
            max_dr_rel: 0.0,
            z_switch: 0.05,
        }
    }
}

impl StopSpec {
    pub fn with_target(mut self, t: Target) -> Self {
        self.targets.push(t);
        self
    }

    pub fn with_events(mut self, ev: &[EventKind]) -> Self {
        self.events = ev.to_vec();
        self
    }

    pub fn with_span(mut self, span: f64) -> Self {
        self.max_span = span;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub vf: VectorFieldId,
    pub params: SolitonParams,
    /// Strictly increasing in `param`.
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    /// Status at the first sample.
    pub head: Terminal,
    /// Status at the last sample.
    pub terminal: Terminal,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    /// Events of one kind, optionally filtered by sense.
    pub fn events_of(&self, kind: EventKind, rising: Option<bool>) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind && rising.is_none_or(|r| e.rising == r))
    }

    /// State at `param` by cubic Hermite interpolation between samples.
    pub fn at(&self, param: f64) -> Option<[f64; 2]> {
        let s = &self.samples;
        if s.is_empty() || param < s[0].param || param > s[s.len() - 1].param {
            return None;
        }
        let i = s.partition_point(|q| q.param <= param);
        if i == s.len() {
            return Some(s[s.len() - 1].state);
        }
        let (a, b) = (&s[i - 1], &s[i]);
        let h = b.param - a.param;
        let th = (param - a.param) / h;
        let (da, db) = match (rhs(self.vf, &self.params, a.state), rhs(self.vf, &self.params, b.state)) {
            (Ok(da), Ok(db)) => (da, db),
            _ => {
                let lin = |k: usize| a.state[k] + th * (b.state[k] - a.state[k]);
                return Some([lin(0), lin(1)]);
            }
        };
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let f = |k: usize| h00 * a.state[k] + h10 * h * da[k] + h01 * b.state[k] + h11 * h * db[k];
        Some([f(0), f(1)])
    }

    /// Reverses a backward run so the parameter increases.
    fn reversed(mut self) -> Self {
        self.samples.reverse();
        self.events.reverse();
        self.head = self.terminal;
        self.terminal = Terminal::Seed;
        self
    }

    /// Joins a backward and a forward run from the same start point.
    pub fn join(backward: Trajectory, forward: Trajectory) -> Trajectory {
        let mut out = backward;
        out.samples.extend_from_slice(&forward.samples[1..]);
        out.events.extend(forward.events);
        out.terminal = forward.terminal;
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Zw,
    Uw,
    Xy,
}

struct Driver<'a> {
    p: &'a SolitonParams,
    vf: VectorFieldId,
    sigma: f64,
    sign: f64,
    hybrid: bool,
    c_metric: f64,
    e_r: f64,
}

impl Driver<'_> {
    fn deriv(&self, mode: Mode, y: &State) -> Result<State> {
        let p = self.p;
        let n = p.n();
        let nf = p.nf();
        let d = match mode {
            Mode::Zw => {
                let z = y[0];
                if !(z > 0.0) {
                    return Err(Error::Domain { what: "z", at: z });
                }
                [y[1], phi_fn(p, z)? - y[1], self.c_metric * powf(z, self.e_r), 1.0]
            }
            Mode::Uw => {
                let u = y[0];
                let [du, dw] = uw_rhs(p, self.sigma, u, y[1]);
                [du, dw, self.c_metric * (nf + 2.0) * powi(u, n - 1), (nf + 2.0) * powi(u, n + 1)]
            }
            Mode::Xy => {
                let [dx, dy] = xy_rhs(p, y[0], y[1]);
                [dx, dy, 2.0 * (nf - 1.0) * y[0], 2.0 * (nf - 1.0) * y[0] * y[0]]
            }
        };
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain { what: "rhs", at: y[0] });
        }
        Ok(d.map(|v| v * self.sign))
    }

    /// State in the coordinates reported for this run.
    fn report(&self, mode: Mode, y: &State) -> [f64; 2] {
        if self.hybrid && mode == Mode::Uw {
            [powi(y[0].max(0.0), self.p.n() + 2), y[1]]
        } else {
            [y[0], y[1]]
        }
    }

    fn zw(&self, mode: Mode, y: &State) -> Option<PhasePoint> {
        match mode {
            Mode::Zw => Some(PhasePoint::new(y[0], y[1])),
            Mode::Uw => (y[0] > 0.0).then(|| PhasePoint::new(powi(y[0], self.p.n() + 2), y[1])),
            Mode::Xy => crate::dynsys::to_zw(VectorFieldId::XY, self.p, [y[0], y[1]]),
        }
    }

    fn event_fn(&self, kind: EventKind, mode: Mode, y: &State) -> Option<f64> {
        match kind {
            EventKind::ZAxisCrossing => Some(y[1]),
            EventKind::WAxisCrossing => (mode != Mode::Zw).then_some(y[0]),
            EventKind::S1Crossing => {
                let q = self.zw(mode, y)?;
                Some(q.w - phi_fn(self.p, q.z).ok()?)
            }
            EventKind::TrapEntry | EventKind::TrapExit => {
                if !self.p.is_shrinking() {
                    return None;
                }
                let q = self.zw(mode, y)?;
                trap_signed_distance(self.p, q).ok()
            }
            EventKind::Escape | EventKind::Convergence => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Stop {
    Escape,
    Boundary,
    Span,
}

/// Integrates `vf` from `start` until a stop condition fires.
pub fn integrate(
    vf: VectorFieldId,
    p: &SolitonParams,
    start: [f64; 2],
    direction: Direction,
    stop: &StopSpec,
) -> Result<Trajectory> {
    let nf = p.nf();
    let hybrid = vf == VectorFieldId::ZW;
    let drv = Driver {
        p,
        vf,
        sigma: if hybrid { p.sigma() } else { uw_sigma(vf) },
        sign: direction.sign(),
        hybrid,
        c_metric: p.metric_constant(),
        e_r: -2.0 / (nf + 2.0),
    };
    // validates the start point
    let v0 = rhs(vf, p, start)?;

    let mut traj = Trajectory {
        vf,
        params: *p,
        samples: vec![Sample { param: 0.0, state: start, r: 0.0, aux: 0.0 }],
        events: Vec::new(),
        head: Terminal::Seed,
        terminal: Terminal::Seed,
    };
    if hypot(v0[0], v0[1]) <= 1e-14 {
        traj.terminal = Terminal::ConvergedToCriticalPoint;
        traj.events.push(Event { kind: EventKind::Convergence, param: 0.0, state: start, rising: false });
        return Ok(traj);
    }

    let mut mode = match vf {
        VectorFieldId::ZW => Mode::Zw,
        VectorFieldId::XY => Mode::Xy,
        _ => Mode::Uw,
    };
    let mut y: State = [start[0], start[1], 0.0, 0.0];
    if hybrid && stop.z_switch > 0.0 && start[0] < stop.z_switch {
        mode = Mode::Uw;
        y[0] = powf(start[0], 1.0 / (nf + 2.0));
    }
    // tau: internal time, always increasing
    let mut tau = 0.0f64;
    let param_of = |y: &State, tau: f64| -> f64 {
        if hybrid {
            y[3]
        } else {
            drv.sign * tau
        }
    };

    let mut k1 = drv.deriv(mode, &y)?;
    let h_init = 1e-2f64;
    let mut h = h_init;
    let mut steps = 0usize;

    loop {
        if steps >= stop.max_steps {
            traj.terminal = Terminal::MaxSteps;
            break;
        }
        // caps expressed through the current derivative
        let dparam = if hybrid { k1[3].abs() } else { 1.0 };
        let mut hmax = f64::INFINITY;
        if stop.max_step.is_finite() && dparam > 0.0 {
            hmax = hmax.min(stop.max_step / dparam);
        }
        if stop.max_dr.is_finite() && k1[2].abs() > 0.0 {
            hmax = hmax.min(stop.max_dr.max(stop.max_dr_rel * y[2].abs()) / k1[2].abs());
        }
        h = h.min(hmax);
        if h < 1e-14 * tau.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { param: param_of(&y, tau) });
        }

        let f = |_: f64, s: &State| drv.deriv(mode, s);
        let st = match rk::step(&f, tau, &y, &k1, h) {
            Ok(st) if st.y.iter().all(|v| v.is_finite()) => st,
            _ => {
                h *= 0.25;
                continue;
            }
        };
        let err = rk::error_norm(&st.err, &y, &st.y, stop.tol.atol, stop.tol.rtol);
        if !(err <= 1.0) {
            h *= rk::factor(err).min(1.0);
            continue;
        }
        steps += 1;

        // terminal conditions and events inside the step
        let p0 = param_of(&y, tau);
        let stop_fn = |kind: Stop, mode: Mode, s: &State, t: f64| -> Option<f64> {
            match kind {
                Stop::Escape => Some(
                    match mode {
                        Mode::Uw => s[1].abs(),
                        _ => s[0].max(s[1].abs()),
                    } - stop.escape_radius,
                ),
                Stop::Boundary => (mode != Mode::Zw).then(|| -s[0]),
                Stop::Span => Some(param_of(s, t).abs() - stop.max_span),
            }
        };
        let probe = |theta: f64| -> Option<State> {
            if theta == 1.0 {
                return Some(st.y);
            }
            rk::step(&f, tau, &y, &k1, theta * h).ok().map(|s| s.y)
        };
        let param_tol = 1e-12 * p0.abs().max(1.0);
        let dpar = (param_of(&st.y, tau + h) - p0).abs().max(1e-300);
        let locate = |g: &dyn Fn(&State, f64) -> Option<f64>, g0: f64| -> Option<(f64, State)> {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut ylo = y;
            let mut yhi = st.y;
            let mut ghi = g(&st.y, tau + h)?;
            let mut glo = g0;
            for _ in 0..200 {
                if (hi - lo) * dpar <= param_tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let ym = probe(mid)?;
                let gm = g(&ym, tau + mid * h)?;
                if (gm < 0.0) == (g0 < 0.0) && gm != 0.0 {
                    lo = mid;
                    ylo = ym;
                    glo = gm;
                } else {
                    hi = mid;
                    yhi = ym;
                    ghi = gm;
                }
            }
            Some(if glo.abs() < ghi.abs() { (lo, ylo) } else { (hi, yhi) })
        };

        let mut first_stop: Option<(f64, State, Stop)> = None;
        for kind in [Stop::Escape, Stop::Boundary, Stop::Span] {
            let g = |s: &State, t: f64| stop_fn(kind, mode, s, t);
            if let (Some(g0), Some(g1)) = (g(&y, tau), g(&st.y, tau + h)) {
                if g0 < 0.0 && g1 >= 0.0 {
                    if let Some((th, ys)) = locate(&g, g0) {
                        if first_stop.as_ref().is_none_or(|(t0, _, _)| th < *t0) {
                            first_stop = Some((th, ys, kind));
                        }
                    }
                }
            }
        }
        let theta_end = first_stop.as_ref().map_or(1.0, |(t, _, _)| *t);

        let mut found: Vec<(f64, Event)> = Vec::new();
        for &kind in &stop.events {
            let g = |s: &State, _t: f64| drv.event_fn(kind, mode, s);
            let (Some(g0), Some(g1)) = (g(&y, tau), g(&st.y, tau + h)) else { continue };
            let crossed = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
            if !crossed {
                continue;
            }
            let rising_tau = g1 > g0;
            match kind {
                EventKind::TrapEntry if !rising_tau => continue,
                EventKind::TrapExit if rising_tau => continue,
                _ => {}
            }
            if let Some((th, ys)) = locate(&g, g0) {
                if th <= theta_end {
                    let ev = Event {
                        kind,
                        param: param_of(&ys, tau + th * h),
                        state: drv.report(mode, &ys),
                        rising: rising_tau == (drv.sign > 0.0),
                    };
                    found.push((th, ev));
                }
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.kind.cmp(&b.1.kind)));
        traj.events.extend(found.into_iter().map(|(_, e)| e));

        if let Some((th, mut ys, kind)) = first_stop {
            if let Stop::Boundary = kind {
                ys[0] = 0.0;
            }
            let param = param_of(&ys, tau + th * h);
            let state = drv.report(mode, &ys);
            push_sample(&mut traj, param, state, &ys);
            traj.terminal = match kind {
                Stop::Escape => {
                    traj.events.push(Event { kind: EventKind::Escape, param, state, rising: drv.sign > 0.0 });
                    Terminal::Escaped
                }
                Stop::Boundary => {
                    traj.events.push(Event { kind: EventKind::WAxisCrossing, param, state, rising: drv.sign < 0.0 });
                    Terminal::HitBoundary
                }
                Stop::Span => Terminal::MaxSpan,
            };
            break;
        }

        tau += h;
        y = st.y;
        k1 = st.k7;
        let param = param_of(&y, tau);
        let state = drv.report(mode, &y);
        push_sample(&mut traj, param, state, &y);

        if reached_target(&drv, mode, &y, &stop.targets) {
            traj.events.push(Event { kind: EventKind::Convergence, param, state, rising: false });
            traj.terminal = Terminal::ConvergedToCriticalPoint;
            break;
        }

        h *= rk::factor(err);

        if hybrid && stop.z_switch > 0.0 {
            let switched = match mode {
                Mode::Zw if y[0] < stop.z_switch => {
                    y[0] = powf(y[0], 1.0 / (nf + 2.0));
                    Some(Mode::Uw)
                }
                Mode::Uw if powi(y[0], p.n() + 2) > 2.0 * stop.z_switch => {
                    y[0] = powi(y[0], p.n() + 2);
                    Some(Mode::Zw)
                }
                _ => None,
            };
            if let Some(m) = switched {
                mode = m;
                k1 = drv.deriv(mode, &y)?;
                h = h_init;
            }
        }
    }

    Ok(match direction {
        Direction::Forward => traj,
        Direction::Backward => traj.reversed(),
    })
}

fn push_sample(traj: &mut Trajectory, param: f64, state: [f64; 2], y: &State) {
    let aux = y[3];
    traj.samples.push(Sample { param, state, r: y[2], aux });
}

fn reached_target(drv: &Driver, mode: Mode, y: &State, targets: &[Target]) -> bool {
    targets.iter().any(|t| match *t {
        Target::UwOrigin { radius } => mode == Mode::Uw && hypot(y[0], y[1]) <= radius,
        Target::Point { at, radius, field_tol } => {
            let here = drv.report(mode, y);
            if hypot(here[0] - at[0], here[1] - at[1]) > radius {
                return false;
            }
            match field_tol {
                None => true,
                Some(tol) => match rhs(drv.vf, drv.p, here) {
                    Ok(v) => hypot(v[0], v[1]) <= tol,
                    Err(_) => false,
                },
            }
        }
    })
}

/// Both halves of the trajectory through `start`, joined at parameter 0.
pub fn integrate_both(vf: VectorFieldId, p: &SolitonParams, start: [f64; 2], stop: &StopSpec) -> Result<Trajectory> {
    let fwd = integrate(vf, p, start, Direction::Forward, stop)?;
    if fwd.terminal == Terminal::ConvergedToCriticalPoint && fwd.samples.len() == 1 {
        return Ok(fwd);
    }
    let bwd = integrate(vf, p, start, Direction::Backward, stop)?;
    Ok(Trajectory::join(bwd, fwd))
}

/// Outcome of [`first_return_z`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstReturn {
    /// Abscissa `z_b` of the next upward crossing of the `z`-axis.
    Crossing(f64),
    /// The run reached `(xi, 0)` without crossing the axis again.
    Converged,
}

/// Follows the shrinker trajectory through `(z0, 0)`, `0 < z0 < xi`, once
/// around `(xi, 0)` and returns where it next crosses the `z`-axis upward.
pub fn first_return_z(p: &SolitonParams, z0: f64) -> Result<FirstReturn> {
    if !p.is_shrinking() {
        return Err(Error::WrongRegime("shrinking"));
    }
    if z0 == p.xi() {
        return Err(Error::StartAtCriticalPoint);
    }
    if !(z0 > 0.0 && z0 < p.xi()) {
        return Err(Error::Domain { what: "z0", at: z0 });
    }
    let stop = StopSpec::default().with_events(&[EventKind::ZAxisCrossing]).with_target(Target::xi(p));
    let stop = StopSpec { max_span: f64::INFINITY, ..stop };
    let traj = integrate(VectorFieldId::ZW, p, [z0, 0.0], Direction::Forward, &stop)?;
    if let Some(e) = traj.events_of(EventKind::ZAxisCrossing, Some(true)).next() {
        let zb = e.state[0];
        if !(zb > z0) {
            return Err(Error::ReturnNotIncreasing { z0, zb });
        }
        return Ok(FirstReturn::Crossing(zb));
    }
    match traj.terminal {
        Terminal::ConvergedToCriticalPoint => Ok(FirstReturn::Converged),
        _ => Err(Error::NoReturn),
    }
}

/// Abscissae of the upward `z`-axis crossings, in order.
pub fn upward_crossings(traj: &Trajectory) -> Vec<f64> {
    traj.events_of(EventKind::ZAxisCrossing, Some(true)).map(|e| e.state[0]).collect()
}

/// `C K^(2/(n+2))`: the potential grows by this much per unit of `s`.
pub fn potential_rate(p: &SolitonParams) -> f64 {
    p.metric_constant() * powf(chart_constant(p.n()), 2.0 / (p.nf() + 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steady_n6_keeps_w_equal_one() {
        let p = SolitonParams::steady(6).unwrap();
        let stop = StopSpec::default().with_span(50.0);
        let t = integrate(VectorFieldId::ZW, &p, [1.0, 1.0], Direction::Forward, &stop).unwrap();
        assert_eq!(t.terminal, Terminal::MaxSpan);
        assert!((t.last().param - 50.0).abs() < 1e-9);
        for s in &t.samples {
            assert!((s.state[1] - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn rest_point_start() {
        let p = SolitonParams::shrinking(6, 1.0).unwrap();
        let t = integrate(VectorFieldId::ZW, &p, [1.0, 0.0], Direction::Forward, &StopSpec::default()).unwrap();
        assert_eq!(t.samples.len(), 1);
        assert_eq!(t.terminal, Terminal::ConvergedToCriticalPoint);
        assert!(matches!(first_return_z(&p, 1.0), Err(Error::StartAtCriticalPoint)));
    }

    #[test]
    fn hermite_reproduces_samples() {
        let p = SolitonParams::shrinking(6, 1.0).unwrap();
        let stop = StopSpec::default().with_span(3.0);
        let t = integrate(VectorFieldId::ZW, &p, [0.5, 0.0], Direction::Forward, &stop).unwrap();
        for s in &t.samples {
            let q = t.at(s.param).unwrap();
            assert!((q[0] - s.state[0]).abs() < 1e-12 && (q[1] - s.state[1]).abs() < 1e-12);
        }
        assert!(t.at(-1.0).is_none());
    }
}
