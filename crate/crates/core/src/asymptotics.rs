//! Series seeds at the singular ends of the phase plane, and the
//! completeness test.
//!
//! Every expansion here only involves every fourth power of its base
//! variable (every second one for the rotational seed), so coefficients are
//! stored in the reduced variable `zeta = base^stride`:
//!
//! * origin, `u = z^(1/(n+2))`: `w = u^(n-2) sum a_k u^(4k)`;
//! * tail, `x = z^(-1/(n+2))`: `1/w = x^(n-2) sum a_k x^(4k)`, `a_0 = -1`;
//! * rotational, `x = phi`: `y = sum a_k x^(2k)`, `a_0 = 1`.
//!
//! For `n = 6` the tail coefficients coincide with the classical ones in
//! `y = sqrt(z)/w` as a series in `1/sqrt(z)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynsys::VectorFieldId;
use crate::error::{Error, Result};
use crate::integrate::{Terminal, Trajectory};
use crate::math::{abs, exp, ln, powf, powi, sqrt};
use crate::params::{phi_fn, PhasePoint, Regime, SolitonParams};
use crate::poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SeriesKind {
    SteadyOrigin,
    ShrinkOrigin,
    ShrinkTail,
    RotationalSaddle,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesSeed {
    pub kind: SeriesKind,
    /// Human-readable description of the expansion variable.
    pub variable: String,
    /// Power of the base variable between consecutive coefficients.
    pub stride: u32,
    pub coeffs: Vec<f64>,
    pub truncation: usize,
    /// Radius in the base variable inside which the truncated series is
    /// used (`f64::INFINITY` when the series terminates).
    pub validity_hint: f64,
    pub params: SolitonParams,
}

/// Smallest-term heuristic in the reduced variable: the largest radius at
/// which the trailing half of the retained terms still decreases.
fn reduced_radius(c: &[f64]) -> f64 {
    let last = c.len() - 1;
    let mut rad = f64::INFINITY;
    for k in (last / 2).max(1)..=last {
        if c[k] != 0.0 && c[k - 1] != 0.0 {
            rad = rad.min(abs(c[k - 1] / c[k]));
        }
    }
    rad
}

impl SeriesSeed {
    fn finish(kind: SeriesKind, variable: &str, stride: u32, coeffs: Vec<f64>, params: SolitonParams) -> Self {
        let red = reduced_radius(&coeffs);
        SeriesSeed {
            kind,
            variable: String::from(variable),
            stride,
            truncation: coeffs.len(),
            validity_hint: powf(red, 1.0 / stride as f64),
            coeffs,
            params,
        }
    }

    /// Coefficients in powers of the base variable, zeros included.
    pub fn base_coeffs(&self) -> Vec<f64> {
        let mut out = vec![0.0; (self.coeffs.len() - 1) * self.stride as usize + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k * self.stride as usize] = c;
        }
        out
    }

    /// `(w, dw/du)` of an origin seed.
    pub fn eval_origin(&self, u: f64) -> (f64, f64) {
        let m = self.params.n() - 2;
        let zeta = powi(u, 4);
        let big_w = poly::eval(&self.coeffs, zeta);
        let dbig_w = poly::eval_deriv(&self.coeffs, zeta) * 4.0 * powi(u, 3);
        let um = powi(u, m);
        (um * big_w, m as f64 * powi(u, m - 1) * big_w + um * dbig_w)
    }

    /// Point `(z, w)` on the tail seed and the slope `dw/dz` there.
    pub fn eval_tail(&self, z: f64) -> (PhasePoint, f64) {
        let p = &self.params;
        let e = p.e_rho();
        let c = 4.0 / (p.nf() + 2.0);
        let zeta = powf(z, -c);
        let y = poly::eval(&self.coeffs, zeta);
        let dy = poly::eval_deriv(&self.coeffs, zeta);
        let ze = powf(z, e);
        let w = ze / y;
        // dzeta/dz = -c zeta / z
        let dw = e * ze / (z * y) + ze * dy * c * zeta / (z * y * y);
        (PhasePoint::new(z, w), dw)
    }

    /// `(y, dy/dx)` of the rotational seed.
    pub fn eval_rotational(&self, x: f64) -> (f64, f64) {
        let zeta = x * x;
        (poly::eval(&self.coeffs, zeta), poly::eval_deriv(&self.coeffs, zeta) * 2.0 * x)
    }

    /// Smallest `z` at which the tail seed is used.
    pub fn tail_min_z(&self) -> f64 {
        if self.validity_hint.is_infinite() {
            return 0.0;
        }
        powf(self.validity_hint, -(self.params.nf() + 2.0))
    }

    /// Residual of the defining equation at the given base-variable point,
    /// from the truncated series and its exact derivative.
    pub fn residual(&self, at: f64) -> f64 {
        let p = &self.params;
        let nf = p.nf();
        let n = p.n();
        match self.kind {
            SeriesKind::SteadyOrigin | SeriesKind::ShrinkOrigin => {
                let sigma = if self.kind == SeriesKind::ShrinkOrigin { 1.0 } else { 0.0 };
                let u = at;
                let (w, dw) = self.eval_origin(u);
                w * dw
                    - (nf + 2.0) * (p.lambda() * powi(u, 2 * n - 5) - sigma * powi(u, 2 * n - 1) - powi(u, n + 1) * w)
            }
            SeriesKind::ShrinkTail => {
                let z = powf(at, -(nf + 2.0));
                let (q, dw) = self.eval_tail(z);
                let phi = phi_fn(p, z).unwrap_or(f64::NAN);
                q.w * dw + q.w - phi
            }
            SeriesKind::RotationalSaddle => {
                let (y, dy) = self.eval_rotational(at);
                2.0 * (nf - 1.0) * at * y * dy - (p.rbar() - (nf - 1.0) * (nf - 2.0) * y * y - at * at * (y + p.rho()))
            }
        }
    }
}

/// Origin coefficients by power matching on
/// `m W^2 + u W W' = (n+2)(lambda - u^4 W - sigma u^4)`, `w = u^m W`.
fn origin_coeffs(p: &SolitonParams, sigma: f64, terms: usize) -> Vec<f64> {
    let m = p.nf() - 2.0;
    let np2 = p.nf() + 2.0;
    let a0 = sqrt(np2 * p.lambda() / m);
    let len = 4 * (terms - 1) + 1;
    let full = poly::match_powers(&[a0], len, |c| {
        let l = c.len();
        let w2 = poly::mul(c, c, l);
        let wdw = poly::mul(c, &poly::euler(c), l);
        let mut r = vec![0.0; l];
        poly::axpy(&mut r, m, &w2);
        poly::axpy(&mut r, 1.0, &wdw);
        r[0] -= np2 * p.lambda();
        poly::axpy(&mut r, np2, &poly::shift(c, 4, l));
        if l > 4 {
            r[4] += np2 * sigma;
        }
        r
    });
    full.iter().step_by(4).copied().collect()
}

/// Near-origin series of the steady `(u, w)` system, positive branch.
pub fn steady_origin_seed(p: &SolitonParams, terms: usize) -> Result<SeriesSeed> {
    if p.regime() != Regime::Steady {
        return Err(Error::WrongRegime("steady"));
    }
    if terms < 1 {
        return Err(Error::InvalidTerms);
    }
    let c = origin_coeffs(p, 0.0, terms);
    Ok(SeriesSeed::finish(SeriesKind::SteadyOrigin, "u = z^(1/(n+2)); w = u^(n-2) sum a_k u^(4k)", 4, c, *p))
}

/// Near-origin series of the shrinking `(u, w)` system; needs `n >= 7`.
pub fn shrink_origin_seed(p: &SolitonParams, terms: usize) -> Result<SeriesSeed> {
    if !p.is_shrinking() {
        return Err(Error::WrongRegime("shrinking"));
    }
    if p.n() <= 6 {
        return Err(Error::InvalidDimension(p.n()));
    }
    if terms < 1 {
        return Err(Error::InvalidTerms);
    }
    let c = origin_coeffs(p, 1.0, terms);
    Ok(SeriesSeed::finish(SeriesKind::ShrinkOrigin, "u = z^(1/(n+2)); w = u^(n-2) sum a_k u^(4k)", 4, c, *p))
}

fn sum2(a: &[f64], k: usize, below: usize) -> f64 {
    (0..=k).filter(|&i| i < below && k - i < below).map(|i| a[i] * a[k - i]).sum()
}

fn sum3(a: &[f64], k: usize, below: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..=k {
        for j in 0..=k - i {
            let l = k - i - j;
            if i < below && j < below && l < below {
                s += a[i] * a[j] * a[l];
            }
        }
    }
    s
}

/// `n = 6` tail coefficients from the classical recurrence
/// `2a_{i+1} = -(i+1)a_i + 2 lambda [a^3]_i - 2[a^2]_{i+1} - 2[a^3]_{i+1}`,
/// where the last two sums omit the products that contain `a_{i+1}`.
pub fn tail_coeffs_n6(lambda: f64, terms: usize) -> Vec<f64> {
    let mut a = vec![0.0; terms.max(1)];
    a[0] = -1.0;
    for i in 0..terms.saturating_sub(1) {
        let k = i + 1;
        a[k] = 0.5
            * (-(i as f64 + 1.0) * a[i] + 2.0 * lambda * sum3(&a, i, k) - 2.0 * sum2(&a, k, k) - 2.0 * sum3(&a, k, k));
    }
    a
}

/// Tail coefficients by power matching on
/// `x^(2n+1) y' = (n+2)((lambda x^4 - 1) y^3 - x^(n-2) y^2)` with
/// `y = x^(n-2) Y(x)`, i.e.
/// `(n+2)(Y^2 + Y^3 - lambda x^4 Y^3) + x^4 ((n-2) Y + x Y') = 0`.
pub fn tail_coeffs_matched(p: &SolitonParams, terms: usize) -> Vec<f64> {
    let np2 = p.nf() + 2.0;
    let m = p.nf() - 2.0;
    let lambda = p.lambda();
    let len = 4 * (terms.max(1) - 1) + 1;
    let full = poly::match_powers(&[-1.0], len, |c| {
        let l = c.len();
        let y2 = poly::mul(c, c, l);
        let y3 = poly::mul(&y2, c, l);
        let mut r = vec![0.0; l];
        poly::axpy(&mut r, np2, &y2);
        poly::axpy(&mut r, np2, &y3);
        poly::axpy(&mut r, -np2 * lambda, &poly::shift(&y3, 4, l));
        let mut lin = poly::euler(c);
        poly::axpy(&mut lin, m, c);
        poly::axpy(&mut r, 1.0, &poly::shift(&lin, 4, l));
        r
    });
    full.iter().step_by(4).copied().collect()
}

/// Asymptotic series of the shrinker trajectory at `z -> infinity`,
/// `w ~ -z^((n-2)/(n+2))`.
pub fn shrink_tail_seed(p: &SolitonParams, terms: usize) -> Result<SeriesSeed> {
    if !p.is_shrinking() {
        return Err(Error::WrongRegime("shrinking"));
    }
    if terms < 1 {
        return Err(Error::InvalidTerms);
    }
    let c = if p.n() == 6 { tail_coeffs_n6(p.lambda(), terms) } else { tail_coeffs_matched(p, terms) };
    Ok(SeriesSeed::finish(SeriesKind::ShrinkTail, "x = z^(-1/(n+2)); 1/w = x^(n-2) sum a_k x^(4k)", 4, c, *p))
}

/// Unstable manifold `y = 1 + a_1 x^2 + ...` of the saddle `(0, 1)` of the
/// `(x, y)` system, for parameters with `Rbar = (n-1)(n-2)`.
pub fn rotational_saddle_seed(p: &SolitonParams, terms: usize) -> Result<SeriesSeed> {
    if terms < 1 {
        return Err(Error::InvalidTerms);
    }
    let nf = p.nf();
    let k = (nf - 1.0) * (nf - 2.0);
    let y0 = sqrt(p.rbar() / k);
    let len = 2 * (terms - 1) + 1;
    let full = poly::match_powers(&[y0], len, |c| {
        let l = c.len();
        // 2(n-1) x y y' - Rbar + (n-1)(n-2) y^2 + x^2 (y + rho)
        let mut r = poly::mul(c, &poly::euler(c), l);
        for v in r.iter_mut() {
            *v *= 2.0 * (nf - 1.0);
        }
        poly::axpy(&mut r, k, &poly::mul(c, c, l));
        r[0] -= p.rbar();
        let mut yr = c.to_vec();
        yr[0] += p.rho();
        poly::axpy(&mut r, 1.0, &poly::shift(&yr, 2, l));
        r
    });
    let c: Vec<f64> = full.iter().step_by(2).copied().collect();
    Ok(SeriesSeed::finish(SeriesKind::RotationalSaddle, "x = phi; y = phi' = sum a_k x^(2k)", 2, c, *p))
}

/// Linearization of `(0, 1)`: unstable and stable eigenvalues, and the
/// unstable direction.
pub fn rotational_saddle_linearization(p: &SolitonParams) -> ([f64; 2], [f64; 2]) {
    let n = p.nf();
    let y0 = sqrt(p.rbar() / ((n - 1.0) * (n - 2.0)));
    ([2.0 * (n - 1.0) * y0, -2.0 * (n - 1.0) * (n - 2.0) * y0], [1.0, 0.0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum End {
    /// The first sample (smallest parameter).
    TowardSmallEnd,
    /// The last sample (largest parameter).
    TowardLargeEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompletenessVerdict {
    pub direction: End,
    pub verdict: Verdict,
    /// Part of the integral accumulated over the fit window (or the whole
    /// trajectory when no fit was needed).
    pub numeric_tail: f64,
    pub rate_model: String,
    /// Fitted exponent `p` of `|integrand| ~ c v^p`.
    pub exponent: Option<f64>,
    pub coefficient: Option<f64>,
    pub window_samples: usize,
}

const MARGIN: f64 = 0.05;
const MIN_WINDOW: usize = 10;

/// Abscissa and integrand of the completeness integral at a sample:
/// `(z, z^(-2/(n+2)) / w)` in the `(z, w)` and `(u, w)` charts, `(x, 1/y)`
/// in the `(x, y)` chart.
fn integrand(vf: VectorFieldId, p: &SolitonParams, s: [f64; 2]) -> (f64, f64) {
    let e = -2.0 / (p.nf() + 2.0);
    match vf {
        VectorFieldId::ZW => (s[0], powf(s[0], e) / s[1]),
        VectorFieldId::XY => (s[0], 1.0 / s[1]),
        _ => {
            let z = powi(s[0], p.n() + 2);
            (z, powf(z, e) / s[1])
        }
    }
}

fn at_origin(vf: VectorFieldId, p: &SolitonParams, s: [f64; 2]) -> bool {
    match vf {
        VectorFieldId::XY => s[0] <= 1e-12,
        VectorFieldId::ZW => s[0] <= powi(1e-3, p.n() + 2) && s[1].abs() <= 1e-3,
        _ => s[0] <= 1e-3 && s[1].abs() <= 1e-3,
    }
}

/// Classifies the completeness integral `I = int w^(-1) z^(-2/(n+2)) dz`
/// toward one end of `traj`.
///
/// Ends at an interior rest point diverge (the parameter is comparable with
/// `r` there); ends on the `w`-axis or at the origin converge. Other ends
/// are judged by a least-squares fit of `ln|integrand|` against the log
/// abscissa over the last decade: toward large abscissae the integral
/// diverges iff `p >= -1`, toward small abscissae it converges iff
/// `p > -1`, with a margin of 0.05 either way.
pub fn completeness_integral(traj: &Trajectory, p: &SolitonParams, direction: End) -> Result<CompletenessVerdict> {
    let vf = traj.vf;
    let samples = &traj.samples;
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { found: 0 });
    }
    let (term, order): (Terminal, Vec<usize>) = match direction {
        End::TowardSmallEnd => (traj.head, (0..samples.len()).collect()),
        End::TowardLargeEnd => (traj.terminal, (0..samples.len()).rev().collect()),
    };
    let end = samples[order[0]];
    let c_metric = if vf == VectorFieldId::XY { 1.0 } else { p.metric_constant() };
    let whole = abs(samples[samples.len() - 1].r - samples[0].r) / c_metric;
    let verdict = |v: Verdict, model: String| CompletenessVerdict {
        direction,
        verdict: v,
        numeric_tail: whole,
        rate_model: model,
        exponent: None,
        coefficient: None,
        window_samples: 0,
    };

    match term {
        Terminal::ConvergedToCriticalPoint => {
            return Ok(if at_origin(vf, p, end.state) {
                verdict(
                    Verdict::Converges,
                    format!("origin: integrand ~ z^(-{}/{}) at the small end", p.n(), p.n() + 2),
                )
            } else {
                verdict(Verdict::Diverges, String::from("interior critical point: s comparable to r"))
            });
        }
        Terminal::HitBoundary => {
            return Ok(if end.state[1].abs() > 1e-8 {
                verdict(Verdict::Converges, String::from("finite endpoint on the w-axis, bounded 1/w"))
            } else {
                verdict(
                    Verdict::Converges,
                    format!("origin: integrand ~ z^(-{}/{}) at the small end", p.n(), p.n() + 2),
                )
            });
        }
        _ => {}
    }

    let v_of = |i: usize| integrand(vf, p, samples[i].state).0;
    let v_end = v_of(order[0]);
    let (vmin, vmax) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| {
        let v = integrand(vf, p, s.state).0;
        (a.min(v), b.max(v))
    });
    let large = if v_end >= vmax {
        true
    } else if v_end <= vmin {
        false
    } else {
        return Ok(verdict(Verdict::Inconclusive, String::from("end is not an extreme abscissa of the trajectory")));
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut r_window = end.r;
    for &i in &order {
        let (v, f) = integrand(vf, p, samples[i].state);
        let inside = if large { v >= v_end / 10.0 } else { v <= v_end * 10.0 };
        if !inside || !(v > 0.0) || !(f.is_finite()) || f == 0.0 {
            break;
        }
        xs.push(ln(v));
        ys.push(ln(abs(f)));
        r_window = samples[i].r;
    }
    if xs.len() < MIN_WINDOW {
        return Err(Error::InsufficientSamples { found: xs.len() });
    }
    let (slope, icpt) = least_squares(&xs, &ys);
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let v = if span < core::f64::consts::LN_2 {
        Verdict::Inconclusive
    } else if large {
        if slope >= -1.0 + MARGIN {
            Verdict::Diverges
        } else if slope <= -1.0 - MARGIN {
            Verdict::Converges
        } else {
            Verdict::Inconclusive
        }
    } else if slope >= -1.0 + MARGIN {
        Verdict::Converges
    } else if slope <= -1.0 - MARGIN {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    };
    let var = if vf == VectorFieldId::XY { "x" } else { "z" };
    Ok(CompletenessVerdict {
        direction,
        verdict: v,
        numeric_tail: abs(end.r - r_window) / c_metric,
        rate_model: format!(
            "|integrand| ~ {:.6e} {}^{:.4} over the last decade toward {} {}",
            exp(icpt),
            var,
            slope,
            if large { "large" } else { "small" },
            var
        ),
        exponent: Some(slope),
        coefficient: Some(exp(icpt)),
        window_samples: xs.len(),
    })
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    (slope, my - slope * mx)
}
