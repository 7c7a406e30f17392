//! Problem parameters, the driving function `Phi`, and the coordinate charts.
//!
//! Four charts appear in the reduction of the soliton ODE:
//!
//! * `(r, phi)`: the warp function itself, `phi(r) > 0`;
//! * `(x, y) = (phi, phi')`;
//! * `(z, w)` with `z = x^((n+2)/2) / ((n-1)(n+2))`, `w = y x^((n-2)/2)`;
//! * `(u, w)` with `u = z^(1/(n+2))`, which regularises the `w`-axis.
//!
//! All parameters are stored in normalized units. Steady solitons are
//! rescaled so that `lambda = 1`; shrinkers are rescaled so that
//! `rho = ((n-1)(n+2))^(-(n-2)/(n+2))`, which turns `Phi` into
//! `lambda z^((n-6)/(n+2)) - z^((n-2)/(n+2))`.

use crate::error::{Error, Result};
use crate::math::powf;

/// Sign class of the soliton constant `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Regime {
    Steady,
    Shrinking,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Steady => "steady",
            Regime::Shrinking => "shrinking",
        }
    }
}

/// A normalized problem instance.
///
/// `scale` is the ratio between the base scalar curvature that was supplied
/// and the normalized `rbar` stored here; it is `1` when the input was
/// already normalized. Converting reported `r` values back to the caller's
/// units is left to the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "ParamsRecord", into = "ParamsRecord")
)]
pub struct SolitonParams {
    n: u32,
    regime: Regime,
    rbar: f64,
    rho: f64,
    lambda: f64,
    xi: f64,
    scale: f64,
}

/// Wire form of [`SolitonParams`]; deserialization re-validates it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamsRecord {
    pub n: u32,
    pub regime: Regime,
    #[cfg_attr(feature = "serde", serde(rename = "Rbar"))]
    pub rbar: f64,
    pub rho: f64,
    pub lambda: f64,
    pub xi: f64,
    pub scale: f64,
}

impl From<SolitonParams> for ParamsRecord {
    fn from(p: SolitonParams) -> Self {
        ParamsRecord { n: p.n, regime: p.regime, rbar: p.rbar, rho: p.rho, lambda: p.lambda, xi: p.xi, scale: p.scale }
    }
}

impl TryFrom<ParamsRecord> for SolitonParams {
    type Error = Error;

    fn try_from(rec: ParamsRecord) -> Result<Self> {
        check_dimension(rec.n)?;
        if !(rec.rbar > 0.0) {
            return Err(Error::NonPositiveRbar(rec.rbar));
        }
        if !(rec.scale > 0.0) || !rec.scale.is_finite() {
            return Err(Error::InconsistentParams("scale must be positive"));
        }
        let expected_rho = match rec.regime {
            Regime::Steady => 0.0,
            Regime::Shrinking => normalized_rho(rec.n),
        };
        if !close(rec.rho, expected_rho) {
            return Err(Error::InconsistentParams("rho does not match the regime normalization"));
        }
        let mut p = SolitonParams::from_normalized(rec.n, rec.regime, rec.rbar);
        p.scale = rec.scale;
        if !close(p.lambda, rec.lambda) || !close(p.xi, rec.xi) {
            return Err(Error::InconsistentParams("lambda/xi do not match Rbar"));
        }
        Ok(p)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn check_dimension(n: u32) -> Result<()> {
    if n < 3 {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

/// `(n-1)(n+2)`, the constant that recurs in every chart change.
#[inline]
pub fn chart_constant(n: u32) -> f64 {
    let n = n as f64;
    (n - 1.0) * (n + 2.0)
}

/// The shrinker normalization `rho = ((n-1)(n+2))^(-(n-2)/(n+2))`.
pub fn normalized_rho(n: u32) -> f64 {
    let nf = n as f64;
    powf(chart_constant(n), -(nf - 2.0) / (nf + 2.0))
}

/// `A = ((n-1)(n+2))^((n-6)/(n+2))`, so that `lambda = A * Rbar`.
pub fn lambda_factor(n: u32) -> f64 {
    let nf = n as f64;
    powf(chart_constant(n), (nf - 6.0) / (nf + 2.0))
}

/// Builds normalized parameters.
///
/// For [`Regime::Shrinking`], `rbar` is taken relative to the normalized
/// `rho`; for [`Regime::Steady`], any positive `rbar` is rescaled to
/// `lambda = 1` and the factor is kept in `scale`.
pub fn make_params(n: u32, regime: Regime, rbar: f64) -> Result<SolitonParams> {
    check_dimension(n)?;
    if !(rbar > 0.0) || !rbar.is_finite() {
        return Err(Error::NonPositiveRbar(rbar));
    }
    Ok(match regime {
        Regime::Shrinking => SolitonParams::from_normalized(n, regime, rbar),
        Regime::Steady => {
            let normalized = 1.0 / lambda_factor(n);
            let mut p = SolitonParams::from_normalized(n, regime, normalized);
            p.scale = rbar / normalized;
            p
        }
    })
}

impl SolitonParams {
    fn from_normalized(n: u32, regime: Regime, rbar: f64) -> Self {
        let nf = n as f64;
        let lambda = rbar * lambda_factor(n);
        let (rho, xi) = match regime {
            Regime::Steady => (0.0, 0.0),
            Regime::Shrinking => (normalized_rho(n), powf(lambda, (nf + 2.0) / 4.0)),
        };
        SolitonParams { n, regime, rbar, rho, lambda, xi, scale: 1.0 }
    }

    /// Shrinker with the given normalized `lambda`.
    pub fn shrinking(n: u32, lambda: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveRbar(lambda));
        }
        let mut p = Self::from_normalized(n, Regime::Shrinking, lambda / lambda_factor(n));
        // keep the requested lambda bit-exact; Rbar carries the rounding instead
        p.lambda = lambda;
        p.xi = powf(lambda, (n as f64 + 2.0) / 4.0);
        Ok(p)
    }

    /// Steady soliton with `lambda = 1`.
    pub fn steady(n: u32) -> Result<Self> {
        check_dimension(n)?;
        make_params(n, Regime::Steady, 1.0 / lambda_factor(n))
    }

    /// Parameters in the caller's units: `rho = 0` is steady, `rho > 0`
    /// shrinking. Both are rescaled to the normalized form.
    pub fn from_physical(n: u32, rbar: f64, rho: f64) -> Result<Self> {
        check_dimension(n)?;
        if rho < 0.0 {
            return Err(Error::Expanding(rho));
        }
        if !(rbar > 0.0) || !rbar.is_finite() {
            return Err(Error::NonPositiveRbar(rbar));
        }
        if rho == 0.0 {
            return make_params(n, Regime::Steady, rbar);
        }
        // rescaling the metric keeps Rbar/rho fixed
        let c = rho / normalized_rho(n);
        let mut p = Self::from_normalized(n, Regime::Shrinking, rbar / c);
        p.scale = c;
        Ok(p)
    }

    /// Parameters for the rotationally symmetric soliton with the unit
    /// round sphere as fiber: `Rbar = (n-1)(n-2)`, so that `phi'(0) = 1`.
    /// For the steady case this fixes `lambda = A (n-1)(n-2)` rather than 1.
    pub fn rotational(n: u32, regime: Regime) -> Result<Self> {
        check_dimension(n)?;
        let nf = n as f64;
        Ok(Self::from_normalized(n, regime, (nf - 1.0) * (nf - 2.0)))
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn rbar(&self) -> f64 {
        self.rbar
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    /// Abscissa of the interior critical point `(xi, 0)`; zero when steady.
    pub fn xi(&self) -> f64 {
        self.xi
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_shrinking(&self) -> bool {
        self.regime == Regime::Shrinking
    }

    pub(crate) fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `(n-6)/(n+2)`.
    pub(crate) fn e_lambda(&self) -> f64 {
        (self.nf() - 6.0) / (self.nf() + 2.0)
    }

    /// `(n-2)/(n+2)`.
    pub(crate) fn e_rho(&self) -> f64 {
        (self.nf() - 2.0) / (self.nf() + 2.0)
    }

    /// Coefficient of `z^((n-2)/(n+2))` in `-Phi`: 1 for shrinkers, 0 for
    /// steady solitons.
    pub(crate) fn sigma(&self) -> f64 {
        match self.regime {
            Regime::Steady => 0.0,
            Regime::Shrinking => 1.0,
        }
    }

    /// `lambda > (n-2)/(n+2)`, the existence threshold for the shrinker.
    pub fn above_threshold(&self) -> bool {
        self.lambda > self.threshold()
    }

    /// `(n-2)/(n+2)`.
    pub fn threshold(&self) -> f64 {
        self.e_rho()
    }

    /// The same threshold stated in the original curvatures:
    /// `Rbar > rho (n-2)/(n+2) ((n-1)(n+2))^(4/(n+2))`.
    pub fn above_threshold_rbar(&self) -> bool {
        let nf = self.nf();
        let bound = self.rho * (nf - 2.0) / (nf + 2.0) * powf(chart_constant(self.n), 4.0 / (nf + 2.0));
        self.rbar > bound
    }

    /// Constant `C` in `dr = C z^(-2/(n+2)) ds` along a `(z, w)` trajectory.
    pub fn metric_constant(&self) -> f64 {
        let nf = self.nf();
        2.0 / (nf + 2.0) * powf(chart_constant(self.n), nf / (nf + 2.0))
    }

    /// Warp value at a rest point `(z, 0)`: `((n-1)(n+2) z)^(2/(n+2))`.
    pub fn phi_at(&self, z: f64) -> f64 {
        powf(chart_constant(self.n) * z, 2.0 / (self.nf() + 2.0))
    }
}

/// Driving function of the canonical Abel equation `w w' + w = Phi(z)`.
pub fn phi_fn(p: &SolitonParams, z: f64) -> Result<f64> {
    if z < 0.0 || !z.is_finite() || (z == 0.0 && p.n < 6) {
        return Err(Error::Domain { what: "Phi", at: z });
    }
    Ok(p.lambda * powf(z, p.e_lambda()) - p.sigma() * powf(z, p.e_rho()))
}

/// `Phi'(z)` for `z > 0`.
pub fn phi_prime(p: &SolitonParams, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain { what: "Phi'", at: z });
    }
    let (a, b) = (p.e_lambda(), p.e_rho());
    Ok(p.lambda * a * powf(z, a - 1.0) - p.sigma() * b * powf(z, b - 1.0))
}

/// `Phi''(z)` for `z > 0`.
pub fn phi_second(p: &SolitonParams, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain { what: "Phi''", at: z });
    }
    let (a, b) = (p.e_lambda(), p.e_rho());
    Ok(p.lambda * a * (a - 1.0) * powf(z, a - 2.0) - p.sigma() * b * (b - 1.0) * powf(z, b - 2.0))
}

/// A point of the `(z, w)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhasePoint {
    pub z: f64,
    pub w: f64,
}

impl PhasePoint {
    pub fn new(z: f64, w: f64) -> Self {
        PhasePoint { z, w }
    }

    /// Inside the open half-plane `z > 0`.
    pub fn in_half_plane(&self) -> bool {
        self.z > 0.0 && self.z.is_finite() && self.w.is_finite()
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.z, self.w]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Chart {
    XY,
    UW,
}

/// A point in the `(x, y)` or `(u, w)` chart.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChartPoint {
    pub chart: Chart,
    pub first: f64,
    pub second: f64,
}

/// `(x, y) -> (z, w)`.
pub fn zw_from_xy(p: &SolitonParams, x: f64, y: f64) -> Result<PhasePoint> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { what: "x", at: x });
    }
    let nf = p.nf();
    let z = powf(x, (nf + 2.0) / 2.0) / chart_constant(p.n);
    let w = y * powf(x, (nf - 2.0) / 2.0);
    Ok(PhasePoint { z, w })
}

/// `(z, w) -> (x, y)`.
pub fn xy_from_zw(p: &SolitonParams, q: PhasePoint) -> Result<ChartPoint> {
    if !(q.z > 0.0) || !q.z.is_finite() {
        return Err(Error::Domain { what: "z", at: q.z });
    }
    let nf = p.nf();
    let kz = chart_constant(p.n) * q.z;
    let x = powf(kz, 2.0 / (nf + 2.0));
    let y = q.w * powf(kz, -(nf - 2.0) / (nf + 2.0));
    Ok(ChartPoint { chart: Chart::XY, first: x, second: y })
}

/// `u = z^(1/(n+2))`.
pub fn u_from_z(p: &SolitonParams, z: f64) -> Result<f64> {
    if z < 0.0 || !z.is_finite() {
        return Err(Error::Domain { what: "z", at: z });
    }
    Ok(powf(z, 1.0 / (p.nf() + 2.0)))
}

/// `z = u^(n+2)`.
pub fn z_from_u(p: &SolitonParams, u: f64) -> f64 {
    crate::math::powi(u, p.n + 2)
}

/// Scalar curvature `R = phi' + rho` at a `(z, w)` point, which for the
/// normalized shrinker is `rho (1 + w z^(-(n-2)/(n+2)))`.
pub fn scalar_curvature(p: &SolitonParams, q: PhasePoint) -> Result<f64> {
    Ok(xy_from_zw(p, q)?.second + p.rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn n6_shrinker_uses_rbar_as_lambda() {
        let rbar = 10f64.sqrt() / 20.0;
        let p = make_params(6, Regime::Shrinking, rbar).unwrap();
        assert_eq!(p.lambda(), rbar);
        assert!(rel(p.xi(), rbar * rbar) < 1e-15);

        let p = make_params(6, Regime::Shrinking, 1.0).unwrap();
        assert_eq!(p.lambda(), 1.0);
        assert_eq!(p.xi(), 1.0);
        assert!(rel(p.rho(), 1.0 / 40f64.sqrt()) < 1e-15);
    }

    #[test]
    fn steady_is_rescaled_to_unit_lambda() {
        let p = make_params(3, Regime::Steady, 1.0).unwrap();
        assert!(rel(p.lambda(), 1.0) < 1e-14);
        assert_eq!(p.rho(), 0.0);
        assert!(rel(p.scale(), lambda_factor(3)) < 1e-14);
        let q = SolitonParams::steady(8).unwrap();
        assert!(rel(q.lambda(), 1.0) < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(make_params(2, Regime::Steady, 1.0), Err(Error::InvalidDimension(2)));
        assert!(matches!(make_params(5, Regime::Shrinking, 0.0), Err(Error::NonPositiveRbar(_))));
        assert!(matches!(make_params(5, Regime::Shrinking, -1.0), Err(Error::NonPositiveRbar(_))));
        assert!(matches!(SolitonParams::from_physical(5, 1.0, -0.1), Err(Error::Expanding(_))));
    }

    #[test]
    fn physical_inputs_keep_rbar_over_rho() {
        let p = SolitonParams::from_physical(7, 3.0, 0.4).unwrap();
        assert!(rel(p.rbar() / p.rho(), 3.0 / 0.4) < 1e-14);
        assert!(rel(p.rbar() * p.scale(), 3.0) < 1e-14);
    }

    #[test]
    fn phi_examples() {
        let p = SolitonParams::shrinking(6, 1.0).unwrap();
        assert!((phi_fn(&p, 0.25).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(phi_fn(&p, 1.0).unwrap(), 0.0);
        assert_eq!(phi_fn(&p, 0.0).unwrap(), 1.0);
        let s = SolitonParams::steady(8).unwrap();
        assert!((phi_fn(&s, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let s5 = SolitonParams::steady(5).unwrap();
        assert!(phi_fn(&s5, 0.0).is_err());
        assert!(phi_fn(&s5, -1.0).is_err());
    }

    #[test]
    fn phi_derivatives_match_differences() {
        for n in 3..=12 {
            let p = SolitonParams::shrinking(n, 1.3).unwrap();
            for &z in &[0.3, 1.0, 7.5] {
                let h = 1e-5 * z;
                let fd = (phi_fn(&p, z + h).unwrap() - phi_fn(&p, z - h).unwrap()) / (2.0 * h);
                assert!((fd - phi_prime(&p, z).unwrap()).abs() < 1e-7 * (1.0 + fd.abs()));
                let fd2 = (phi_prime(&p, z + h).unwrap() - phi_prime(&p, z - h).unwrap()) / (2.0 * h);
                assert!((fd2 - phi_second(&p, z).unwrap()).abs() < 1e-6 * (1.0 + fd2.abs()));
            }
        }
    }

    #[test]
    fn transform_examples() {
        let p = SolitonParams::shrinking(6, 1.0).unwrap();
        let q = zw_from_xy(&p, 2.0, 1.0).unwrap();
        assert!((q.z - 0.4).abs() < 1e-15 && (q.w - 4.0).abs() < 1e-15);
        let q = zw_from_xy(&p, powf(40.0, 0.25), 0.0).unwrap();
        assert!((q.z - 1.0).abs() < 1e-14 && q.w == 0.0);
        let c = xy_from_zw(&p, PhasePoint::new(0.4, 4.0)).unwrap();
        assert!((c.first - 2.0).abs() < 1e-14 && (c.second - 1.0).abs() < 1e-14);
        let c = xy_from_zw(&p, PhasePoint::new(1.0 / 40.0, 0.0)).unwrap();
        assert!((c.first - 1.0).abs() < 1e-15 && c.second == 0.0);
        assert!(zw_from_xy(&p, 0.0, 1.0).is_err());
        assert!(xy_from_zw(&p, PhasePoint::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn u_chart() {
        let p = SolitonParams::shrinking(6, 1.0).unwrap();
        assert!((u_from_z(&p, 256.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(u_from_z(&p, 0.0).unwrap(), 0.0);
        assert_eq!(u_from_z(&p, 1.0).unwrap(), 1.0);
        assert!(u_from_z(&p, -1.0).is_err());
        assert!((z_from_u(&p, 2.0) - 256.0).abs() < 1e-12);
    }

    #[test]
    fn n6_threshold_reads_rbar_over_rho_sqrt10() {
        // Rbar > rho * sqrt(10) when n = 6
        let rho = normalized_rho(6);
        for &f in &[0.9, 0.999, 1.001, 1.5] {
            let p = make_params(6, Regime::Shrinking, f * rho * 10f64.sqrt()).unwrap();
            assert_eq!(p.above_threshold(), f > 1.0);
            assert_eq!(p.above_threshold_rbar(), f > 1.0);
        }
    }

    #[test]
    fn metric_constant_relates_dx_over_y() {
        // dr = dx / y must equal C z^(-2/(n+2)) dz / w
        for n in 3..=9 {
            let p = SolitonParams::shrinking(n, 1.0).unwrap();
            let (z, w, dz) = (2.0, -0.7, 1e-6);
            let a = xy_from_zw(&p, PhasePoint::new(z, w)).unwrap();
            let b = xy_from_zw(&p, PhasePoint::new(z + dz, w)).unwrap();
            let dr_xy = (b.first - a.first) / a.second;
            let dr_zw = p.metric_constant() * powf(z, -2.0 / (n as f64 + 2.0)) * dz / w;
            assert!(rel(dr_xy, dr_zw) < 1e-5);
        }
    }
}
