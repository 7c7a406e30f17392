//! Run configuration shared by the CLI and the library entry points.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use yamabe_core::integrate::Tolerances;
use yamabe_core::params::make_params;
use yamabe_core::{Regime, SolitonParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Portrait,
    SteadyCertify,
    ShrinkerFind,
    Rotational,
    Reconstruct,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Portrait => "portrait",
            Command::SteadyCertify => "steady-certify",
            Command::ShrinkerFind => "shrinker-find",
            Command::Rotational => "rotational",
            Command::Reconstruct => "reconstruct",
        }
    }
}

/// Rectangle `[z0, z1] x [w0, w1]` of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub z: [f64; 2],
    pub w: [f64; 2],
}

impl Default for Window {
    fn default() -> Self {
        Window { z: [0.0, 10.0], w: [-5.0, 5.0] }
    }
}

fn range(s: &str) -> Result<[f64; 2]> {
    let (a, b) = s.split_once(':').context("range must look like lo:hi")?;
    Ok([a.trim().parse()?, b.trim().parse()?])
}

impl FromStr for Window {
    type Err = anyhow::Error;

    /// `z0:z1,w0:w1`.
    fn from_str(s: &str) -> Result<Self> {
        let (z, w) = s.split_once(',').context("window must look like z0:z1,w0:w1")?;
        let win = Window { z: range(z)?, w: range(w)? };
        win.validate()?;
        Ok(win)
    }
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !ok(self.z) || !ok(self.w) {
            bail!("window ranges must be finite and ordered: {:?}", self);
        }
        Ok(())
    }
}

/// `NZxNW` grid of starting points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub nz: usize,
    pub nw: usize,
}

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(['x', 'X']).context("grid must look like 10x10")?;
        Ok(Grid { nz: a.trim().parse()?, nw: b.trim().parse()? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: u32,
    pub regime: Regime,
    /// Normalized constant; several values give several portrait panels.
    pub lambda: Vec<f64>,
    #[serde(rename = "Rbar")]
    pub rbar: Option<f64>,
    pub tol: Tolerances,
    #[serde(skip)]
    pub out: PathBuf,
    pub window: Option<Window>,
    pub grid: Option<Grid>,
    /// Series terms; each command has its own default.
    pub terms: Option<usize>,
    /// Start point for `reconstruct`.
    pub start: Option<[f64; 2]>,
}

impl RunConfig {
    pub fn new(command: Command, n: u32, regime: Regime) -> Self {
        RunConfig {
            command,
            n,
            regime,
            lambda: Vec::new(),
            rbar: None,
            tol: Tolerances::default(),
            out: PathBuf::from("out"),
            window: None,
            grid: None,
            terms: None,
            start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = &self.window {
            w.validate()?;
        }
        if self.command != Command::Portrait {
            if let Some(g) = self.grid {
                if g.nz == 0 || g.nw == 0 {
                    bail!("grid sample counts must be at least 1");
                }
            }
        }
        if self.terms == Some(0) {
            bail!("--terms must be at least 1");
        }
        if !(self.tol.atol > 0.0 && self.tol.rtol > 0.0) {
            bail!("tolerances must be positive");
        }
        if !self.lambda.is_empty() && self.rbar.is_some() {
            bail!("give either --lambda or --Rbar, not both");
        }
        Ok(())
    }

    /// One parameter set per requested `lambda` (at least one).
    pub fn params_list(&self) -> Result<Vec<SolitonParams>> {
        if self.command == Command::Rotational {
            return Ok(vec![SolitonParams::rotational(self.n, self.regime)?]);
        }
        match self.regime {
            Regime::Steady => {
                if !self.lambda.is_empty() && self.lambda.iter().any(|&l| l != 1.0) {
                    bail!("steady solitons are normalized to lambda = 1; use --Rbar for other units");
                }
                Ok(vec![match self.rbar {
                    Some(r) => make_params(self.n, Regime::Steady, r)?,
                    None => SolitonParams::steady(self.n)?,
                }])
            }
            Regime::Shrinking => {
                if let Some(r) = self.rbar {
                    return Ok(vec![make_params(self.n, Regime::Shrinking, r)?]);
                }
                if self.lambda.is_empty() {
                    bail!("shrinking runs need --lambda or --Rbar");
                }
                self.lambda.iter().map(|&l| Ok(SolitonParams::shrinking(self.n, l)?)).collect()
            }
        }
    }

    pub fn params(&self) -> Result<SolitonParams> {
        Ok(self.params_list()?[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_window_and_grid() {
        let w: Window = "0:10,-5:5".parse().unwrap();
        assert_eq!(w, Window::default());
        assert!("3:1,0:1".parse::<Window>().is_err());
        assert!("0:1".parse::<Window>().is_err());
        let g: Grid = "4x7".parse().unwrap();
        assert_eq!(g, Grid { nz: 4, nw: 7 });
    }

    #[test]
    fn zero_grid_only_for_portraits() {
        let mut c = RunConfig::new(Command::Portrait, 6, Regime::Steady);
        c.grid = Some(Grid { nz: 0, nw: 0 });
        assert!(c.validate().is_ok());
        c.command = Command::SteadyCertify;
        assert!(c.validate().is_err());
    }

    #[test]
    fn steady_rejects_other_lambda() {
        let mut c = RunConfig::new(Command::SteadyCertify, 6, Regime::Steady);
        c.lambda = vec![2.0];
        assert!(c.params_list().is_err());
        c.lambda.clear();
        c.rbar = Some(3.0);
        assert_eq!(c.params().unwrap().lambda(), 1.0);
    }
}
