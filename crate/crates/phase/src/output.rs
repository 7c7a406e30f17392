//! CSV and JSON writers. Floats go through `Display`, which prints the
//! shortest decimal that round-trips, so reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use yamabe_core::asymptotics::CompletenessVerdict;
use yamabe_core::dynsys::VectorFieldId;
use yamabe_core::integrate::{Event, Terminal, Tolerances, Trajectory};
use yamabe_core::solitons::{CertificateKind, CertificateVerdict, SolitonCertificate, SweepEntry, WarpProfile};
use yamabe_core::SolitonParams;

use crate::config::RunConfig;

pub const TOOL: &str = "yamabe-phase";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Collects the files a run writes, relative to the output directory.
#[derive(Debug)]
pub struct OutDir {
    pub root: PathBuf,
    pub files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutDir { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(rel.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(rel, s.as_bytes())
    }
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    Ok(w.into_inner()?)
}

/// `param,<first>,<second>,r,aux`.
pub fn trajectory_csv(t: &Trajectory) -> Result<Vec<u8>> {
    let (a, b) = t.vf.coordinates();
    let aux = if t.vf == VectorFieldId::XY { "f" } else { "s" };
    csv_bytes(
        &[t.vf.parameter(), a, b, "r", aux],
        t.samples.iter().map(|s| vec![s.param, s.state[0], s.state[1], s.r, s.aux]),
    )
}

/// `r,phi,phiPrime,R,f`.
pub fn profile_csv(p: &WarpProfile) -> Result<Vec<u8>> {
    csv_bytes(
        &["r", "phi", "phiPrime", "R", "f"],
        p.grid
            .iter()
            .zip(&p.scalar_curvature)
            .zip(&p.potential)
            .map(|((g, r), f)| vec![g.r, g.phi, g.phi_prime, *r, *f]),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRef {
    pub file: String,
    pub vector_field: &'static str,
    pub samples: usize,
    pub head: Terminal,
    pub terminal: Terminal,
    pub events: Vec<Event>,
}

impl TrajectoryRef {
    pub fn new(file: String, t: &Trajectory) -> Self {
        TrajectoryRef {
            file,
            vector_field: t.vf.as_str(),
            samples: t.samples.len(),
            head: t.head,
            terminal: t.terminal,
            events: t.events.clone(),
        }
    }
}

/// Certificate as written to `certificate.json`: trajectories and the
/// profile are referenced by file.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateRecord<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub params: &'a SolitonParams,
    pub kind: CertificateKind,
    pub verdict: CertificateVerdict,
    pub completeness: &'a [CompletenessVerdict],
    pub phi_positive: bool,
    pub residual_max: Option<f64>,
    pub crossings: &'a [f64],
    pub notes: &'a [String],
    pub tolerances: Tolerances,
    pub trajectories: Vec<TrajectoryRef>,
    pub profile: Option<String>,
    pub sweep: &'a [SweepEntry],
    pub skipped: &'a [[f64; 2]],
}

/// Writes the certificate, its trajectories and profile.
pub fn write_certificate(out: &mut OutDir, cert: &SolitonCertificate, stem: &str) -> Result<()> {
    let mut refs = Vec::new();
    for (i, t) in cert.trajectories.iter().enumerate() {
        let name = if cert.trajectories.len() == 1 {
            format!("trajectories/{stem}.csv")
        } else {
            format!("trajectories/{stem}_{i:03}.csv")
        };
        out.write(&name, &trajectory_csv(t)?)?;
        refs.push(TrajectoryRef::new(name, t));
    }
    let profile = match &cert.profile {
        Some(p) => {
            out.write("profile.csv", &profile_csv(p)?)?;
            Some(String::from("profile.csv"))
        }
        None => None,
    };
    let rec = CertificateRecord {
        tool: TOOL,
        version: VERSION,
        params: &cert.params,
        kind: cert.kind,
        verdict: cert.verdict,
        completeness: &cert.completeness,
        phi_positive: cert.phi_positive,
        residual_max: cert.residual_max,
        crossings: &cert.crossings,
        notes: &cert.notes,
        tolerances: cert.tolerances,
        trajectories: refs,
        profile,
        sweep: &cert.sweep,
        skipped: &cert.skipped,
    };
    out.write_json("certificate.json", &rec)
}

#[derive(Debug, Serialize)]
struct ParamsBoth {
    n: u32,
    regime: &'static str,
    lambda: f64,
    #[serde(rename = "Rbar")]
    rbar: f64,
    rho: f64,
    xi: f64,
    scale: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    params: Vec<ParamsBoth>,
    files: Vec<String>,
}

/// Writes `manifest.json` listing every file of the run (itself included).
pub fn write_manifest(out: &mut OutDir, cfg: &RunConfig, params: &[SolitonParams]) -> Result<()> {
    let mut files = out.files.clone();
    files.push(String::from("manifest.json"));
    files.sort();
    let m = Manifest {
        tool: TOOL,
        version: VERSION,
        command: cfg.command.as_str(),
        config: cfg,
        params: params
            .iter()
            .map(|p| ParamsBoth {
                n: p.n(),
                regime: p.regime().as_str(),
                lambda: p.lambda(),
                rbar: p.rbar(),
                rho: p.rho(),
                xi: p.xi(),
                scale: p.scale(),
            })
            .collect(),
        files,
    };
    out.write_json("manifest.json", &m)
}
