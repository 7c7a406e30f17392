//! One function per subcommand. Each writes its files into `cfg.out` and
//! returns an [`Outcome`] carrying the exit status and a short summary.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use yamabe_core::asymptotics::{completeness_integral, CompletenessVerdict, End};
use yamabe_core::dynsys::{critical_points, s2_domain_start, z_alpha, CriticalPoint, VectorFieldId};
use yamabe_core::integrate::{integrate_both, EventKind, StopSpec, Terminal, Trajectory};
use yamabe_core::solitons::{
    assemble_sweep, find_rotational, find_shrinker_gamma, location_zw, profile_residual, reconstruct_warp, sweep_start,
    Anchor, CertificateVerdict, RotationalOptions, ShrinkerOptions, SolitonCertificate, SteadyCase, SweepSpec,
};
use yamabe_core::{Regime, SolitonParams};

use crate::config::{Command, Grid, RunConfig, Window};
use crate::output::{profile_csv, trajectory_csv, write_certificate, write_manifest, OutDir, TOOL, VERSION};
use crate::svg::{self, Panel};

/// Exit status and summary of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit: i32,
    pub summary: String,
}

impl Outcome {
    fn from_verdict(v: CertificateVerdict, summary: String) -> Self {
        let exit = if v == CertificateVerdict::Inconclusive { 2 } else { 0 };
        Outcome { exit, summary }
    }
}

/// Worker pool capped by `YAMABE_PHASE_THREADS`.
pub fn pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("YAMABE_PHASE_THREADS") {
        let k: usize = v.trim().parse().with_context(|| format!("YAMABE_PHASE_THREADS = {v:?}"))?;
        if k > 0 {
            b = b.num_threads(k);
        }
    }
    Ok(b.build()?)
}

/// Dispatches on `cfg.command`.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let params = cfg.params_list()?;
    let mut out = OutDir::create(&cfg.out)?;
    let outcome = match cfg.command {
        Command::Classify => cmd_classify(cfg, &params, &mut out)?,
        Command::Portrait => cmd_portrait(cfg, &params, &mut out)?,
        Command::SteadyCertify => cmd_steady_certify(cfg, &params[0], &mut out)?,
        Command::ShrinkerFind => cmd_shrinker_find(cfg, &params[0], &mut out)?,
        Command::Rotational => cmd_rotational(cfg, &params[0], &mut out)?,
        Command::Reconstruct => cmd_reconstruct(cfg, &params[0], &mut out)?,
    };
    let mut summary = outcome.summary.clone();
    if !summary.ends_with('\n') {
        summary.push('\n');
    }
    out.write("summary.txt", summary.as_bytes())?;
    write_manifest(&mut out, cfg, &params)?;
    Ok(outcome)
}

fn verdict_name(v: CertificateVerdict) -> &'static str {
    match v {
        CertificateVerdict::CompleteNonProduct => "CompleteNonProduct",
        CertificateVerdict::NoCompleteNonProduct => "NoCompleteNonProduct",
        CertificateVerdict::Inconclusive => "Inconclusive",
    }
}

fn describe_params(p: &SolitonParams) -> String {
    format!("n = {}, {}, lambda = {}, Rbar = {}, rho = {}", p.n(), p.regime().as_str(), p.lambda(), p.rbar(), p.rho())
}

/// `(xi, 0)` is a node rather than a focus.
fn node_case(p: &SolitonParams) -> bool {
    (p.n() as f64 + 2.0) * p.lambda() >= 16.0
}

fn push_notes(s: &mut String, cert: &SolitonCertificate) {
    for n in &cert.notes {
        let _ = writeln!(s, "note: {n}");
    }
}

fn push_completeness(s: &mut String, c: &[CompletenessVerdict]) {
    for v in c {
        let end = match v.direction {
            End::TowardSmallEnd => "first end",
            End::TowardLargeEnd => "last end",
        };
        let _ = write!(s, "{end}: {:?} ({})", v.verdict, v.rate_model);
        if let Some(e) = v.exponent {
            let _ = write!(s, ", exponent {e:.4}");
        }
        s.push('\n');
    }
}

// ---------------------------------------------------------------------------
// classify

#[derive(Serialize)]
struct ChartPoints {
    vector_field: &'static str,
    points: Vec<CriticalPoint>,
}

#[derive(Serialize)]
struct Classification {
    tool: &'static str,
    version: &'static str,
    params: SolitonParams,
    above_threshold: Option<bool>,
    threshold: Option<f64>,
    z_alpha: Option<f64>,
    s2_start: Option<f64>,
    charts: Vec<ChartPoints>,
}

fn cmd_classify(_cfg: &RunConfig, params: &[SolitonParams], out: &mut OutDir) -> Result<Outcome> {
    let mut records = Vec::new();
    let mut summary = String::new();
    for p in params {
        let shrinking = p.is_shrinking();
        let mut charts = Vec::new();
        for vf in [VectorFieldId::ZW, VectorFieldId::uw_for(p), VectorFieldId::XY] {
            charts.push(ChartPoints { vector_field: vf.as_str(), points: critical_points(vf, p) });
        }
        let _ = writeln!(summary, "{}", describe_params(p));
        for c in &charts {
            for cp in &c.points {
                let [a, b] = cp.location.coords();
                let _ = writeln!(summary, "  {} ({a}, {b}): {:?}", c.vector_field, cp.class);
            }
        }
        if shrinking {
            let branch = if node_case(p) { "node" } else { "focus" };
            let _ = writeln!(
                summary,
                "  (xi, 0) is a stable {branch}: (n+2) lambda = {}",
                (p.n() as f64 + 2.0) * p.lambda()
            );
        }
        records.push(Classification {
            tool: TOOL,
            version: VERSION,
            params: *p,
            above_threshold: shrinking.then(|| p.above_threshold()),
            threshold: shrinking.then(|| p.threshold()),
            z_alpha: z_alpha(p).ok(),
            s2_start: s2_domain_start(p).ok(),
            charts,
        });
    }
    if records.len() == 1 {
        out.write_json("classification.json", &records[0])?;
    } else {
        out.write_json("classification.json", &records)?;
    }
    Ok(Outcome { exit: 0, summary })
}

// ---------------------------------------------------------------------------
// portrait

fn portrait_starts(win: &Window, grid: Grid) -> Vec<[f64; 2]> {
    let mut v = Vec::with_capacity(grid.nz * grid.nw);
    for i in 0..grid.nz {
        let z = win.z[0] + (win.z[1] - win.z[0]) * (i as f64 + 0.5) / grid.nz as f64;
        for j in 0..grid.nw {
            let w = win.w[0] + (win.w[1] - win.w[0]) * (j as f64 + 0.5) / grid.nw as f64;
            if z > 0.0 {
                v.push([z, w]);
            }
        }
    }
    v
}

fn portrait_stop(win: &Window, tol: yamabe_core::integrate::Tolerances) -> StopSpec {
    let extent = win.z[1].abs().max(win.z[0].abs()).max(win.w[0].abs()).max(win.w[1].abs());
    StopSpec {
        max_span: 50.0,
        max_steps: 20_000,
        escape_radius: 20.0 * extent,
        tol,
        max_step: 0.05,
        ..StopSpec::default()
    }
    .with_events(&[])
}

fn cmd_portrait(cfg: &RunConfig, params: &[SolitonParams], out: &mut OutDir) -> Result<Outcome> {
    let win = cfg.window.unwrap_or_default();
    let grid = cfg.grid.unwrap_or(Grid { nz: 10, nw: 10 });
    let starts = portrait_starts(&win, grid);
    let stop = portrait_stop(&win, cfg.tol);
    let pool = pool()?;
    let mut runs: Vec<Vec<Trajectory>> = Vec::new();
    let mut failures = 0usize;
    for p in params {
        let res: Vec<Option<Trajectory>> =
            pool.install(|| starts.par_iter().map(|&s| integrate_both(VectorFieldId::ZW, p, s, &stop).ok()).collect());
        failures += res.iter().filter(|r| r.is_none()).count();
        runs.push(res.into_iter().flatten().collect());
    }
    for (k, trajs) in runs.iter().enumerate() {
        for (i, t) in trajs.iter().enumerate() {
            out.write(&format!("trajectories/p{k}_{i:03}.csv"), &trajectory_csv(t)?)?;
        }
    }
    let panels: Vec<Panel> = params
        .iter()
        .zip(&runs)
        .map(|(p, t)| Panel {
            params: *p,
            trajectories: t,
            rest_points: critical_points(VectorFieldId::ZW, p)
                .iter()
                .filter_map(|c| location_zw(p, &c.location))
                .map(|q| [q.z, q.w])
                .collect(),
        })
        .collect();
    out.write("portrait.svg", svg::render(&panels, &win).as_bytes())?;

    let mut summary = String::new();
    for (p, t) in params.iter().zip(&runs) {
        let _ = writeln!(summary, "{}: {} trajectories", describe_params(p), t.len());
    }
    if failures > 0 {
        let _ = writeln!(summary, "{failures} starts failed to integrate and were left out");
    }
    Ok(Outcome { exit: 0, summary })
}

// ---------------------------------------------------------------------------
// steady-certify

fn sweep_spec(cfg: &RunConfig) -> SweepSpec {
    let mut spec = SweepSpec::default();
    if let Some(g) = cfg.grid {
        spec.nz = g.nz;
        spec.nw = g.nw;
    }
    if let Some(win) = cfg.window {
        spec.w_range = win.w;
        if win.z[0] > 0.0 {
            spec.z_range = win.z;
        } else {
            // (0, z1]: linear, leaving out z = 0
            spec.z_range = [win.z[1] / spec.nz as f64, win.z[1]];
            spec.log_z = false;
        }
    }
    spec.stop.tol = cfg.tol;
    spec
}

fn cmd_steady_certify(cfg: &RunConfig, p: &SolitonParams, out: &mut OutDir) -> Result<Outcome> {
    if p.regime() != Regime::Steady {
        bail!("steady-certify needs --regime steady");
    }
    let spec = sweep_spec(cfg);
    let (starts, skipped) = spec.starts(p);
    let results = pool()?.install(|| starts.par_iter().map(|&s| sweep_start(p, s, &spec.stop)).collect());
    let cert = assemble_sweep(p, &spec, results, skipped);
    write_certificate(out, &cert, "sweep")?;

    let mut s = format!("{}\nverdict: {}\n", describe_params(p), verdict_name(cert.verdict));
    for c in [
        SteadyCase::WAxisHit,
        SteadyCase::OriginHit,
        SteadyCase::FourthQuadrantDecay,
        SteadyCase::OtherConvergent,
        SteadyCase::Unclassified,
    ] {
        let k = cert.sweep.iter().filter(|e| e.case == c).count();
        if k > 0 {
            let _ = writeln!(s, "{k:4} x {}", c.describe());
        }
    }
    push_notes(&mut s, &cert);
    Ok(Outcome::from_verdict(cert.verdict, s))
}

// ---------------------------------------------------------------------------
// shrinker-find

fn cmd_shrinker_find(cfg: &RunConfig, p: &SolitonParams, out: &mut OutDir) -> Result<Outcome> {
    let opts = ShrinkerOptions { terms: cfg.terms.unwrap_or(20), tol: cfg.tol, ..ShrinkerOptions::default() };
    let cert = find_shrinker_gamma(p, &opts)?;
    write_certificate(out, &cert, "gamma")?;

    let mut s = format!("{}\nverdict: {}\n", describe_params(p), verdict_name(cert.verdict));
    let branch = if !p.above_threshold() {
        "below threshold"
    } else if node_case(p) {
        "node approach to (xi, 0)"
    } else {
        "focus approach to (xi, 0)"
    };
    let _ = writeln!(s, "case: {branch}");
    if !cert.crossings.is_empty() {
        let z: Vec<String> = cert.crossings.iter().map(|z| format!("{z}")).collect();
        let _ = writeln!(s, "z-axis crossings: {}", z.join(", "));
    }
    push_completeness(&mut s, &cert.completeness);
    if let Some(r) = cert.residual_max {
        let _ = writeln!(s, "profile residual: {r:e}");
    }
    push_notes(&mut s, &cert);
    Ok(Outcome::from_verdict(cert.verdict, s))
}

// ---------------------------------------------------------------------------
// rotational

fn cmd_rotational(cfg: &RunConfig, p: &SolitonParams, out: &mut OutDir) -> Result<Outcome> {
    let opts = RotationalOptions { terms: cfg.terms.unwrap_or(12), tol: cfg.tol, ..RotationalOptions::default() };
    let cert = find_rotational(p, &opts)?;
    write_certificate(out, &cert, "rotational")?;
    let branch = if p.rho() > 0.0 { "approach to the interior critical point" } else { "escape to large x" };
    let mut s = format!("{}\nverdict: {}\ncase: {branch}\n", describe_params(p), verdict_name(cert.verdict));
    push_completeness(&mut s, &cert.completeness);
    if let Some(r) = cert.residual_max {
        let _ = writeln!(s, "profile residual: {r:e}");
    }
    push_notes(&mut s, &cert);
    Ok(Outcome::from_verdict(cert.verdict, s))
}

// ---------------------------------------------------------------------------
// reconstruct

#[derive(Serialize)]
struct Reconstruction<'a> {
    tool: &'static str,
    version: &'static str,
    params: &'a SolitonParams,
    start: [f64; 2],
    head: Terminal,
    terminal: Terminal,
    completeness: Vec<CompletenessVerdict>,
    phi_positive: bool,
    residual_max: f64,
    trajectory: &'static str,
    profile: &'static str,
}

fn cmd_reconstruct(cfg: &RunConfig, p: &SolitonParams, out: &mut OutDir) -> Result<Outcome> {
    let start = cfg.start.context("reconstruct needs --start z,w")?;
    if !(start[0] > 0.0) {
        bail!("reconstruct needs a start with z > 0");
    }
    let stop = StopSpec { max_span: 200.0, tol: cfg.tol, ..StopSpec::default() }
        .with_events(&[EventKind::ZAxisCrossing, EventKind::S1Crossing]);
    let traj = integrate_both(VectorFieldId::ZW, p, start, &stop)?;
    let completeness = vec![
        completeness_integral(&traj, p, End::TowardSmallEnd)?,
        completeness_integral(&traj, p, End::TowardLargeEnd)?,
    ];
    let positive =
        Trajectory { samples: traj.samples.iter().copied().filter(|s| s.state[0] > 0.0).collect(), ..traj.clone() };
    let phi_positive = positive.samples.len() == traj.samples.len();
    let profile = reconstruct_warp(&positive, p, Anchor::Start)?;
    let residual = profile_residual(&profile, p);
    out.write("trajectories/reconstruct.csv", &trajectory_csv(&traj)?)?;
    out.write("profile.csv", &profile_csv(&profile)?)?;
    let rec = Reconstruction {
        tool: TOOL,
        version: VERSION,
        params: p,
        start,
        head: traj.head,
        terminal: traj.terminal,
        completeness: completeness.clone(),
        phi_positive,
        residual_max: residual,
        trajectory: "trajectories/reconstruct.csv",
        profile: "profile.csv",
    };
    out.write_json("reconstruction.json", &rec)?;

    let mut s = format!(
        "{}\nstart: ({}, {})\nends: {:?} / {:?}\n",
        describe_params(p),
        start[0],
        start[1],
        traj.head,
        traj.terminal
    );
    push_completeness(&mut s, &completeness);
    let _ = writeln!(s, "profile: {} points, residual {residual:e}", profile.len());
    Ok(Outcome { exit: 0, summary: s })
}
