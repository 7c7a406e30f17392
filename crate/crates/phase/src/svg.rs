//! SVG phase portraits: trajectories, analysis curves and the trapping
//! region on a linear `(z, w)` viewport.

use std::fmt::Write;

use yamabe_core::dynsys::{curve_eval, s2_domain_start, AnalysisCurve, CurveId};
use yamabe_core::integrate::Trajectory;
use yamabe_core::SolitonParams;

use crate::config::Window;
use crate::output::VERSION;

const PLOT_W: f64 = 480.0;
const PLOT_H: f64 = 360.0;
const MARGIN: f64 = 56.0;
const CURVE_POINTS: usize = 400;

pub struct Panel<'a> {
    pub params: SolitonParams,
    pub trajectories: &'a [Trajectory],
    /// Rest points to mark, in `(z, w)`.
    pub rest_points: Vec<[f64; 2]>,
}

struct Frame {
    win: Window,
}

impl Frame {
    fn px(&self, z: f64, w: f64) -> (f64, f64) {
        let [z0, z1] = self.win.z;
        let [w0, w1] = self.win.w;
        // clamp far outside the clip box so the numbers stay bounded
        let zc = z.clamp(z0 - 2.0 * (z1 - z0), z1 + 2.0 * (z1 - z0));
        let wc = w.clamp(w0 - 2.0 * (w1 - w0), w1 + 2.0 * (w1 - w0));
        (MARGIN + (zc - z0) / (z1 - z0) * PLOT_W, MARGIN + (w1 - wc) / (w1 - w0) * PLOT_H)
    }

    fn points(&self, pts: impl Iterator<Item = [f64; 2]>) -> String {
        let mut s = String::new();
        for [z, w] in pts {
            if !(z.is_finite() && w.is_finite()) {
                continue;
            }
            let (x, y) = self.px(z, w);
            if !s.is_empty() {
                s.push(' ');
            }
            let _ = write!(s, "{x:.2},{y:.2}");
        }
        s
    }
}

fn curve_style(id: CurveId) -> (&'static str, &'static str) {
    match id {
        CurveId::S1 => ("#c0392b", ""),
        CurveId::S2a => ("#2471a3", ""),
        CurveId::S2b => ("#2471a3", " stroke-dasharray=\"6 3\""),
        CurveId::S3 => ("#1e8449", " stroke-dasharray=\"2 3\""),
    }
}

fn curves_for(p: &SolitonParams) -> Vec<CurveId> {
    if p.is_shrinking() {
        CurveId::ALL.to_vec()
    } else {
        vec![CurveId::S1]
    }
}

fn curve_samples(p: &SolitonParams, id: CurveId, win: &Window) -> Vec<[f64; 2]> {
    let Ok(c) = AnalysisCurve::new(id, p) else { return Vec::new() };
    let lo = win.z[0].max(c.domain_lo);
    let hi = win.z[1];
    if !(lo < hi) {
        return Vec::new();
    }
    (0..CURVE_POINTS)
        .filter_map(|i| {
            let z = lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64;
            let z = if z <= 0.0 { 1e-9 * (hi - lo) } else { z };
            curve_eval(&c, p, z).ok().map(|w| [z, w])
        })
        .collect()
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

fn panel_title(p: &SolitonParams) -> String {
    format!("n = {}, {}, lambda = {}", p.n(), p.regime().as_str(), p.lambda())
}

fn render_panel(s: &mut String, k: usize, panel: &Panel, win: &Window) {
    let f = Frame { win: *win };
    let p = &panel.params;
    let _ = writeln!(s, "<g id=\"panel-{k}\" transform=\"translate({:.0},0)\">", k as f64 * (PLOT_W + 2.0 * MARGIN));
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        MARGIN + PLOT_W / 2.0,
        MARGIN - 20.0,
        panel_title(p)
    );
    let _ = writeln!(s, "<clipPath id=\"clip-{k}\"><rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{PLOT_W}\" height=\"{PLOT_H}\"/></clipPath>");
    let _ = writeln!(s, "<rect class=\"frame\" x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" fill=\"none\" stroke=\"#444\"/>");

    // axes and ticks
    let (x0, _) = f.px(0.0, 0.0);
    let (_, y0) = f.px(win.z[0], 0.0);
    if win.w[0] <= 0.0 && 0.0 <= win.w[1] {
        let _ = writeln!(
            s,
            "<line class=\"axis\" x1=\"{MARGIN}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{y0:.2}\" stroke=\"#888\"/>",
            MARGIN + PLOT_W
        );
    }
    if win.z[0] <= 0.0 && 0.0 <= win.z[1] {
        let _ = writeln!(
            s,
            "<line class=\"axis\" x1=\"{x0:.2}\" y1=\"{MARGIN}\" x2=\"{x0:.2}\" y2=\"{:.2}\" stroke=\"#888\"/>",
            MARGIN + PLOT_H
        );
    }
    for z in ticks(win.z[0], win.z[1]) {
        let (x, _) = f.px(z, win.w[0]);
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"10\">{}</text>",
            MARGIN + PLOT_H + 14.0,
            fmt_tick(z)
        );
    }
    for w in ticks(win.w[0], win.w[1]) {
        let (_, y) = f.px(win.z[0], w);
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"10\">{}</text>",
            MARGIN - 4.0,
            y + 3.0,
            fmt_tick(w)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">z</text>",
        MARGIN + PLOT_W / 2.0,
        MARGIN + PLOT_H + 32.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">w</text>",
        MARGIN - 36.0,
        MARGIN + PLOT_H / 2.0
    );

    let _ = writeln!(s, "<g clip-path=\"url(#clip-{k})\">");
    // trapping region
    if p.is_shrinking() {
        let upper = curve_samples(p, CurveId::S2a, win);
        let lower = curve_samples(p, CurveId::S2b, win);
        if !upper.is_empty() && !lower.is_empty() {
            let pts = f.points(upper.iter().copied().chain(lower.iter().rev().copied()));
            let _ = writeln!(s, "<polygon class=\"trap\" points=\"{pts}\" fill=\"#d6eaf8\" stroke=\"none\"/>");
        }
    }
    for (i, t) in panel.trajectories.iter().enumerate() {
        let pts = f.points(t.samples.iter().map(|q| q.state));
        if pts.is_empty() {
            continue;
        }
        let _ = writeln!(s, "<polyline class=\"trajectory\" id=\"traj-{k}-{i:03}\" points=\"{pts}\" fill=\"none\" stroke=\"#222\" stroke-width=\"0.8\"/>");
    }
    for id in curves_for(p) {
        let pts = curve_samples(p, id, win);
        if pts.is_empty() {
            continue;
        }
        let (color, dash) = curve_style(id);
        let _ = writeln!(
            s,
            "<polyline class=\"curve\" id=\"curve-{k}-{}\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>",
            id.as_str(),
            f.points(pts.into_iter())
        );
    }
    for [z, w] in &panel.rest_points {
        let (x, y) = f.px(*z, *w);
        let _ = writeln!(s, "<circle class=\"rest-point\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#000\"/>");
    }
    let _ = writeln!(s, "</g>");

    // legend
    let mut ly = MARGIN + 10.0;
    let lx = MARGIN + PLOT_W - 70.0;
    let rows = curves_for(p).len() + usize::from(p.is_shrinking());
    let _ = writeln!(
        s,
        "<rect class=\"legend-box\" x=\"{:.1}\" y=\"{:.1}\" width=\"64\" height=\"{:.1}\" fill=\"#fff\" fill-opacity=\"0.85\" stroke=\"#aaa\"/>",
        lx - 4.0,
        ly - 8.0,
        14.0 * rows as f64 + 4.0
    );
    for id in curves_for(p) {
        let (color, dash) = curve_style(id);
        let _ = writeln!(s, "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>", lx + 20.0);
        let _ = writeln!(
            s,
            "<text class=\"legend\" x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>",
            lx + 26.0,
            ly + 4.0,
            id.as_str()
        );
        ly += 14.0;
    }
    if p.is_shrinking() && s2_domain_start(p).is_ok() {
        let _ = writeln!(s, "<rect x=\"{lx:.1}\" y=\"{:.1}\" width=\"20\" height=\"8\" fill=\"#d6eaf8\"/>", ly - 4.0);
        let _ = writeln!(
            s,
            "<text class=\"legend\" x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">T</text>",
            lx + 26.0,
            ly + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
}

fn fmt_tick(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == 0.0 {
        String::from("0")
    } else {
        format!("{r}")
    }
}

/// Whole document, panels side by side.
pub fn render(panels: &[Panel], win: &Window) -> String {
    let width = panels.len().max(1) as f64 * (PLOT_W + 2.0 * MARGIN);
    let height = PLOT_H + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(s, "<!-- yamabe-phase {VERSION} -->");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>");
    for (k, p) in panels.iter().enumerate() {
        render_panel(&mut s, k, p, win);
    }
    let _ = writeln!(s, "</svg>");
    s
}
