//! Static SVG pictures of tables and certificates.
//!
//! The circle model is drawn on the unit circle through the Cayley map
//! `x ↦ ((x²−1)/(x²+1), 2x/(x²+1))`; the symbolic model as a labelled tree
//! of cylinders. Floats appear only here.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::certificate::{PingPongTable, WanderingCertificate};
use crate::circle::{CircleModel, CircleRegion};
use crate::error::Result;
use crate::exact::ProjectivePoint;
use crate::model::{BoundaryModel, CertKind};
use crate::symbolic::SymbolicModel;
use crate::word::Letter;

const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const MAX_ORBIT_POINTS: usize = 3000;

fn colour(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// What to draw, independent of the model.
#[derive(Clone, Debug)]
pub struct Scene<M: BoundaryModel> {
    pub regions: Vec<(String, M::Region)>,
    pub witness: Option<M::Region>,
    pub fixed_points: Vec<M::Point>,
    pub orbit: Vec<M::Point>,
}

/// Orbit of the basepoint under reduced products of at most `depth`
/// syllables, capped at a few thousand points.
pub fn orbit_sample<M: BoundaryModel>(m: &M, table: &PingPongTable<M>, depth: u32) -> Vec<M::Point> {
    let moves: Vec<Vec<M::Element>> = table
        .entries
        .iter()
        .map(|e| match e.cert.order() {
            Some(n) => (1..n as i64).map(|j| m.power(&e.alpha, j)).collect(),
            None => vec![e.alpha.clone(), m.inverse(&e.alpha)],
        })
        .collect();
    let mut out = vec![table.basepoint.clone()];
    let mut frontier: Vec<(Option<usize>, M::Point)> = vec![(None, table.basepoint.clone())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (last, p) in &frontier {
            for (i, gs) in moves.iter().enumerate() {
                if *last == Some(i) {
                    continue;
                }
                for g in gs {
                    if out.len() >= MAX_ORBIT_POINTS {
                        return out;
                    }
                    let q = m.apply_point(g, p);
                    out.push(q.clone());
                    next.push((Some(i), q));
                }
            }
        }
        frontier = next;
    }
    out
}

pub fn table_scene<M: BoundaryModel>(
    m: &M,
    table: &PingPongTable<M>,
    witness: Option<&M::Region>,
    orbit_depth: u32,
) -> Result<Scene<M>> {
    let al = m.alphabet();
    let regions = table.entries.iter().map(|e| (al.format_word(&e.word), e.omega.clone())).collect();
    let mut fixed_points = Vec::new();
    for e in &table.entries {
        fixed_points.extend(m.classify(&e.alpha)?.fixed_points);
    }
    Ok(Scene { regions, witness: witness.cloned(), fixed_points, orbit: orbit_sample(m, table, orbit_depth) })
}

pub fn certificate_scene<M: BoundaryModel>(m: &M, cert: &WanderingCertificate<M>) -> Result<Scene<M>> {
    let regions = match &cert.kind {
        CertKind::InfiniteOrder { omega_minus, omega_plus } => {
            vec![("Ω⁻".to_string(), omega_minus.clone()), ("Ω⁺".to_string(), omega_plus.clone())]
        }
        CertKind::FiniteOrder { omega, .. } => vec![("Ω".to_string(), omega.clone())],
    };
    let fixed_points = m.classify(&cert.gamma)?.fixed_points;
    Ok(Scene { regions, witness: Some(cert.sigma(m)), fixed_points, orbit: vec![] })
}

fn header(out: &mut String, w: u32, h: u32, title: &str, reproducible: bool) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    if !reproducible {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or_default();
        let _ = writeln!(out, "<!-- generated at unix time {secs} -->");
    }
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const CX: f64 = 220.0;
const CY: f64 = 220.0;
const R: f64 = 160.0;

/// Position angle of a boundary point: `∞` at 0, `0` at π, increasing
/// coordinates run clockwise.
fn theta(p: &ProjectivePoint) -> f64 {
    match p {
        ProjectivePoint::Infinity => 0.0,
        ProjectivePoint::Finite(x) => PI - 2.0 * x.to_f64().atan(),
    }
}

fn at(theta: f64, r: f64) -> (f64, f64) {
    (CX + r * theta.cos(), CY - r * theta.sin())
}

fn arc_path(start: f64, sweep: f64, r: f64) -> String {
    let steps = ((sweep / (2.0 * PI) * 128.0).ceil() as usize).max(2);
    let mut d = String::new();
    for k in 0..=steps {
        let (x, y) = at(start - sweep * k as f64 / steps as f64, r);
        let _ = write!(d, "{}{x:.2},{y:.2}", if k == 0 { "M" } else { " L" });
    }
    d
}

fn draw_region(out: &mut String, region: &CircleRegion, r: f64, stroke: &str, width: f64, label: &str) {
    let spans: Vec<(f64, f64)> = match region {
        CircleRegion::Full => vec![(0.0, 2.0 * PI)],
        CircleRegion::Arcs(arcs) => arcs
            .iter()
            .map(|a| {
                let s = theta(&a.start);
                (s, (s - theta(&a.end)).rem_euclid(2.0 * PI))
            })
            .collect(),
    };
    for (s, sweep) in spans {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\" stroke-linecap=\"round\"><title>{}</title></path>",
            arc_path(s, sweep, r),
            escape(label)
        );
    }
}

fn dot(out: &mut String, p: &ProjectivePoint, r: f64, radius: f64, fill: &str) {
    let (x, y) = at(theta(p), r);
    let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{radius}\" fill=\"{fill}\"/>");
}

/// Unit-circle picture: Ω regions as coloured arcs, the witness as a grey
/// band, fixed points in black and orbit samples coloured by region.
pub fn circle_svg(m: &CircleModel, scene: &Scene<CircleModel>, title: &str, reproducible: bool) -> String {
    let mut out = String::new();
    header(&mut out, 440, 440, title, reproducible);
    let _ = writeln!(out, "<circle cx=\"{CX}\" cy=\"{CY}\" r=\"{R}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>");
    if let Some(w) = &scene.witness {
        draw_region(&mut out, w, R + 14.0, "#9e9e9e", 8.0, "witness");
    }
    for (i, (label, region)) in scene.regions.iter().enumerate() {
        draw_region(&mut out, region, R, colour(i), 6.0, label);
    }
    for p in &scene.orbit {
        let fill = scene.regions.iter().position(|(_, r)| m.contains_point(r, p)).map_or("#000", colour);
        dot(&mut out, p, R - 10.0, 1.5, fill);
    }
    for p in &scene.fixed_points {
        dot(&mut out, p, R, 3.0, "#000");
    }
    for (i, (label, _)) in scene.regions.iter().enumerate() {
        let _ = writeln!(
            out,
            "<text x=\"10\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" fill=\"{}\">{}</text>",
            14 + 13 * i,
            colour(i),
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Cylinder tree to `depth`; a node is shaded when its cylinder lies in some
/// Ω region (coloured) or in the witness (grey).
pub fn tree_svg(m: &SymbolicModel, scene: &Scene<SymbolicModel>, depth: usize, title: &str, reproducible: bool) -> String {
    let al = m.alphabet();
    let mut levels: Vec<Vec<Vec<Letter>>> = vec![vec![vec![]]];
    for _ in 0..depth {
        let next: Vec<Vec<Letter>> = levels
            .last()
            .expect("root level")
            .iter()
            .flat_map(|w| {
                al.letters().into_iter().filter(|x| w.last().is_none_or(|l| al.follows(l, x))).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
        levels.push(next);
    }
    let leaves = levels.last().map_or(1, Vec::len).max(1);
    let (dx, dy) = (34.0, 70.0);
    let width = (leaves as f64 * dx + 40.0).max(200.0);
    let height = depth as f64 * dy + 80.0;
    let mut out = String::new();
    header(&mut out, width.ceil() as u32, height.ceil() as u32, title, reproducible);
    // x position of a node: mean of its leaf span
    let x_of = |level: usize, k: usize| {
        let span = leaves as f64 / levels[level].len() as f64;
        20.0 + dx * (span * k as f64 + span / 2.0)
    };
    for level in 1..levels.len() {
        let per_parent = levels[level].len() / levels[level - 1].len().max(1);
        for k in 0..levels[level].len() {
            let parent = k / per_parent.max(1);
            let (x0, y0) = (x_of(level - 1, parent), 30.0 + dy * (level - 1) as f64);
            let (x1, y1) = (x_of(level, k), 30.0 + dy * level as f64);
            let _ = writeln!(out, "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y1:.1}\" stroke=\"#bbb\"/>");
        }
    }
    for (level, nodes) in levels.iter().enumerate() {
        for (k, w) in nodes.iter().enumerate() {
            let label = if w.is_empty() { "∅".to_string() } else { al.format_letters(w) };
            let fill = if w.is_empty() {
                "#fff"
            } else {
                let cyl = m.cylinders(&[label.as_str()]).expect("reduced prefix");
                match scene.regions.iter().position(|(_, r)| m.contains(r, &cyl)) {
                    Some(i) => colour(i),
                    None if scene.witness.as_ref().is_some_and(|wr| m.contains(wr, &cyl)) => "#9e9e9e",
                    None => "#fff",
                }
            };
            let (x, y) = (x_of(level, k), 30.0 + dy * level as f64);
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"12\" fill=\"{fill}\" fill-opacity=\"0.6\" stroke=\"#444\"/>"
            );
            let _ = writeln!(
                out,
                "<text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
                y + 3.0,
                escape(&label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
