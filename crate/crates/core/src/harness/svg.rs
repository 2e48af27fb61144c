use crate::geodesic::encircling_tour;
use crate::geometry::{Point, Scene};
use crate::strategies::{EventKind, Trace};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// A dashed layer drawn on top of the scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub kind: String,
    pub points: Vec<Point>,
    pub closed: bool,
}

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#1f78b4"];

fn n(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

fn points(pts: &[Point]) -> String {
    pts.iter().map(|p| format!("{},{}", n(p.x), n(p.y))).collect::<Vec<_>>().join(" ")
}

/// Deterministic SVG of the scene, an optional trace and overlays. The view
/// box is the scene's bounding box padded by 5% on every side.
pub fn render_svg(scene: &Scene, trace: Option<&[Point]>, overlays: &[Overlay]) -> String {
    let (lo, hi) = scene.bbox();
    let pad = 0.05 * (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let (x0, y0) = (lo.x - pad, lo.y - pad);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let sw = 0.004 * w.max(h);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        n(x0),
        n(y0),
        n(w),
        n(h),
        (800.0 * h / w).round() as i64
    );
    // Flip y so the scene appears with y pointing up.
    let _ = writeln!(s, r#"<g transform="matrix(1 0 0 -1 0 {})">"#, n(lo.y + hi.y));
    let _ = writeln!(s, r#"<polygon points="{}" fill="white" stroke="black" stroke-width="{}"/>"#, points(&scene.outer), n(sw));
    for hole in &scene.holes {
        let c = PALETTE[hole.color as usize % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<polygon class="hole" data-color="{}" points="{}" fill="{c}" fill-opacity="0.4" stroke="{c}" stroke-width="{}"/>"#,
            hole.color,
            points(&hole.vertices),
            n(sw)
        );
    }
    for o in overlays {
        let tag = if o.closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            s,
            r#"<{tag} class="overlay" data-kind="{}" points="{}" fill="none" stroke="gray" stroke-width="{}" stroke-dasharray="{} {}"/>"#,
            o.kind,
            points(&o.points),
            n(sw),
            n(4.0 * sw),
            n(2.0 * sw)
        );
    }
    if let Some(t) = trace {
        if t.len() >= 2 {
            let _ = writeln!(
                s,
                r#"<polyline class="trace" points="{}" fill="none" stroke="crimson" stroke-width="{}"/>"#,
                points(t),
                n(sw)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<circle class="start" cx="{}" cy="{}" r="{}" fill="black"/>"#,
        n(scene.start.x),
        n(scene.start.y),
        n(2.0 * sw)
    );
    s.push_str("</g>\n</svg>\n");
    s
}

/// One overlay per fence built and per classification event: the fence
/// segment, or the classified hole's encircling tour.
pub fn overlays_from_trace(scene: &Scene, trace: &Trace) -> Vec<Overlay> {
    let mut out = vec![];
    for e in &trace.events {
        match &e.kind {
            EventKind::FenceBuilt { color, fence, .. } => {
                out.push(Overlay { kind: format!("fence-{color}"), points: vec![fence.a, fence.b], closed: false })
            }
            EventKind::Classified { color, status } => {
                let pts = encircling_tour(scene, *color)
                    .map(|t| t.tour.vertices)
                    .unwrap_or_else(|_| scene.hole(*color).map(|h| h.vertices.clone()).unwrap_or_default());
                out.push(Overlay { kind: format!("tour-{color}-{status:?}").to_lowercase(), points: pts, closed: true })
            }
            _ => {}
        }
    }
    out
}
