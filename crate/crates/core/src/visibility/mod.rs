//! Visibility polygons with windows, and point-to-point visibility.
//!
//! The polygon is built by shooting one ray per distinct vertex direction
//! around the viewpoint. Along a ray, a boundary vertex either *blocks* (the
//! boundary crosses the ray there) or is *grazed* (both neighbours lie on the
//! same side). Directions are compared exactly, so collinear vertex runs are
//! grouped reliably. The cost is `O(n^2)` per polygon, which is fine for the
//! scene sizes used here.

use crate::geometry::{
    free_bisector, line_intersection, orient_sign, point_location_eps, proper_crossing, ring_contains, BoundaryTag, Color,
    Location, Point, Polyline, RingKind, Scene, Segment,
};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    Outer,
    Hole(Color),
    Window,
}

impl From<BoundaryTag> for EdgeTag {
    fn from(t: BoundaryTag) -> Self {
        match t {
            BoundaryTag::Outer => EdgeTag::Outer,
            BoundaryTag::Hole(c) => EdgeTag::Hole(c),
        }
    }
}

/// Side of the viewing ray on which the hidden region lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A chord of the visibility polygon that separates seen from unseen space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    /// From the blocking vertex outward to where the ray meets the boundary.
    pub chord: Segment,
    pub blocking_vertex: Point,
    pub side: Side,
    /// Owner of the boundary at the blocking vertex and at the far end.
    pub connects: (EdgeTag, EdgeTag),
}

impl Window {
    /// Unit normal of the chord pointing into the hidden region.
    pub fn hidden_normal(&self) -> Point {
        let d = self.chord.b.sub(self.chord.a).unit();
        match self.side {
            Side::Left => d.perp(),
            Side::Right => d.perp().scale(-1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityPolygon {
    pub viewpoint: Point,
    /// Counter-clockwise around the viewpoint, closed.
    pub boundary: Polyline,
    /// `edge_tags[i]` describes the edge from vertex `i` to `i + 1`.
    pub edge_tags: Vec<EdgeTag>,
    pub windows: Vec<Window>,
    /// Interior point the rays were shot from (differs from the viewpoint
    /// only for viewpoints on the scene boundary).
    #[serde(skip)]
    probe: Point,
    #[serde(skip)]
    angles: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VisibilityError {
    #[error("point {0} is outside free space")]
    OutsideFreeSpace(Point),
    #[error("viewpoint is not inside a corridor of hole {0}: found {1} main windows")]
    NotInCorridor(Color, usize),
    #[error("internal visibility failure: {0}")]
    Internal(String),
}

#[derive(Clone, Copy)]
struct Contact {
    t: f64,
    kind: ContactKind,
}

#[derive(Clone, Copy)]
enum ContactKind {
    Cross { a: Point, b: Point, tag: BoundaryTag },
    Vertex { ring: RingKind, idx: usize },
}

struct Run {
    near: Point,
    far: Point,
    /// Ring-order endpoints and the side their outside neighbour lies on.
    first: Point,
    last: Point,
    side_prev: i32,
    side_next: i32,
    members: Vec<usize>,
    tag: BoundaryTag,
}

fn half(p: Point, v: Point) -> u8 {
    if v.y > p.y || (v.y == p.y && v.x > p.x) {
        0
    } else {
        1
    }
}

/// Exact counter-clockwise angular order around `p`, starting at direction +x.
fn angular_cmp(p: Point, a: Point, b: Point) -> Ordering {
    let (ha, hb) = (half(p, a), half(p, b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    match orient_sign(p, a, b) {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

fn norm_angle(a: f64) -> f64 {
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Nudges a boundary point into the open interior of free space.
fn interior_probe(scene: &Scene, p: Point) -> Point {
    if strictly_interior(scene, p) {
        return p;
    }
    let mut best: Option<(f64, RingKind, usize, f64)> = None;
    for e in scene.edges() {
        let s = e.segment();
        let t = s.project_param(p);
        let d = s.at(t).dist(p);
        if best.is_none_or(|b| d < b.0) {
            best = Some((d, e.ring, e.index, t));
        }
    }
    let (_, ring, idx, t) = best.expect("scene has edges");
    let pts = scene.ring(ring);
    let n = pts.len();
    let (a, b) = (pts[idx], pts[(idx + 1) % n]);
    let len = a.dist(b);
    let near_vertex = |q: Point| q.dist(p) <= 1e-7 * (1.0 + len);
    let dir = if t <= 0.0 || near_vertex(a) {
        free_bisector(pts, idx)
    } else if t >= 1.0 || near_vertex(b) {
        free_bisector(pts, (idx + 1) % n)
    } else {
        b.sub(a).perp().unit()
    };
    let mut step = scene.eps();
    for _ in 0..60 {
        let q = p.add(dir.scale(step));
        if strictly_interior(scene, q) {
            return q;
        }
        step *= 2.0;
    }
    p
}

fn strictly_interior(scene: &Scene, p: Point) -> bool {
    if !ring_contains(&scene.outer, p) {
        return false;
    }
    if scene.holes.iter().any(|h| ring_contains(&h.vertices, p)) {
        return false;
    }
    !scene.edges().iter().any(|e| e.segment().contains_exact(p))
}

struct RayCaster<'a> {
    scene: &'a Scene,
    p: Point,
}

impl RayCaster<'_> {
    /// Classifies the collinear run through vertex `idx` of `ring` for the
    /// ray from `p` through `d`.
    fn run(&self, d: Point, ring: RingKind, idx: usize) -> Run {
        let pts = self.scene.ring(ring);
        let n = pts.len();
        let on = |j: usize| orient_sign(self.p, d, pts[j]) == 0;
        let mut first = idx;
        let mut steps = 0;
        while on((first + n - 1) % n) && steps < n {
            first = (first + n - 1) % n;
            steps += 1;
        }
        let mut last = idx;
        while on((last + 1) % n) && steps < n {
            last = (last + 1) % n;
            steps += 1;
        }
        let side_prev = orient_sign(self.p, d, pts[(first + n - 1) % n]);
        let side_next = orient_sign(self.p, d, pts[(last + 1) % n]);
        let mut members = vec![];
        let mut j = first;
        loop {
            members.push(j);
            if j == last {
                break;
            }
            j = (j + 1) % n;
        }
        let dist = |q: Point| q.sub(self.p).dot(d.sub(self.p));
        let (a, b) = (pts[first], pts[last]);
        let (near, far) = if dist(a) <= dist(b) { (a, b) } else { (b, a) };
        // Tag of the run: any edge inside it, else the edge into it.
        let tag = self.scene.edge_tag(ring, if first != last { first } else { (first + n - 1) % n });
        Run { near, far, first: a, last: b, side_prev, side_next, members, tag }
    }

    fn contacts(&self, d: Point) -> Vec<Contact> {
        let p = self.p;
        let u = d.sub(p);
        let uu = u.dot(u);
        let mut out = vec![];
        for (ring, pts) in self.scene.rings() {
            let n = pts.len();
            for i in 0..n {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                let oa = orient_sign(p, d, a);
                let ob = orient_sign(p, d, b);
                if oa == 0 {
                    if a.sub(p).dot(u) > 0.0 {
                        out.push(Contact { t: a.sub(p).dot(u) / uu, kind: ContactKind::Vertex { ring, idx: i } });
                    }
                    continue;
                }
                if ob == 0 || oa == ob {
                    continue;
                }
                let front = if oa > 0 { orient_sign(a, b, p) < 0 } else { orient_sign(a, b, p) > 0 };
                if !front {
                    continue;
                }
                let x = line_intersection(p, d, a, b);
                let t = x.sub(p).dot(u) / uu;
                out.push(Contact { t, kind: ContactKind::Cross { a, b, tag: self.scene.edge_tag(ring, i) } });
            }
        }
        out.sort_by(|x, y| x.t.total_cmp(&y.t));
        out
    }
}

struct Emitted {
    pts: Vec<Point>,
    /// `win[i]`: the edge from `pts[i]` to the next point is this window.
    win: Vec<Option<usize>>,
}

/// Computes the visibility polygon of `p` in `scene`.
pub fn visibility_polygon(scene: &Scene, p: Point) -> Result<VisibilityPolygon, VisibilityError> {
    let eps = scene.eps();
    if !point_location_eps(scene, p, eps).is_free() {
        return Err(VisibilityError::OutsideFreeSpace(p));
    }
    let probe = interior_probe(scene, p);
    let caster = RayCaster { scene, p: probe };

    let mut verts: Vec<(RingKind, usize, Point)> = vec![];
    for (ring, pts) in scene.rings() {
        for (i, &v) in pts.iter().enumerate() {
            verts.push((ring, i, v));
        }
    }
    verts.sort_by(|a, b| {
        angular_cmp(probe, a.2, b.2).then_with(|| probe.dist(a.2).total_cmp(&probe.dist(b.2)))
    });

    let mut out = Emitted { pts: vec![], win: vec![] };
    let mut windows: Vec<Window> = vec![];
    let mut gi = 0;
    while gi < verts.len() {
        let mut gj = gi + 1;
        while gj < verts.len() && angular_cmp(probe, verts[gi].2, verts[gj].2) == Ordering::Equal {
            gj += 1;
        }
        let d = verts[gi].2;
        shoot(&caster, d, &mut out, &mut windows)?;
        gi = gj;
    }

    // Drop repeated points, keeping the window marker of the surviving edge.
    let mut pts: Vec<Point> = vec![];
    let mut win: Vec<Option<usize>> = vec![];
    for (i, &q) in out.pts.iter().enumerate() {
        if pts.last() == Some(&q) {
            *win.last_mut().unwrap() = out.win[i];
        } else {
            pts.push(q);
            win.push(out.win[i]);
        }
    }
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
        let w = win.pop().unwrap();
        if w.is_some() {
            *win.last_mut().unwrap() = w;
        }
    }
    if pts.len() < 3 {
        return Err(VisibilityError::Internal(format!("degenerate visibility polygon at {p}")));
    }

    let edges = scene.edges();
    let tol = 1e-7 * (1.0 + scene.diameter());
    let n = pts.len();
    let mut edge_tags = Vec::with_capacity(n);
    for i in 0..n {
        if win[i].is_some() {
            edge_tags.push(EdgeTag::Window);
            continue;
        }
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let best = edges
            .iter()
            .map(|e| (e.segment().dist_to_point(a).max(e.segment().dist_to_point(b)), e.tag))
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .expect("scene has edges");
        edge_tags.push(if best.0 <= tol { best.1.into() } else { EdgeTag::Window });
    }

    let angles = pts.iter().map(|q| norm_angle(q.sub(probe).angle())).collect();
    Ok(VisibilityPolygon { viewpoint: p, boundary: Polyline::closed(pts), edge_tags, windows, probe, angles })
}

fn shoot(
    caster: &RayCaster<'_>,
    d: Point,
    out: &mut Emitted,
    windows: &mut Vec<Window>,
) -> Result<(), VisibilityError> {
    let contacts = caster.contacts(d);
    let mut seen_runs: Vec<(RingKind, usize)> = vec![];
    let mut right: Option<Run> = None;
    let mut left: Option<Run> = None;
    let mut block: Option<(Point, BoundaryTag, Option<Run>)> = None;
    let mut first_vertex_t = f64::INFINITY;
    let mut block_t = f64::INFINITY;
    for c in &contacts {
        match c.kind {
            ContactKind::Cross { a, b, tag } => {
                block = Some((line_intersection(caster.p, d, a, b), tag, None));
                block_t = c.t;
                break;
            }
            ContactKind::Vertex { ring, idx } => {
                if seen_runs.contains(&(ring, idx)) {
                    continue;
                }
                first_vertex_t = first_vertex_t.min(c.t);
                let run = caster.run(d, ring, idx);
                seen_runs.extend(run.members.iter().map(|&m| (ring, m)));
                if run.side_prev != run.side_next {
                    let tag = run.tag;
                    block = Some((run.near, tag, Some(run)));
                    block_t = c.t;
                    break;
                }
                if run.side_prev < 0 {
                    right.get_or_insert(run);
                } else {
                    left.get_or_insert(run);
                }
            }
        }
    }
    let (bpt, btag, brun) = block.ok_or_else(|| VisibilityError::Internal("ray escaped the scene".into()))?;
    if first_vertex_t > block_t {
        // Every vertex in this direction is hidden behind an edge.
        return Ok(());
    }
    let btag_e: EdgeTag = btag.into();
    if let Some(r) = &right {
        push(out, r.near, None);
        windows.push(Window {
            chord: Segment::new(r.far, bpt),
            blocking_vertex: r.far,
            side: Side::Right,
            connects: (r.tag.into(), btag_e),
        });
        push(out, r.far, Some(windows.len() - 1));
    }
    match brun {
        Some(run) => {
            // x is attached on the right, y on the left. A far run end is
            // only visible when nothing grazes on its side.
            let (x, y) = if run.side_prev < 0 { (run.first, run.last) } else { (run.last, run.first) };
            if x == run.near || right.is_none() {
                push(out, x, None);
            }
            if y != x && (y == run.near || left.is_none()) {
                push(out, y, None);
            }
        }
        None => push(out, bpt, None),
    }
    if let Some(l) = &left {
        windows.push(Window {
            chord: Segment::new(l.far, bpt),
            blocking_vertex: l.far,
            side: Side::Left,
            connects: (l.tag.into(), btag_e),
        });
        // The window runs from the block point back to the grazed vertex.
        let last = out.win.len() - 1;
        out.win[last] = Some(windows.len() - 1);
        push(out, l.far, None);
        push(out, l.near, None);
    }
    Ok(())
}

fn push(out: &mut Emitted, p: Point, w: Option<usize>) {
    out.pts.push(p);
    out.win.push(w);
}

impl VisibilityPolygon {
    pub fn probe(&self) -> Point {
        self.probe
    }

    pub fn area(&self) -> f64 {
        crate::geometry::signed_area(&self.boundary.vertices)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Segment, EdgeTag)> + '_ {
        self.boundary.segments().zip(self.edge_tags.iter().copied())
    }

    /// Colors of holes whose boundary appears in the polygon.
    pub fn hole_colors(&self) -> Vec<Color> {
        let mut v: Vec<Color> = self
            .edge_tags
            .iter()
            .filter_map(|t| if let EdgeTag::Hole(c) = t { Some(*c) } else { None })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Closed membership with tolerance `tol`, using the star shape around
    /// the probe point (`O(log n)`).
    pub fn contains(&self, q: Point, tol: f64) -> bool {
        let pts = &self.boundary.vertices;
        let n = pts.len();
        let o = self.probe;
        if q.dist(o) <= tol {
            return true;
        }
        let th = norm_angle(q.sub(o).angle());
        let i = self.angles.partition_point(|&a| a <= th);
        let k = (i + n - 1) % n;
        for dk in [n - 1, 0, 1] {
            let j = (k + dk) % n;
            let (a, b) = (pts[j], pts[(j + 1) % n]);
            if in_wedge_triangle(o, a, b, q, tol) {
                return true;
            }
        }
        false
    }

    /// Exact even-odd membership (boundary within `tol` counts as inside).
    pub fn contains_slow(&self, q: Point, tol: f64) -> bool {
        let pts = &self.boundary.vertices;
        crate::geometry::ring_boundary_dist(pts, q) <= tol || ring_contains(pts, q)
    }

    /// Distance from the viewpoint to the polygon boundary along direction `u`.
    pub fn radial_distance(&self, u: Point) -> f64 {
        let o = self.probe;
        let far = o.add(u.unit().scale(1e6 * (1.0 + self.boundary.length())));
        let mut best = f64::INFINITY;
        for s in self.boundary.segments() {
            if let Ok(crate::geometry::SegmentIntersection::Point(x)) =
                crate::geometry::segment_intersection(&Segment::new(o, far), &s)
            {
                best = best.min(x.dist(o));
            }
        }
        best
    }
}

fn in_wedge_triangle(o: Point, a: Point, b: Point, q: Point, tol: f64) -> bool {
    let seg = Segment::new(a, b);
    if seg.dist_to_point(q) <= tol {
        return true;
    }
    let ab = b.sub(a);
    let l = ab.norm();
    if l == 0.0 {
        return false;
    }
    // Inside the edge's half-plane (within tol) and inside the wedge at o.
    let side = ab.cross(q.sub(a)) / l;
    let oa = a.sub(o);
    let ob = b.sub(o);
    let oq = q.sub(o);
    let w1 = oa.cross(oq) / oa.norm().max(1e-300);
    let w2 = oq.cross(ob) / ob.norm().max(1e-300);
    side >= -tol && w1 >= -tol && w2 >= -tol && oa.cross(ob) >= 0.0
}

/// Whether the closed segment `p q` lies in closed free space.
pub fn sees(scene: &Scene, p: Point, q: Point) -> Result<bool, VisibilityError> {
    let eps = scene.eps();
    for x in [p, q] {
        if !point_location_eps(scene, x, eps).is_free() {
            return Err(VisibilityError::OutsideFreeSpace(x));
        }
    }
    Ok(sees_unchecked(scene, p, q))
}

fn touches_edge(a: Point, b: Point, p: Point, q: Point, eps: f64) -> bool {
    let e = Segment::new(a, b);
    let l = a.dist(b);
    let near_line = |x: Point| l > 0.0 && (b.sub(a).cross(x.sub(a)) / l).abs() <= eps;
    e.dist_to_point(p) <= eps || e.dist_to_point(q) <= eps || (near_line(p) && near_line(q))
}

/// `sees` without the endpoint checks; both endpoints must be free.
pub fn sees_unchecked(scene: &Scene, p: Point, q: Point) -> bool {
    if p == q {
        return true;
    }
    let mut ts: Vec<f64> = vec![0.0, 1.0];
    let u = q.sub(p);
    let uu = u.dot(u);
    let seg = Segment::new(p, q);
    let eps = 1e-11 * (1.0 + scene.diameter());
    for (_, pts) in scene.rings() {
        let n = pts.len();
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            // An endpoint on an edge, or a segment running along it, may cross
            // the edge by rounding error only; that is touching, not crossing.
            if proper_crossing(p, q, a, b) && !touches_edge(a, b, p, q, eps) {
                return false;
            }
            if seg.dist_to_point(a) <= eps {
                ts.push(a.sub(p).dot(u) / uu);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.windows(2).all(|w| {
        let m = p.lerp(q, 0.5 * (w[0] + w[1]));
        point_location_eps(scene, m, eps) != Location::Exterior
            && !matches!(point_location_eps(scene, m, eps), Location::InsideHole(_))
    })
}

/// The two windows of a corridor viewpoint that separate `color` from the
/// rest of the boundary.
pub fn main_windows(vp: &VisibilityPolygon, color: Color) -> Result<(Window, Window), VisibilityError> {
    let h = EdgeTag::Hole(color);
    let found: Vec<Window> = vp
        .windows
        .iter()
        .copied()
        .filter(|w| w.connects.0 != w.connects.1 && (w.connects.0 == h || w.connects.1 == h))
        .collect();
    if found.len() == 2 {
        Ok((found[0], found[1]))
    } else {
        Err(VisibilityError::NotInCorridor(color, found.len()))
    }
}
