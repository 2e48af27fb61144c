//! Offline geodesic machinery: shortest paths, shortest tours around a hole,
//! the λ lower bound for learning such a tour, angle hulls, and the fence
//! and barrier constructions that split or simplify a scene.

mod graph;
mod split;

pub use graph::{Field, Pred, VisGraph};
pub use split::{merge_hole_with_barrier, split_by_chord, Face};

use crate::geometry::{
    orient_sign, proper_crossing, ring_contains, signed_area, BoundaryTag, Color, Point, Polyline, RingKind, Scene,
    Segment,
};
use crate::visibility::{visibility_polygon, Side, VisibilityError};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("point {0} is outside free space")]
    OutsideFreeSpace(Point),
    #[error("no hole with color {0}")]
    NoSuchHole(Color),
    #[error("no closed tour around hole {0} exists")]
    NoTour(Color),
    #[error("fence construction failed: {0}")]
    Fence(String),
    #[error("barrier construction failed: {0}")]
    Barrier(String),
    #[error(transparent)]
    Visibility(#[from] VisibilityError),
}

fn check_free(scene: &Scene, p: Point) -> Result<(), GeodesicError> {
    if scene.is_free(p) {
        Ok(())
    } else {
        Err(GeodesicError::OutsideFreeSpace(p))
    }
}

/// Globally shortest obstacle-avoiding path from `a` to `b`.
pub fn shortest_path(scene: &Scene, a: Point, b: Point) -> Result<Polyline, GeodesicError> {
    check_free(scene, a)?;
    check_free(scene, b)?;
    Ok(VisGraph::new(scene).shortest_path(a, b).1)
}

/// Shortest path from `from` to the boundary of hole `color`.
pub fn path_to_hole(g: &VisGraph, from: Point, color: Color) -> Result<Polyline, GeodesicError> {
    let hole = g.scene.hole(color).ok_or(GeodesicError::NoSuchHole(color))?;
    let f = g.field(&[(from, 0.0)]);
    let n = hole.vertices.len();
    let mut best = (f64::INFINITY, from, Pred::None);
    for i in 0..n {
        let seg = Segment::new(hole.vertices[i], hole.vertices[(i + 1) % n]);
        let r = g.dist_to_segment(&f, &seg);
        if r.0 < best.0 {
            best = r;
        }
    }
    if !best.0.is_finite() {
        return Err(GeodesicError::NoSuchHole(color));
    }
    Ok(Polyline::open(g.path_to(&f, best.1, best.2)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncirclingTour {
    pub hole_color: Color,
    /// Closed, counter-clockwise, starting at the scene's start point.
    pub tour: Polyline,
    /// Tour vertices other than the start.
    pub apex_vertices: Vec<Point>,
    pub enclosed_area: f64,
    pub length: f64,
}

impl EncirclingTour {
    /// Tour with the given vertices, the first being the start.
    pub fn from_vertices(color: Color, verts: Vec<Point>) -> EncirclingTour {
        make_tour(color, verts)
    }

    pub fn start(&self) -> Point {
        self.tour.vertices[0]
    }

    /// Incoming and outgoing neighbours of tour vertex `i`.
    pub fn neighbors(&self, i: usize) -> (Point, Point) {
        let v = &self.tour.vertices;
        let n = v.len();
        (v[(i + n - 1) % n], v[(i + 1) % n])
    }
}

/// A point strictly inside a simple ring (centroid of an ear).
pub fn interior_point(ring: &[Point]) -> Point {
    let n = ring.len();
    let ccw = signed_area(ring) > 0.0;
    for i in 0..n {
        let (a, b, c) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
        let o = orient_sign(a, b, c);
        if (ccw && o <= 0) || (!ccw && o >= 0) {
            continue;
        }
        let inside_other = ring.iter().enumerate().any(|(j, &q)| {
            j != i && j != (i + n - 1) % n && j != (i + 1) % n && ring_contains(&[a, b, c], q)
        });
        if !inside_other {
            return Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        }
    }
    ring[0]
}

/// A ray from `c` that avoids every point in `avoid`, as a long segment.
fn generic_ray(c: Point, avoid: &[Point], reach: f64) -> (Point, Point) {
    let mut th: f64 = 0.7;
    loop {
        let far = c.add(Point::new(th.cos(), th.sin()).scale(reach));
        let clear = avoid.iter().all(|&v| {
            orient_sign(c, far, v) != 0 || v.sub(c).dot(far.sub(c)) < 0.0
        });
        if clear {
            return (c, far);
        }
        th += 0.1173;
    }
}

/// Signed crossing of the directed segment `u -> v` with a ray: +1 when it
/// passes counter-clockwise around the ray's origin.
fn crossing(ray: (Point, Point), u: Point, v: Point) -> i32 {
    if proper_crossing(ray.0, ray.1, u, v) {
        if orient_sign(ray.0, ray.1, v) > 0 {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

#[derive(Clone, Copy, PartialEq)]
struct LiftItem {
    d: f64,
    state: usize,
}
impl Eq for LiftItem {}
impl Ord for LiftItem {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.total_cmp(&self.d).then_with(|| o.state.cmp(&self.state))
    }
}
impl PartialOrd for LiftItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Area weight of the tie-break favouring tours that enclose more area.
pub const AREA_TIE_BREAK: f64 = 1e-9;

const W_MIN: i32 = -1;
const W_MAX: i32 = 2;

/// Shortest closed walk through `s` whose winding numbers around the given
/// points match the targets. Winding is tracked by crossings of a generic ray
/// from each point, which is equivalent to cutting the scene along those rays
/// and searching between copies of `s`.
pub fn lifted_loop(g: &VisGraph, s: Point, targets: &[(Point, i32)]) -> Option<Vec<Point>> {
    let k = targets.len();
    let span = (W_MAX - W_MIN + 1) as usize;
    let layers = span.pow(k as u32);
    let mut pts = vec![s];
    pts.extend(g.nodes.iter().copied());
    let reach = 10.0 * (1.0 + g.scene.diameter());
    let mut avoid = pts.clone();
    for (_, ring) in g.scene.rings() {
        avoid.extend_from_slice(ring);
    }
    let rays: Vec<(Point, Point)> = targets.iter().map(|&(c, _)| generic_ray(c, &avoid, reach)).collect();
    let n = pts.len();
    // Node 0 is s; graph node i is node i + 1.
    let mut adj: Vec<Vec<(usize, f64)>> = vec![vec![]; n];
    for (j, d) in g.visible_nodes(s) {
        adj[0].push((j + 1, d));
        adj[j + 1].push((0, d));
    }
    for i in 0..g.nodes.len() {
        for &(j, d) in g.neighbors(i) {
            adj[i + 1].push((j + 1, d));
        }
    }
    let encode = |w: &[i32]| -> Option<usize> {
        let mut idx = 0usize;
        for &x in w.iter().rev() {
            if !(W_MIN..=W_MAX).contains(&x) {
                return None;
            }
            idx = idx * span + (x - W_MIN) as usize;
        }
        Some(idx)
    };
    let decode = |mut idx: usize| -> Vec<i32> {
        (0..k)
            .map(|_| {
                let x = (idx % span) as i32 + W_MIN;
                idx /= span;
                x
            })
            .collect()
    };
    let start = encode(&vec![0; k]).expect("zero winding encodes");
    let goal_w: Vec<i32> = targets.iter().map(|t| t.1).collect();
    let goal = encode(&goal_w)?;
    let total = n * layers;
    let mut dist = vec![f64::INFINITY; total];
    let mut pred = vec![usize::MAX; total];
    let mut heap = BinaryHeap::new();
    let st0 = start * n;
    dist[st0] = 0.0;
    heap.push(LiftItem { d: 0.0, state: st0 });
    let goal_state = goal * n;
    while let Some(LiftItem { d, state }) = heap.pop() {
        if d > dist[state] {
            continue;
        }
        if state == goal_state {
            break;
        }
        let (layer, u) = (state / n, state % n);
        let w = decode(layer);
        for &(v, len) in &adj[u] {
            let mut nw = w.clone();
            for (r, ray) in rays.iter().enumerate() {
                nw[r] += crossing(*ray, pts[u], pts[v]);
            }
            let Some(nl) = encode(&nw) else { continue };
            let area = 0.5 * pts[u].sub(s).cross(pts[v].sub(s));
            let wgt = (len - AREA_TIE_BREAK * area).max(0.0);
            let ns = nl * n + v;
            let nd = d + wgt;
            if nd < dist[ns] {
                dist[ns] = nd;
                pred[ns] = state;
                heap.push(LiftItem { d: nd, state: ns });
            }
        }
    }
    if !dist[goal_state].is_finite() {
        return None;
    }
    let mut rev = vec![];
    let mut cur = goal_state;
    while cur != st0 {
        rev.push(pts[cur % n]);
        cur = pred[cur];
        if cur == usize::MAX {
            return None;
        }
    }
    rev.push(s);
    rev.reverse();
    rev.pop();
    rev.dedup();
    Some(rev)
}

/// Shortest counter-clockwise tour through the start around hole `color`;
/// ties go to the tour enclosing the larger area.
pub fn encircling_tour(scene: &Scene, color: Color) -> Result<EncirclingTour, GeodesicError> {
    encircling_tour_in(&VisGraph::new(scene), scene.start, color)
}

pub fn encircling_tour_in(g: &VisGraph, s: Point, color: Color) -> Result<EncirclingTour, GeodesicError> {
    let hole = g.scene.hole(color).ok_or(GeodesicError::NoSuchHole(color))?;
    let c = interior_point(&hole.vertices);
    let verts = lifted_loop(g, s, &[(c, 1)]).ok_or(GeodesicError::NoTour(color))?;
    Ok(make_tour(color, verts))
}

pub(crate) fn make_tour(color: Color, verts: Vec<Point>) -> EncirclingTour {
    let tour = Polyline::closed(verts);
    EncirclingTour {
        hole_color: color,
        apex_vertices: tour.vertices[1..].to_vec(),
        enclosed_area: signed_area(&tour.vertices),
        length: tour.length(),
        tour,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaWitness {
    /// Index into the tour's vertex list (0 is the start).
    pub apex_index: usize,
    pub apex: Point,
    /// Sees the apex from the right half-plane of the incoming tour segment.
    pub q_left: Point,
    /// Sees the apex from the right half-plane of the outgoing tour segment.
    pub q_right: Point,
    pub arm_left: f64,
    pub arm_right: f64,
    /// Cost at this apex; λ itself may be slightly larger after tie-breaking.
    pub value: f64,
}

/// Default number of candidate points per half-plane region.
pub const LAMBDA_RESOLUTION: usize = 256;

/// Relative gap below the maximum within which apex values count as tied.
pub const LAMBDA_TIE: f64 = 0.05;

/// Sutherland–Hodgman clip of a ring to the closed half-plane right of `a -> b`.
pub fn clip_right(ring: &[Point], a: Point, b: Point) -> Vec<Point> {
    let inside = |p: Point| orient_sign(a, b, p) <= 0;
    let n = ring.len();
    let mut out = vec![];
    for i in 0..n {
        let (p, q) = (ring[i], ring[(i + 1) % n]);
        let (ip, iq) = (inside(p), inside(q));
        if ip {
            out.push(p);
        }
        if ip != iq {
            let x = crate::geometry::line_intersection(p, q, a, b);
            out.push(x);
        }
    }
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// A visibility region of an apex restricted to a half-plane.
struct Region {
    ring: Vec<Point>,
    free: Vec<Segment>,
}

impl Region {
    fn contains(&self, q: Point, tol: f64) -> bool {
        self.ring.len() >= 3
            && (ring_contains(&self.ring, q) || crate::geometry::ring_boundary_dist(&self.ring, q) <= tol)
    }

    fn samples(&self, resolution: usize) -> Vec<Point> {
        let total: f64 = self.free.iter().map(|s| s.length()).sum();
        if total == 0.0 {
            return self.ring.clone();
        }
        let step = total / resolution.max(1) as f64;
        let mut out = vec![];
        for s in &self.free {
            let k = (s.length() / step).ceil().max(1.0) as usize;
            for j in 0..=k {
                out.push(s.at(j as f64 / k as f64));
            }
        }
        out
    }
}

fn region(scene: &Scene, apex: Point, a: Point, b: Point) -> Result<Region, GeodesicError> {
    let vp = visibility_polygon(scene, apex)?;
    let ring = clip_right(&vp.boundary.vertices, a, b);
    let tol = 1e-7 * (1.0 + scene.diameter());
    let edges = scene.edges();
    let n = ring.len();
    let mut free = vec![];
    for i in 0..n {
        let s = Segment::new(ring[i], ring[(i + 1) % n]);
        if s.length() <= tol {
            continue;
        }
        let m = s.midpoint();
        let on_boundary = edges.iter().any(|e| e.segment().dist_to_point(m) <= tol);
        if !on_boundary {
            free.push(s);
        }
    }
    Ok(Region { ring, free })
}

/// Cheapest path from `s` that visits region `first` and then region `second`.
fn two_region_cost(
    g: &VisGraph,
    from_s: &Field,
    s: Point,
    first: &Region,
    second: &Region,
    resolution: usize,
    tol: f64,
) -> (f64, Point, Point) {
    let mut cands: Vec<(Point, f64)> = vec![];
    if first.contains(s, tol) {
        cands.push((s, 0.0));
    } else {
        for q in first.samples(resolution) {
            let (d, _) = g.dist_to(from_s, q);
            if d.is_finite() {
                cands.push((q, d));
            }
        }
    }
    let mut best = (f64::INFINITY, s, s);
    for &(q, d) in &cands {
        if d < best.0 && second.contains(q, tol) {
            best = (d, q, q);
        }
    }
    if best.0.is_finite() && best.0 == 0.0 {
        return best;
    }
    let f2 = g.field(&cands);
    for seg in &second.free {
        let (d, y, last) = g.dist_to_segment(&f2, seg);
        if d < best.0 {
            let path = g.path_to(&f2, y, last);
            best = (d, path[0], y);
        }
    }
    best
}

/// Lower bound λ on the cost of learning the tour from the start, with the
/// apex that realizes it.
pub fn lambda_lower_bound(
    scene: &Scene,
    t: &EncirclingTour,
    resolution: usize,
) -> Result<(f64, LambdaWitness), GeodesicError> {
    lambda_lower_bound_in(&VisGraph::new(scene), t, resolution)
}

pub fn lambda_lower_bound_in(
    g: &VisGraph,
    t: &EncirclingTour,
    resolution: usize,
) -> Result<(f64, LambdaWitness), GeodesicError> {
    let scene = &g.scene;
    let s = t.start();
    let from_s = g.field(&[(s, 0.0)]);
    let tol = 1e-7 * (1.0 + scene.diameter());
    let v = &t.tour.vertices;
    let mut all: Vec<LambdaWitness> = vec![];
    for i in 1..v.len() {
        let (prev, next) = t.neighbors(i);
        let p = v[i];
        let ra = region(scene, p, prev, p)?;
        let rb = region(scene, p, p, next)?;
        let ab = two_region_cost(g, &from_s, s, &ra, &rb, resolution, tol);
        let ba = two_region_cost(g, &from_s, s, &rb, &ra, resolution, tol);
        let (value, ql, qr) = if ab.0 <= ba.0 { (ab.0, ab.1, ab.2) } else { (ba.0, ba.2, ba.1) };
        let w = LambdaWitness {
            apex_index: i,
            apex: p,
            q_left: ql,
            q_right: qr,
            arm_left: ql.dist(p),
            arm_right: qr.dist(p),
            value,
        };
        all.push(w);
    }
    // Values within the approximation tolerance of the maximum count as tied;
    // the sharpest tied apex gives the most useful fence.
    let top = all.iter().map(|w| w.value).fold(f64::NEG_INFINITY, f64::max);
    let best = all
        .iter()
        .filter(|w| w.value >= top * (1.0 - LAMBDA_TIE))
        .min_by(|a, b| apex_angle(t, a.apex_index).total_cmp(&apex_angle(t, b.apex_index)))
        .copied();
    let w = best.unwrap_or(LambdaWitness {
        apex_index: 0,
        apex: s,
        q_left: s,
        q_right: s,
        arm_left: 0.0,
        arm_right: 0.0,
        value: 0.0,
    });
    Ok((top.max(0.0), w))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleHullCurve {
    pub base_chain: Polyline,
    pub curve: Polyline,
    pub length: f64,
}

/// Default chord deviation of discretized arcs.
pub const ARC_TOLERANCE: f64 = 1e-3;

fn support(pts: &[Point], u: Point) -> f64 {
    pts.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max)
}

/// Boundary of the angle hull of `chain` on one side of the line through its
/// endpoints: the locus of right-angle corners whose legs touch the chain.
/// Portions leaving free space are replaced by shortest paths.
pub fn angle_hull(scene: &Scene, chain: &Polyline, side: Side, arc_tolerance: f64) -> AngleHullCurve {
    let pts = &chain.vertices;
    let (p0, pk) = (pts[0], *pts.last().unwrap());
    let diam = pts.iter().flat_map(|a| pts.iter().map(move |b| a.dist(*b))).fold(0.0, f64::max);
    if diam == 0.0 {
        return AngleHullCurve { base_chain: chain.clone(), curve: Polyline::open(vec![p0]), length: 0.0 };
    }
    let r = diam / 2.0;
    let tol = arc_tolerance.max(1e-12);
    // Between support switches the corner moves on a Thales circle at twice
    // the caliper's angular speed; bound the sagitta of each chord by `tol`.
    let dth = (1.0 - tol / r).clamp(-1.0, 1.0).acos().clamp(1e-5, 0.02);
    let steps = (std::f64::consts::TAU / dth).ceil() as usize;
    let want = |q: Point| match side {
        Side::Left => orient_sign(p0, pk, q) >= 0,
        Side::Right => orient_sign(p0, pk, q) <= 0,
    };
    // Full counter-clockwise loop of the corner around the chain's hull.
    let samples: Vec<Point> = (0..steps)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / steps as f64;
            let u = Point::new(th.cos(), th.sin());
            let v = u.perp();
            u.scale(support(pts, u)).add(v.scale(support(pts, v)))
        })
        .collect();
    // Longest cyclic run on the wanted side.
    let inside: Vec<bool> = samples.iter().map(|&q| want(q)).collect();
    let mut curve: Vec<Point> = vec![];
    if let Some(off) = inside.iter().position(|&b| !b) {
        let mut run: Vec<Point> = vec![];
        for k in 1..=steps {
            let j = (off + k) % steps;
            if inside[j] {
                run.push(samples[j]);
            } else {
                if run.len() > curve.len() {
                    curve = std::mem::take(&mut run);
                }
                run.clear();
            }
        }
        if run.len() > curve.len() {
            curve = run;
        }
    } else {
        curve = samples;
    }
    if curve.is_empty() {
        curve = vec![p0, pk];
    }
    // Orient from the p0 end to the pk end.
    if curve[0].dist(p0) > curve.last().unwrap().dist(p0) {
        curve.reverse();
    }
    let g = VisGraph::new(scene);
    let curve = clip_to_free(&g, p0, &curve, pk);
    let length = curve.length();
    AngleHullCurve { base_chain: chain.clone(), curve, length }
}

/// Replaces curve pieces outside free space by shortest paths between the
/// surrounding free points.
fn clip_to_free(g: &VisGraph, from: Point, curve: &[Point], to: Point) -> Polyline {
    let scene = &g.scene;
    let mut out = vec![from];
    let mut last_free = from;
    let mut pending_gap = false;
    for &q in curve.iter().chain(std::iter::once(&to)) {
        if !scene.is_free(q) {
            pending_gap = true;
            continue;
        }
        if !pending_gap && g.sees(last_free, q) {
            out.push(q);
        } else {
            let (_, path) = g.shortest_path(last_free, q);
            out.extend(path.vertices.into_iter().skip(1));
        }
        last_free = q;
        pending_gap = false;
    }
    let mut pl = Polyline::open(out);
    pl.dedup();
    pl
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fence {
    pub segment: Segment,
    pub apex: Point,
    pub apex_angle: f64,
    pub frontyard: Scene,
    pub backyard: Scene,
    /// Twice the shortest path length from the start to the fence.
    pub x: f64,
    /// Set when the fence had to stop at another hole.
    pub clipped: bool,
}

/// Angle at tour vertex `i` between its incident segments.
pub fn apex_angle(t: &EncirclingTour, i: usize) -> f64 {
    let p = t.tour.vertices[i];
    let (a, b) = t.neighbors(i);
    let (u, v) = (a.sub(p).unit(), b.sub(p).unit());
    u.dot(v).clamp(-1.0, 1.0).acos()
}

/// Builds the fence through the witness apex, perpendicular to the bisector
/// of the apex angle, and splits the scene along it.
pub fn build_fence(scene: &Scene, t: &EncirclingTour, w: &LambdaWitness) -> Result<Fence, GeodesicError> {
    build_fence_in(&VisGraph::new(scene), t, w)
}

pub fn build_fence_in(g: &VisGraph, t: &EncirclingTour, w: &LambdaWitness) -> Result<Fence, GeodesicError> {
    let scene = &g.scene;
    let i = w.apex_index;
    if i == 0 || i >= t.tour.vertices.len() || t.tour.vertices.len() < 3 {
        return Err(GeodesicError::Fence("witness apex has no two incident tour segments".into()));
    }
    let p = t.tour.vertices[i];
    let (a, b) = t.neighbors(i);
    let alpha = apex_angle(t, i);
    let (u, v) = (a.sub(p).unit(), b.sub(p).unit());
    let mut m = u.add(v);
    if m.norm() < 1e-12 {
        m = u.perp();
    }
    let m = m.unit();
    let fdir = m.perp();
    let short = a.dist(p).min(b.dist(p)).min(scene.diameter() * 1e-2);
    let mut delta = 1e-3 * short.max(1e-9);
    let reach = 4.0 * (1.0 + scene.diameter());
    for _attempt in 0..12 {
        let o = p.add(m.scale(delta));
        let l0 = o.sub(fdir.scale(reach));
        let l1 = o.add(fdir.scale(reach));
        let degenerate = scene.rings().any(|(_, r)| r.iter().any(|&q| orient_sign(l0, l1, q) == 0));
        if degenerate || !scene_contains_point(scene, o, t.hole_color) {
            delta *= 1.37;
            continue;
        }
        let (chord, clipped) = fence_chord(scene, o, fdir, reach, t.hole_color);
        let faces = split_by_chord(scene, &chord)?;
        let s = scene.start;
        let tol = scene.eps();
        let front = faces.iter().position(|f| f.touches(s, tol));
        let behind = p.sub(m.scale(2.0 * delta));
        let back = faces
            .iter()
            .position(|f| Some(f) != front.map(|k| &faces[k]) && f.contains(behind, tol))
            .or_else(|| {
                (0..faces.len())
                    .filter(|&k| Some(k) != front)
                    .max_by(|&x, &y| faces[x].area().total_cmp(&faces[y].area()))
            });
        let (Some(fi), Some(bi)) = (front, back) else {
            return Err(GeodesicError::Fence("fence does not separate the start from the backyard".into()));
        };
        if fi == bi {
            return Err(GeodesicError::Fence("fence does not separate the start from the backyard".into()));
        }
        let seg = Segment::new(chord.first().unwrap().a, chord.last().unwrap().b);
        let frontyard = faces[fi].to_scene(s);
        let bstart = chord.iter().map(|c| c.midpoint()).find(|q| faces[bi].touches(*q, tol)).unwrap_or(seg.midpoint());
        let backyard = faces[bi].to_scene(bstart);
        let from_s = g.field(&[(s, 0.0)]);
        let dmin = chord.iter().map(|c| g.dist_to_segment(&from_s, c).0).fold(f64::INFINITY, f64::min);
        return Ok(Fence { segment: seg, apex: p, apex_angle: alpha, frontyard, backyard, x: 2.0 * dmin, clipped });
    }
    Err(GeodesicError::Fence("no non-degenerate fence position found".into()))
}

/// The offset point must be in free space or inside the apex's own hole.
fn scene_contains_point(scene: &Scene, o: Point, color: Color) -> bool {
    match scene.location(o) {
        crate::geometry::Location::Interior => true,
        crate::geometry::Location::InsideHole(c) => c == color,
        _ => false,
    }
}

/// Free pieces of the fence line through `o`, from outer boundary to outer
/// boundary, passing through hole `through`. Stops at any other hole.
fn fence_chord(scene: &Scene, o: Point, dir: Point, reach: f64, through: Color) -> (Vec<Segment>, bool) {
    let l0 = o.sub(dir.scale(reach));
    let l1 = o.add(dir.scale(reach));
    let mut hits: Vec<(f64, BoundaryTag)> = vec![];
    for e in scene.edges() {
        if let Ok(crate::geometry::SegmentIntersection::Point(x)) =
            crate::geometry::segment_intersection(&Segment::new(l0, l1), &e.segment())
        {
            hits.push((x.sub(o).dot(dir), e.tag));
        }
    }
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let stop = |tag: BoundaryTag| tag == BoundaryTag::Outer || tag != BoundaryTag::Hole(through);
    let mut clipped = false;
    let hi = hits.iter().find(|h| h.0 > 0.0 && stop(h.1)).copied();
    let lo = hits.iter().rev().find(|h| h.0 < 0.0 && stop(h.1)).copied();
    for h in [hi, lo].into_iter().flatten() {
        if h.1 != BoundaryTag::Outer {
            clipped = true;
        }
    }
    let (t0, t1) = (lo.map(|h| h.0).unwrap_or(-reach), hi.map(|h| h.0).unwrap_or(reach));
    // Split [t0, t1] at crossings of the apex hole; keep the free pieces.
    let mut ts: Vec<f64> = vec![t0];
    ts.extend(hits.iter().filter(|h| h.0 > t0 && h.0 < t1).map(|h| h.0));
    ts.push(t1);
    let at = |t: f64| o.add(dir.scale(t));
    let mut pieces = vec![];
    for wdw in ts.windows(2) {
        let mid = at(0.5 * (wdw[0] + wdw[1]));
        if matches!(scene.location(mid), crate::geometry::Location::Interior) {
            pieces.push(Segment::new(at(wdw[0]), at(wdw[1])));
        }
    }
    (pieces, clipped)
}

/// Closed tour built from the doubled encircling tour, the barrier path
/// traversed twice in each direction, and a reference watchman tour.
pub fn eulerian_safe_tour(t: &EncirclingTour, b: &Polyline, ref_tour: &Polyline) -> Polyline {
    let mut out: Vec<Point> = vec![];
    let tour: Vec<Point> = t.tour.vertices.iter().copied().chain(std::iter::once(t.start())).collect();
    let refv: Vec<Point> = ref_tour
        .vertices
        .iter()
        .copied()
        .chain(ref_tour.vertices.first().copied().filter(|_| ref_tour.closed))
        .collect();
    let bv = &b.vertices;
    let back: Vec<Point> = bv.iter().rev().copied().collect();
    let mut walk = |seq: &[Point]| out.extend_from_slice(seq);
    walk(&tour);
    walk(bv);
    walk(&back);
    walk(&refv);
    let rrev: Vec<Point> = refv.iter().rev().copied().collect();
    walk(&rrev);
    walk(bv);
    walk(&back);
    let trev: Vec<Point> = tour.iter().rev().copied().collect();
    walk(&trev);
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    Polyline::closed(out)
}

/// Which ring of the scene a point sits on, if any (exactly).
pub fn ring_of_vertex(scene: &Scene, p: Point) -> Option<(RingKind, usize)> {
    for (r, ring) in scene.rings() {
        if let Some(i) = ring.iter().position(|&q| q == p) {
            return Some((r, i));
        }
    }
    None
}
