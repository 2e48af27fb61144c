//! Planar primitives: points, segments, polylines and exact predicates.
//!
//! Orientation is decided with adaptive-precision arithmetic, so the sign is
//! exact for any finite `f64` input. Everything built on top of it (segment
//! classification, simplicity tests) inherits that exactness; only the
//! *coordinates* of constructed points are rounded.

mod scene;

pub use scene::{
    point_location, point_location_eps, validate_scene, BoundaryTag, Color, Edge, Hole, Location,
    RingKind, Scene, SceneError, Violation,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Default geometric tolerance for closed-set membership tests.
pub const EPS_GEOM: f64 = 1e-9;

/// A point in the plane. Serializes as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point { x: a[0], y: a[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    /// Unit vector in the same direction; the zero vector maps to itself.
    pub fn unit(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self.scale(1.0 / n)
        }
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Exact at `t = 0` and `t = 1`.
    pub fn lerp(self, o: Point, t: f64) -> Point {
        if t == 1.0 {
            return o;
        }
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Left,
    Right,
    Collinear,
}

/// Exact orientation of `c` relative to the directed line `a -> b`.
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    let d = orient_det(a, b, c);
    if d > 0.0 {
        Orientation::Left
    } else if d < 0.0 {
        Orientation::Right
    } else {
        Orientation::Collinear
    }
}

/// Sign-exact orientation determinant (positive when `a, b, c` turn left).
pub fn orient_det(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

/// Sign of the orientation determinant: 1, -1 or 0.
pub fn orient_sign(a: Point, b: Point, c: Point) -> i32 {
    let d = orient_det(a, b, c);
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point {
        self.a.lerp(self.b, 0.5)
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Parameter of the orthogonal projection of `p`, clamped to `[0, 1]`.
    pub fn project_param(&self, p: Point) -> f64 {
        let d = self.b.sub(self.a);
        let l2 = d.dot(d);
        if l2 == 0.0 {
            return 0.0;
        }
        (p.sub(self.a).dot(d) / l2).clamp(0.0, 1.0)
    }

    pub fn closest_point(&self, p: Point) -> Point {
        self.at(self.project_param(p))
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        self.closest_point(p).dist(p)
    }

    /// Exact test: `p` lies on the closed segment.
    pub fn contains_exact(&self, p: Point) -> bool {
        orient_sign(self.a, self.b, p) == 0 && in_box(self.a, self.b, p)
    }
}

fn in_box(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SegmentIntersection {
    None,
    Point(Point),
    Overlap(Segment),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate segment with both endpoints at {0}")]
    DegenerateSegment(Point),
    #[error("polyline needs at least {need} vertices, got {got}")]
    TooFewVertices { need: usize, got: usize },
    #[error("non-finite coordinate in input")]
    NonFinite,
}

/// Classifies the intersection of two closed segments.
///
/// Whether the segments meet, touch or overlap is decided exactly; the
/// returned crossing point of a proper intersection is rounded.
pub fn segment_intersection(s: &Segment, t: &Segment) -> Result<SegmentIntersection, GeometryError> {
    if s.is_degenerate() {
        return Err(GeometryError::DegenerateSegment(s.a));
    }
    if t.is_degenerate() {
        return Err(GeometryError::DegenerateSegment(t.a));
    }
    let o1 = orient_sign(s.a, s.b, t.a);
    let o2 = orient_sign(s.a, s.b, t.b);
    let o3 = orient_sign(t.a, t.b, s.a);
    let o4 = orient_sign(t.a, t.b, s.b);

    if o1 == 0 && o2 == 0 {
        return Ok(collinear_overlap(s, t));
    }
    if o1 * o2 > 0 || o3 * o4 > 0 {
        return Ok(SegmentIntersection::None);
    }
    // Touching configurations return the exact input vertex.
    if o1 == 0 {
        return Ok(SegmentIntersection::Point(t.a));
    }
    if o2 == 0 {
        return Ok(SegmentIntersection::Point(t.b));
    }
    if o3 == 0 {
        return Ok(SegmentIntersection::Point(s.a));
    }
    if o4 == 0 {
        return Ok(SegmentIntersection::Point(s.b));
    }
    Ok(SegmentIntersection::Point(line_intersection(s.a, s.b, t.a, t.b)))
}

fn collinear_overlap(s: &Segment, t: &Segment) -> SegmentIntersection {
    let d = s.b.sub(s.a);
    let key = |p: Point| if d.x.abs() >= d.y.abs() { p.x } else { p.y };
    let (mut s0, mut s1) = (s.a, s.b);
    if key(s0) > key(s1) {
        std::mem::swap(&mut s0, &mut s1);
    }
    let (mut t0, mut t1) = (t.a, t.b);
    if key(t0) > key(t1) {
        std::mem::swap(&mut t0, &mut t1);
    }
    let lo = if key(s0) >= key(t0) { s0 } else { t0 };
    let hi = if key(s1) <= key(t1) { s1 } else { t1 };
    if key(lo) > key(hi) {
        SegmentIntersection::None
    } else if key(lo) == key(hi) {
        SegmentIntersection::Point(lo)
    } else {
        SegmentIntersection::Overlap(Segment::new(lo, hi))
    }
}

/// Intersection of the supporting lines of `a-b` and `c-d` (assumed non-parallel).
pub fn line_intersection(a: Point, b: Point, c: Point, d: Point) -> Point {
    let r = b.sub(a);
    let s = d.sub(c);
    let den = r.cross(s);
    let t = c.sub(a).cross(s) / den;
    a.add(r.scale(t))
}

/// True when the open segments cross at a single interior point of both.
pub fn proper_crossing(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient_sign(a, b, c);
    let o2 = orient_sign(a, b, d);
    let o3 = orient_sign(c, d, a);
    let o4 = orient_sign(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Ordered vertex chain; closed polylines repeat no vertex at the end.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>, closed: bool) -> Result<Self, GeometryError> {
        let need = if closed { 3 } else { 1 };
        if vertices.len() < need {
            return Err(GeometryError::TooFewVertices { need, got: vertices.len() });
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Polyline { vertices, closed })
    }

    pub fn open(vertices: Vec<Point>) -> Self {
        Polyline { vertices, closed: false }
    }

    pub fn closed(vertices: Vec<Point>) -> Self {
        Polyline { vertices, closed: true }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        let m = if self.closed && n > 1 { n } else { n.saturating_sub(1) };
        (0..m).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|s| s.length()).sum()
    }

    /// Point at arc length `d` from the first vertex (clamped to the ends).
    pub fn point_at(&self, d: f64) -> Point {
        let mut rem = d.max(0.0);
        let mut last = self.vertices.first().copied().unwrap_or_default();
        for s in self.segments() {
            let l = s.length();
            if rem <= l {
                return if l == 0.0 { s.a } else { s.at(rem / l) };
            }
            rem -= l;
            last = s.b;
        }
        last
    }

    /// The prefix of length `d` as an open polyline.
    pub fn prefix(&self, d: f64) -> Polyline {
        let mut out = vec![];
        let mut rem = d.max(0.0);
        if let Some(&p) = self.vertices.first() {
            out.push(p);
        }
        for s in self.segments() {
            let l = s.length();
            if rem <= l {
                if rem > 0.0 && l > 0.0 {
                    out.push(s.at(rem / l));
                }
                return Polyline::open(out);
            }
            rem -= l;
            out.push(s.b);
        }
        Polyline::open(out)
    }

    pub fn reversed(&self) -> Polyline {
        let mut v = self.vertices.clone();
        if self.closed && !v.is_empty() {
            v.reverse();
            v.rotate_right(1);
        } else {
            v.reverse();
        }
        Polyline { vertices: v, closed: self.closed }
    }

    /// Removes consecutive duplicates (and a closing duplicate for closed chains).
    pub fn dedup(&mut self) {
        self.vertices.dedup();
        if self.closed {
            while self.vertices.len() > 1 && self.vertices.first() == self.vertices.last() {
                self.vertices.pop();
            }
        }
    }
}

/// Signed area of a closed ring (positive when counter-clockwise).
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let o = ring[0];
    let mut s = 0.0;
    for i in 1..n - 1 {
        s += ring[i].sub(o).cross(ring[i + 1].sub(o));
    }
    0.5 * s
}

/// Even-odd containment of `p` in the closed ring; points on the boundary
/// are reported by `on_ring_boundary`, not here.
pub fn ring_contains(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[j], ring[i]);
        if (a.y > p.y) != (b.y > p.y) {
            // Exact side test: which side of a->b is p, oriented upward.
            let s = orient_sign(a, b, p);
            let upward = b.y > a.y;
            if (upward && s > 0) || (!upward && s < 0) {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the ring boundary.
pub fn ring_boundary_dist(ring: &[Point], p: Point) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| Segment::new(ring[i], ring[(i + 1) % n]).dist_to_point(p))
        .fold(f64::INFINITY, f64::min)
}

/// Checks that a closed ring is simple: non-adjacent edges are disjoint and
/// adjacent edges share only their common vertex.
pub fn ring_is_simple(ring: &[Point]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let seg = |i: usize| Segment::new(ring[i], ring[(i + 1) % n]);
    for i in 0..n {
        if seg(i).is_degenerate() {
            return false;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let r = segment_intersection(&seg(i), &seg(j)).unwrap_or(SegmentIntersection::None);
            match r {
                SegmentIntersection::None => {}
                SegmentIntersection::Overlap(_) => return false,
                SegmentIntersection::Point(q) => {
                    if !adjacent {
                        return false;
                    }
                    let shared = if j == i + 1 { ring[j] } else { ring[0] };
                    if q != shared {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Unit bisector pointing into free space at vertex `i` of a ring whose free
/// side is on the left of every edge.
pub fn free_bisector(ring: &[Point], i: usize) -> Point {
    let n = ring.len();
    let (u, v, w) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
    let n1 = v.sub(u).perp().unit();
    let n2 = w.sub(v).perp().unit();
    let s = n1.add(n2);
    if s.norm() < 1e-12 {
        // Zero-width spike: leave backwards along the incoming edge.
        v.sub(u).unit().scale(-1.0)
    } else {
        s.unit()
    }
}

/// Axis-aligned bounding box `(min, max)` of a point set.
pub fn bbox(points: impl IntoIterator<Item = Point>) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}
