//! Polygonal scenes: an outer boundary with colored holes and a start point.

use super::{
    bbox, orient_sign, ring_boundary_dist, ring_contains, ring_is_simple, segment_intersection,
    signed_area, Point, Segment, SegmentIntersection, EPS_GEOM,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Hole color; distinct per hole within a scene.
pub type Color = u32;

/// What a scene edge belongs to, physically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    Outer,
    Hole(Color),
}

/// Which ring of a scene a vertex or edge sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingKind {
    Outer,
    Hole(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub color: Color,
    pub vertices: Vec<Point>,
}

/// A polygon with holes. The outer ring is counter-clockwise and holes are
/// clockwise, so free space is always on the left of every directed edge.
///
/// `outer_tags` is empty for ordinary scenes. Derived scenes (a hole merged
/// into the outer ring, or a region cut off by a chord) keep per-edge tags so
/// that sensing still reports the physical owner of each edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub outer: Vec<Point>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outer_tags: Vec<BoundaryTag>,
    #[serde(default)]
    pub holes: Vec<Hole>,
    pub start: Point,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: Point,
    pub b: Point,
    pub tag: BoundaryTag,
    pub ring: RingKind,
    /// Index of the edge's first vertex within its ring.
    pub index: usize,
}

impl Edge {
    pub fn segment(&self) -> Segment {
        Segment::new(self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Interior,
    OnOuterBoundary,
    OnHoleBoundary(Color),
    InsideHole(Color),
    Exterior,
}

impl Location {
    /// Closed free space: interior or on some boundary.
    pub fn is_free(&self) -> bool {
        matches!(self, Location::Interior | Location::OnOuterBoundary | Location::OnHoleBoundary(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    TooFewVertices { ring: String },
    NonFinite,
    RepeatedVertex { ring: String },
    OuterNotSimple,
    HoleNotSimple { color: Color },
    OuterNotCounterClockwise,
    HoleNotClockwise { color: Color },
    HoleNotInterior { color: Color },
    HolesNotDisjoint { a: Color, b: Color },
    DuplicateColor { color: Color },
    StartNotOnOuter,
    TagCountMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewVertices { ring } => write!(f, "{ring} has fewer than 3 vertices"),
            Violation::NonFinite => write!(f, "non-finite coordinate"),
            Violation::RepeatedVertex { ring } => write!(f, "{ring} repeats a vertex"),
            Violation::OuterNotSimple => write!(f, "outer boundary not simple"),
            Violation::HoleNotSimple { color } => write!(f, "hole {color} not simple"),
            Violation::OuterNotCounterClockwise => write!(f, "outer boundary not counter-clockwise"),
            Violation::HoleNotClockwise { color } => write!(f, "hole {color} not clockwise"),
            Violation::HoleNotInterior { color } => write!(f, "hole not strictly interior (color {color})"),
            Violation::HolesNotDisjoint { a, b } => write!(f, "holes not disjoint (colors {a} and {b})"),
            Violation::DuplicateColor { color } => write!(f, "duplicate hole color {color}"),
            Violation::StartNotOnOuter => write!(f, "start not on outer boundary"),
            Violation::TagCountMismatch => write!(f, "outer_tags length differs from outer vertex count"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("malformed scene json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scene: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl Scene {
    pub fn new(outer: Vec<Point>, holes: Vec<Hole>, start: Point) -> Scene {
        Scene { outer, outer_tags: vec![], holes, start }
    }

    /// Parses JSON, fixes ring orientation and validates.
    pub fn from_json(s: &str) -> Result<Scene, SceneError> {
        let mut scene: Scene = serde_json::from_str(s)?;
        scene.normalize_orientation();
        validate_scene(&scene).map_err(SceneError::Invalid)?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    /// Reverses rings as needed so the outer ring is CCW and holes are CW.
    pub fn normalize_orientation(&mut self) {
        if signed_area(&self.outer) < 0.0 {
            self.outer.reverse();
            if !self.outer_tags.is_empty() {
                // Edge i ran v_i -> v_{i+1}; after reversal it runs between
                // the mirrored indices, one position earlier.
                self.outer_tags.reverse();
                self.outer_tags.rotate_left(1);
            }
        }
        for h in &mut self.holes {
            if signed_area(&h.vertices) > 0.0 {
                h.vertices.reverse();
            }
        }
    }

    pub fn h(&self) -> usize {
        self.holes.len()
    }

    pub fn ring(&self, r: RingKind) -> &[Point] {
        match r {
            RingKind::Outer => &self.outer,
            RingKind::Hole(i) => &self.holes[i].vertices,
        }
    }

    pub fn rings(&self) -> impl Iterator<Item = (RingKind, &[Point])> + '_ {
        std::iter::once((RingKind::Outer, self.outer.as_slice()))
            .chain(self.holes.iter().enumerate().map(|(i, h)| (RingKind::Hole(i), h.vertices.as_slice())))
    }

    /// Tag of edge `i` (from vertex `i` to `i+1`) of ring `r`.
    pub fn edge_tag(&self, r: RingKind, i: usize) -> BoundaryTag {
        match r {
            RingKind::Outer => self.outer_tags.get(i).copied().unwrap_or(BoundaryTag::Outer),
            RingKind::Hole(k) => BoundaryTag::Hole(self.holes[k].color),
        }
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.vertex_count());
        for (r, ring) in self.rings() {
            let n = ring.len();
            for i in 0..n {
                out.push(Edge { a: ring[i], b: ring[(i + 1) % n], tag: self.edge_tag(r, i), ring: r, index: i });
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(|h| h.vertices.len()).sum::<usize>()
    }

    pub fn hole_index(&self, color: Color) -> Option<usize> {
        self.holes.iter().position(|h| h.color == color)
    }

    pub fn hole(&self, color: Color) -> Option<&Hole> {
        self.holes.iter().find(|h| h.color == color)
    }

    pub fn colors(&self) -> Vec<Color> {
        self.holes.iter().map(|h| h.color).collect()
    }

    pub fn bbox(&self) -> (Point, Point) {
        bbox(self.outer.iter().copied())
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.dist(hi)
    }

    /// Area of free space.
    pub fn free_area(&self) -> f64 {
        signed_area(&self.outer) + self.holes.iter().map(|h| signed_area(&h.vertices)).sum::<f64>()
    }

    /// Perimeter of all boundaries.
    pub fn perimeter(&self) -> f64 {
        self.edges().iter().map(|e| e.a.dist(e.b)).sum()
    }

    /// Tolerance scaled to the scene's size.
    pub fn eps(&self) -> f64 {
        EPS_GEOM * (1.0 + self.diameter())
    }

    pub fn location(&self, p: Point) -> Location {
        point_location_eps(self, p, self.eps())
    }

    pub fn is_free(&self, p: Point) -> bool {
        self.location(p).is_free()
    }

    /// Reflex vertices of free space, as `(ring, index)`.
    pub fn reflex_vertices(&self) -> Vec<(RingKind, usize)> {
        let mut out = vec![];
        for (r, ring) in self.rings() {
            let n = ring.len();
            for i in 0..n {
                if orient_sign(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]) < 0 {
                    out.push((r, i));
                }
            }
        }
        out
    }
}

/// Classifies `p` with the default tolerance.
pub fn point_location(scene: &Scene, p: Point) -> Location {
    point_location_eps(scene, p, EPS_GEOM)
}

/// Classifies `p`; points within `eps` of a boundary count as on it.
pub fn point_location_eps(scene: &Scene, p: Point, eps: f64) -> Location {
    if ring_boundary_dist(&scene.outer, p) <= eps {
        return Location::OnOuterBoundary;
    }
    for h in &scene.holes {
        if ring_boundary_dist(&h.vertices, p) <= eps {
            return Location::OnHoleBoundary(h.color);
        }
    }
    if !ring_contains(&scene.outer, p) {
        return Location::Exterior;
    }
    for h in &scene.holes {
        if ring_contains(&h.vertices, p) {
            return Location::InsideHole(h.color);
        }
    }
    Location::Interior
}

fn rings_intersect(a: &[Point], b: &[Point]) -> bool {
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        let s = Segment::new(a[i], a[(i + 1) % na]);
        for j in 0..nb {
            let t = Segment::new(b[j], b[(j + 1) % nb]);
            if !matches!(segment_intersection(&s, &t), Ok(SegmentIntersection::None)) {
                return true;
            }
        }
    }
    false
}

fn has_repeat(ring: &[Point]) -> bool {
    let mut v: Vec<(u64, u64)> = ring.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
    v.sort_unstable();
    v.windows(2).any(|w| w[0] == w[1])
}

/// Checks all structural requirements of a scene, collecting every violation.
pub fn validate_scene(scene: &Scene) -> Result<(), Vec<Violation>> {
    let mut out = vec![];
    let all_finite = scene.rings().all(|(_, r)| r.iter().all(|p| p.is_finite())) && scene.start.is_finite();
    if !all_finite {
        return Err(vec![Violation::NonFinite]);
    }
    if scene.outer.len() < 3 {
        out.push(Violation::TooFewVertices { ring: "outer".into() });
    }
    for h in &scene.holes {
        if h.vertices.len() < 3 {
            out.push(Violation::TooFewVertices { ring: format!("hole {}", h.color) });
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    if !scene.outer_tags.is_empty() && scene.outer_tags.len() != scene.outer.len() {
        out.push(Violation::TagCountMismatch);
    }
    if has_repeat(&scene.outer) {
        out.push(Violation::RepeatedVertex { ring: "outer".into() });
    }
    if !ring_is_simple(&scene.outer) {
        out.push(Violation::OuterNotSimple);
    }
    if signed_area(&scene.outer) <= 0.0 {
        out.push(Violation::OuterNotCounterClockwise);
    }
    let mut seen = BTreeSet::new();
    for h in &scene.holes {
        if !seen.insert(h.color) {
            out.push(Violation::DuplicateColor { color: h.color });
        }
        if has_repeat(&h.vertices) {
            out.push(Violation::RepeatedVertex { ring: format!("hole {}", h.color) });
        }
        if !ring_is_simple(&h.vertices) {
            out.push(Violation::HoleNotSimple { color: h.color });
        }
        if signed_area(&h.vertices) >= 0.0 {
            out.push(Violation::HoleNotClockwise { color: h.color });
        }
        let inside = h.vertices.iter().all(|&v| ring_contains(&scene.outer, v))
            && !rings_intersect(&h.vertices, &scene.outer);
        if !inside {
            out.push(Violation::HoleNotInterior { color: h.color });
        }
    }
    for i in 0..scene.holes.len() {
        for j in i + 1..scene.holes.len() {
            let (a, b) = (&scene.holes[i], &scene.holes[j]);
            let nested = ring_contains(&a.vertices, b.vertices[0]) || ring_contains(&b.vertices, a.vertices[0]);
            if nested || rings_intersect(&a.vertices, &b.vertices) {
                out.push(Violation::HolesNotDisjoint { a: a.color, b: b.color });
            }
        }
    }
    if point_location_eps(scene, scene.start, scene.eps()) != Location::OnOuterBoundary {
        out.push(Violation::StartNotOnOuter);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
