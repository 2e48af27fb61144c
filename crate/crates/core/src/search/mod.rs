//! Search schedulers driven by an environment: doubling along two rays,
//! geometric star search over `m` rays, and the semicircle approach to a
//! blocking vertex.

use crate::geometry::{orient_sign, Point, Polyline, Scene};
use crate::visibility::{Side, Window};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Result of one outward probe along a ray.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub found: bool,
    /// Depth along the ray where the probe stopped.
    pub reached: f64,
    /// Distance actually walked by the robot during the probe.
    pub traveled: f64,
}

/// An exploration direction. Each probe starts at the common origin.
pub trait SearchRay {
    fn id(&self) -> usize;
    /// Walks out from the origin up to `depth`, stopping early when the
    /// target is detected.
    fn advance(&mut self, depth: f64) -> Probe;
    /// Walks back to the origin and returns the distance walked.
    fn retreat(&mut self) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub found_on: usize,
    pub target_depth: f64,
    pub total_traveled: f64,
    /// Number of probes issued, the successful one included.
    pub visits: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("search exhausted: no ray reported the target within depth {0}")]
    Exhausted(f64),
    #[error("search needs at least one ray")]
    NoRays,
}

/// Depth growth per visit for `m` rays.
pub fn star_base(m: usize) -> f64 {
    m as f64 / (m as f64 - 1.0)
}

/// Depth of visit `j` (0-based) and the ray it goes to.
pub fn star_visit(m: usize, unit: f64, j: usize) -> (usize, f64) {
    (j % m, unit * star_base(m).powi(j as i32))
}

/// The first `count` visits of the star schedule.
pub fn star_schedule(m: usize, unit: f64, count: usize) -> Vec<(usize, f64)> {
    (0..count).map(|j| star_visit(m, unit, j)).collect()
}

/// Doubling schedule: round `k` (1-based) goes `unit * 2^(k-1)` along ray `(k-1) mod 2`.
pub fn cow_schedule(unit: f64, count: usize) -> Vec<(usize, f64)> {
    (1..=count).map(|k| ((k - 1) % 2, unit * 2f64.powi(k as i32 - 1))).collect()
}

fn run_schedule(
    rays: &mut [&mut dyn SearchRay],
    schedule: impl Iterator<Item = (usize, f64)>,
    cap: f64,
) -> Result<SearchOutcome, SearchError> {
    let mut total = 0.0;
    for (j, (r, depth)) in schedule.enumerate() {
        let d = depth.min(cap);
        let probe = rays[r].advance(d);
        total += probe.traveled;
        if probe.found {
            return Ok(SearchOutcome {
                found_on: rays[r].id(),
                target_depth: probe.reached,
                total_traveled: total,
                visits: j + 1,
            });
        }
        total += rays[r].retreat();
        if depth >= cap {
            return Err(SearchError::Exhausted(cap));
        }
    }
    Err(SearchError::Exhausted(cap))
}

/// Alternates between two rays with doubling depths, the `first` ray first.
pub fn cow_path(
    first: &mut dyn SearchRay,
    second: &mut dyn SearchRay,
    unit: f64,
    cap: f64,
) -> Result<SearchOutcome, SearchError> {
    let mut rays: [&mut dyn SearchRay; 2] = [first, second];
    let sched = (1..).map(|k: i32| (((k - 1) % 2) as usize, unit * 2f64.powi(k - 1)));
    run_schedule(&mut rays, sched, cap)
}

/// Cyclic star search over all rays with depth base `m/(m-1)`.
pub fn star_search(rays: &mut [&mut dyn SearchRay], unit: f64, cap: f64) -> Result<SearchOutcome, SearchError> {
    let m = rays.len();
    match m {
        0 => Err(SearchError::NoRays),
        1 => run_schedule(rays, std::iter::once((0, cap)), cap),
        _ => run_schedule(rays, (0..).map(move |j| star_visit(m, unit, j)), cap),
    }
}

/// Continues a star schedule for `count` more visits after `done` visits,
/// retreating after each one. Returns the distance walked.
pub fn continue_schedule(rays: &mut [&mut dyn SearchRay], unit: f64, done: usize, count: usize, cap: f64) -> f64 {
    let m = rays.len();
    if m < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in done..done + count {
        let (r, depth) = star_visit(m, unit, j);
        total += rays[r].advance(depth.min(cap)).traveled;
        total += rays[r].retreat();
    }
    total
}

/// A ray with a target at a fixed depth, for simulations.
#[derive(Clone, Debug)]
pub struct LineRay {
    pub id: usize,
    pub target: Option<f64>,
    pos: f64,
    frontier: f64,
}

impl LineRay {
    pub fn new(id: usize, target: Option<f64>) -> Self {
        LineRay { id, target, pos: 0.0, frontier: 0.0 }
    }

    /// Deepest point ever reached on this ray.
    pub fn frontier(&self) -> f64 {
        self.frontier
    }
}

impl SearchRay for LineRay {
    fn id(&self) -> usize {
        self.id
    }

    fn advance(&mut self, depth: f64) -> Probe {
        let stop = match self.target {
            Some(t) if t <= depth => t,
            _ => depth,
        };
        self.pos = stop;
        self.frontier = self.frontier.max(stop);
        Probe { found: self.target.is_some_and(|t| t <= depth), reached: stop, traveled: stop }
    }

    fn retreat(&mut self) -> f64 {
        std::mem::take(&mut self.pos)
    }
}

/// Something that can walk straight lines and report obstruction.
pub trait Walker {
    fn position(&self) -> Point;
    /// Walks straight to `p`. On obstruction, stops at the returned point.
    fn walk_to(&mut self, p: Point) -> Result<f64, Point>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ApproachEnd {
    /// The cut was crossed; the edge behind the vertex is now in view.
    Crossed,
    /// The robot was already across the cut.
    AlreadyCrossed,
    /// The arc ran into an obstacle at this point.
    Blocked(Point),
    /// The arc ended at the blocking vertex itself.
    ReachedVertex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approach {
    pub path: Polyline,
    pub length: f64,
    pub end: ApproachEnd,
}

/// The hidden edge behind a window's blocking vertex, as `(a, b)` in ring
/// order (free space on its left).
pub fn hidden_edge(scene: &Scene, w: &Window) -> Option<(Point, Point)> {
    let v = w.blocking_vertex;
    let line = (w.chord.a, w.chord.b);
    for (_, ring) in scene.rings() {
        let n = ring.len();
        if let Some(i) = ring.iter().position(|&q| q == v) {
            let (prev, next) = (ring[(i + n - 1) % n], ring[(i + 1) % n]);
            let hidden = |q: Point| match w.side {
                Side::Left => orient_sign(line.0, line.1, q) > 0,
                Side::Right => orient_sign(line.0, line.1, q) < 0,
            };
            if hidden(next) {
                return Some((v, next));
            }
            if hidden(prev) {
                return Some((prev, v));
            }
        }
    }
    None
}

/// Walks the half circle with diameter from the robot to `vertex`, on the
/// side of the cut, until the line of the hidden edge `(a, b)` is crossed.
pub fn semicircle_approach<W: Walker>(
    walker: &mut W,
    vertex: Point,
    hidden: (Point, Point),
    arc_tolerance: f64,
) -> Approach {
    let x = walker.position();
    let (a, b) = hidden;
    let crossed = |q: Point| orient_sign(a, b, q) > 0;
    if crossed(x) {
        return Approach { path: Polyline::open(vec![x]), length: 0.0, end: ApproachEnd::AlreadyCrossed };
    }
    let o = x.lerp(vertex, 0.5);
    let r = x.dist(vertex) / 2.0;
    if r == 0.0 {
        return Approach { path: Polyline::open(vec![x]), length: 0.0, end: ApproachEnd::ReachedVertex };
    }
    // The cut extends the hidden edge beyond the vertex.
    let cut_dir = if vertex == b { b.sub(a) } else { a.sub(b) };
    let sign = if orient_sign(x, vertex, vertex.add(cut_dir)) > 0 { -1.0 } else { 1.0 };
    let tol = arc_tolerance.max(1e-12);
    let dphi = (2.0 * (1.0 - tol / r).clamp(-1.0, 1.0).acos()).clamp(1e-6, std::f64::consts::PI / 16.0);
    let steps = (std::f64::consts::PI / dphi).ceil() as usize;
    let phi0 = x.sub(o).angle();
    let mut path = vec![x];
    let mut length = 0.0;
    let mut prev = x;
    for k in 1..=steps {
        let phi = phi0 + sign * std::f64::consts::PI * k as f64 / steps as f64;
        let mut y = if k == steps { vertex } else { o.add(Point::new(phi.cos(), phi.sin()).scale(r)) };
        let hit = crossed(y);
        if hit {
            // Stop right on the far side of the line.
            let t = crate::geometry::line_intersection(prev, y, a, b);
            let beyond = t.add(y.sub(prev).unit().scale(1e-9 * (1.0 + r)));
            y = if prev.dist(beyond) < prev.dist(y) { beyond } else { y };
        }
        match walker.walk_to(y) {
            Ok(d) => {
                length += d;
                path.push(y);
                prev = y;
            }
            Err(stop) => {
                length += prev.dist(stop);
                path.push(stop);
                return Approach { path: Polyline::open(path), length, end: ApproachEnd::Blocked(stop) };
            }
        }
        if hit {
            return Approach { path: Polyline::open(path), length, end: ApproachEnd::Crossed };
        }
    }
    Approach { path: Polyline::open(path), length, end: ApproachEnd::ReachedVertex }
}

/// Straight-line distance from `x` to the cut ray starting at `vertex`.
pub fn distance_to_cut(x: Point, vertex: Point, hidden: (Point, Point)) -> f64 {
    let (a, b) = hidden;
    let c = if vertex == b { b.sub(a) } else { a.sub(b) }.unit();
    let t = x.sub(vertex).dot(c);
    if t <= 0.0 {
        x.dist(vertex)
    } else {
        x.dist(vertex.add(c.scale(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_on_first_ray() {
        let mut a = LineRay::new(0, Some(1.0));
        let mut b = LineRay::new(1, None);
        let out = cow_path(&mut a, &mut b, 1.0, 1e6).unwrap();
        assert_eq!(out.total_traveled, 1.0);
        assert_eq!(out.found_on, 0);
    }

    #[test]
    fn target_at_zero_depth() {
        let mut a = LineRay::new(0, None);
        let mut b = LineRay::new(1, Some(0.0));
        let mut c = LineRay::new(2, Some(0.0));
        let out = cow_path(&mut b, &mut a, 1.0, 1e6).unwrap();
        assert_eq!(out.total_traveled, 0.0);
        let out = cow_path(&mut c, &mut LineRay::new(3, None), 1.0, 1e6).unwrap();
        assert_eq!(out.total_traveled, 0.0);
    }

    #[test]
    fn exhaustion() {
        let mut a = LineRay::new(0, None);
        let mut b = LineRay::new(1, None);
        assert_eq!(cow_path(&mut a, &mut b, 1.0, 100.0), Err(SearchError::Exhausted(100.0)));
    }

    #[test]
    fn two_ray_star_matches_doubling() {
        assert_eq!(star_schedule(2, 0.5, 20), cow_schedule(0.5, 20));
    }

    #[test]
    fn frontier_is_monotone() {
        let mut a = LineRay::new(0, None);
        let mut b = LineRay::new(1, Some(50.0));
        let mut last = 0.0;
        for (r, d) in star_schedule(2, 1.0, 8) {
            if r == 0 {
                a.advance(d);
                a.retreat();
                assert!(a.frontier() >= last);
                last = a.frontier();
            }
        }
        let _ = b.advance(1.0);
    }

    struct Free {
        at: Point,
    }
    impl Walker for Free {
        fn position(&self) -> Point {
            self.at
        }
        fn walk_to(&mut self, p: Point) -> Result<f64, Point> {
            let d = self.at.dist(p);
            self.at = p;
            Ok(d)
        }
    }

    #[test]
    fn semicircle_perpendicular_cut() {
        // Vertex at the origin, hidden edge going up, robot to the right.
        let v = Point::new(0.0, 0.0);
        let hidden = (v, Point::new(0.0, 5.0));
        let mut w = Free { at: Point::new(3.0, -1.0) };
        let out = semicircle_approach(&mut w, v, hidden, 1e-5);
        assert_eq!(out.end, ApproachEnd::Crossed);
        let d = distance_to_cut(Point::new(3.0, -1.0), v, hidden);
        assert!(out.length <= 2.0 * d + 1e-6);
    }

    #[test]
    fn semicircle_already_crossed() {
        let v = Point::new(0.0, 0.0);
        let hidden = (v, Point::new(0.0, 5.0));
        let mut w = Free { at: Point::new(-1.0, -1.0) };
        let out = semicircle_approach(&mut w, v, hidden, 1e-5);
        assert_eq!(out.end, ApproachEnd::AlreadyCrossed);
        assert_eq!(out.length, 0.0);
    }
}
