//! Test-side oracles. Everything here is written from scratch on plain
//! coordinates so that it shares no code path with the library under test.
#![allow(dead_code)]

use cpex::geometry::{Hole, Point, Scene};
use rand::Rng;

pub mod checks;
use rand_chacha::ChaCha8Rng;

pub fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn seg_dist(a: Point, b: Point, q: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 { 0.0 } else { (((q.x - a.x) * dx + (q.y - a.y) * dy) / l2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.x + t * dx, a.y + t * dy);
    ((q.x - cx).powi(2) + (q.y - cy).powi(2)).sqrt()
}

pub fn rings(scene: &Scene) -> Vec<&[Point]> {
    std::iter::once(scene.outer.as_slice()).chain(scene.holes.iter().map(|h| h.vertices.as_slice())).collect()
}

pub fn all_edges(scene: &Scene) -> Vec<(Point, Point)> {
    let mut out = vec![];
    for r in rings(scene) {
        for i in 0..r.len() {
            out.push((r[i], r[(i + 1) % r.len()]));
        }
    }
    out
}

/// Crossing-number point-in-ring test.
pub fn in_ring(ring: &[Point], q: Point) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

pub fn on_boundary(scene: &Scene, q: Point, tol: f64) -> bool {
    all_edges(scene).iter().any(|&(a, b)| seg_dist(a, b, q) <= tol)
}

/// Closed free space: boundary points count as free.
pub fn free(scene: &Scene, q: Point, tol: f64) -> bool {
    if on_boundary(scene, q, tol) {
        return true;
    }
    in_ring(&scene.outer, q) && !scene.holes.iter().any(|h| in_ring(&h.vertices, q))
}

pub fn strictly_free(scene: &Scene, q: Point) -> bool {
    in_ring(&scene.outer, q) && !scene.holes.iter().any(|h| in_ring(&h.vertices, q))
}

/// Whether the closed segment `ab` stays in closed free space: no proper
/// crossing with an edge, and every piece between boundary vertices lying on
/// it has a free midpoint.
pub fn segment_free(scene: &Scene, a: Point, b: Point, tol: f64) -> bool {
    for (c, d) in all_edges(scene) {
        let (d1, d2) = (cross(a, b, c), cross(a, b, d));
        let (d3, d4) = (cross(c, d, a), cross(c, d, b));
        let scale = (b.x - a.x).hypot(b.y - a.y) * (d.x - c.x).hypot(d.y - c.y);
        let t = tol * scale.max(1e-300);
        if ((d1 > t && d2 < -t) || (d1 < -t && d2 > t)) && ((d3 > t && d4 < -t) || (d3 < -t && d4 > t)) {
            return false;
        }
    }
    let len2 = (b.x - a.x).powi(2) + (b.y - a.y).powi(2);
    let mut ts = vec![0.0, 1.0];
    for r in rings(scene) {
        for &v in r {
            if seg_dist(a, b, v) <= tol {
                ts.push((((v.x - a.x) * (b.x - a.x) + (v.y - a.y) * (b.y - a.y)) / len2).clamp(0.0, 1.0));
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.windows(2).filter(|w| w[1] - w[0] > 1e-12).all(|w| {
        let t = 0.5 * (w[0] + w[1]);
        free(scene, p(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)), tol)
    })
}

/// Distance along the ray `o + t u` (`u` unit) to the first boundary edge.
pub fn ray_cast(scene: &Scene, o: Point, u: Point) -> f64 {
    let mut best = f64::INFINITY;
    for (a, b) in all_edges(scene) {
        let e = p(b.x - a.x, b.y - a.y);
        let den = u.x * e.y - u.y * e.x;
        if den.abs() < 1e-300 {
            continue;
        }
        let w = p(a.x - o.x, a.y - o.y);
        let t = (w.x * e.y - w.y * e.x) / den;
        let s = (w.x * u.y - w.y * u.x) / den;
        if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&s) {
            best = best.min(t);
        }
    }
    best
}

pub fn random_free_point(scene: &Scene, rng: &mut ChaCha8Rng) -> Point {
    let (mut lo, mut hi) = (p(f64::INFINITY, f64::INFINITY), p(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for q in &scene.outer {
        lo = p(lo.x.min(q.x), lo.y.min(q.y));
        hi = p(hi.x.max(q.x), hi.y.max(q.y));
    }
    let diam = (hi.x - lo.x).hypot(hi.y - lo.y);
    loop {
        let q = p(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if strictly_free(scene, q) && !on_boundary(scene, q, 1e-6 * diam) {
            return q;
        }
    }
}

pub fn poly_len(pts: &[Point], closed: bool) -> f64 {
    let mut l: f64 = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
    if closed && pts.len() > 1 {
        l += pts[pts.len() - 1].dist(pts[0]);
    }
    l
}

/// Winding number of the closed polygon `pts` around `c` by angle summation.
pub fn winding(pts: &[Point], c: Point) -> i32 {
    let n = pts.len();
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let (ua, ub) = (p(a.x - c.x, a.y - c.y), p(b.x - c.x, b.y - c.y));
        total += (ua.x * ub.y - ua.y * ub.x).atan2(ua.x * ub.x + ua.y * ub.y);
    }
    (total / std::f64::consts::TAU).round() as i32
}

/// Some point strictly inside a simple ring, found by scanning a grid.
pub fn point_inside(ring: &[Point]) -> Point {
    let (mut lo, mut hi) = (p(f64::INFINITY, f64::INFINITY), p(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for q in ring {
        lo = p(lo.x.min(q.x), lo.y.min(q.y));
        hi = p(hi.x.max(q.x), hi.y.max(q.y));
    }
    for k in 1..200 {
        for j in 1..k {
            for i in 1..k {
                let q = p(lo.x + (hi.x - lo.x) * i as f64 / k as f64, lo.y + (hi.y - lo.y) * j as f64 / k as f64);
                if in_ring(ring, q) {
                    return q;
                }
            }
        }
    }
    panic!("no interior point found")
}

/// Shortest closed polygon through the start winding once counter-clockwise
/// around hole `color`, by exhaustive search over sequences of distinct
/// boundary vertices (mutually visible consecutive pairs), with
/// branch-and-bound on length.
pub fn brute_encircling(scene: &Scene, color: u32, max_len: usize) -> Option<(f64, Vec<Point>)> {
    let tol = 1e-9 * (1.0 + scene.diameter());
    let hole = scene.holes.iter().find(|h| h.color == color)?;
    let c = point_inside(&hole.vertices);
    let s = scene.start;
    let mut nodes = vec![s];
    for r in rings(scene) {
        nodes.extend_from_slice(r);
    }
    let n = nodes.len();
    let mut vis = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = nodes[i] != nodes[j] && segment_free(scene, nodes[i], nodes[j], tol);
            vis[i][j] = v;
            vis[j][i] = v;
        }
    }
    struct Search<'a> {
        nodes: &'a [Point],
        vis: &'a [Vec<bool>],
        c: Point,
        best: f64,
        best_path: Vec<usize>,
        max_len: usize,
    }
    fn dfs(st: &mut Search, path: &mut Vec<usize>, used: &mut [bool], len: f64) {
        let last = *path.last().unwrap();
        let n = st.nodes.len();
        if path.len() >= 3 && st.vis[last][0] {
            let total = len + st.nodes[last].dist(st.nodes[0]);
            if total < st.best - 1e-12 {
                let pts: Vec<Point> = path.iter().map(|&i| st.nodes[i]).collect();
                if winding(&pts, st.c) == 1 {
                    st.best = total;
                    st.best_path = path.clone();
                }
            }
        }
        if path.len() > st.max_len {
            return;
        }
        for j in 1..n {
            if used[j] || !st.vis[last][j] {
                continue;
            }
            let l = len + st.nodes[last].dist(st.nodes[j]);
            // Returning to the start costs at least the straight distance.
            if l + st.nodes[j].dist(st.nodes[0]) >= st.best {
                continue;
            }
            used[j] = true;
            path.push(j);
            dfs(st, path, used, l);
            path.pop();
            used[j] = false;
        }
    }
    let mut st = Search { nodes: &nodes, vis: &vis, c, best: f64::INFINITY, best_path: vec![], max_len };
    let mut used = vec![false; n];
    used[0] = true;
    dfs(&mut st, &mut vec![0], &mut used, 0.0);
    st.best.is_finite().then(|| (st.best, st.best_path.iter().map(|&i| nodes[i]).collect()))
}

/// Rectangular room with one long thin hole ("needle") parallel to its
/// walls, the whole scene rotated by a random angle. The start sits on the
/// near wall, off-centre: the tour around the needle is long while the
/// nearer tip is cheap to look around.
pub fn needle_scene(rng: &mut ChaCha8Rng) -> Scene {
    let h = rng.gen_range(3.0..6.0);
    let width = rng.gen_range(0.02..0.2);
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (u, v) = (p(th.cos(), th.sin()), p(-th.sin(), th.cos()));
    let at = |a: f64, b: f64| p(20.0 + a * u.x + b * v.x, 20.0 + a * u.y + b * v.y);
    // Thin diamond, clockwise.
    let ring = vec![at(-h, 0.0), at(0.0, width), at(h, 0.0), at(0.0, -width)];
    let (len, near, far) = (h + rng.gen_range(1.0..6.0), rng.gen_range(0.3..2.0), rng.gen_range(1.0..8.0));
    let outer = vec![at(-len, -near), at(len, -near), at(len, far), at(-len, far)];
    let shift = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let start = at(shift * rng.gen_range(0.0..0.6) * h, -near);
    Scene::new(outer, vec![Hole { color: 1, vertices: ring }], start)
}
