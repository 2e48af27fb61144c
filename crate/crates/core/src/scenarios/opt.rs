//! Offline bounds on the optimal watchman tour through the start.
//!
//! The lower bound combines two certificates: every boundary edge must be
//! seen from its free side, so a tour reaches the half-plane in front of any
//! edge the start is behind; and the λ bound of each hole's encircling tour.
//! The upper bound is an actual covering tour through greedily chosen
//! witness points.

use crate::coverage::{free_mask, Raster};
use crate::geodesic::{encircling_tour_in, lambda_lower_bound_in, Field, VisGraph, LAMBDA_RESOLUTION};
use crate::geometry::{orient_sign, Point, Polyline, Scene, Segment};
use crate::visibility::{sees_unchecked, visibility_polygon, VisibilityPolygon};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    /// Raster cells per diameter for the coverage check.
    pub raster_cells: usize,
    /// Required covered fraction of free-space samples.
    pub coverage: f64,
    /// Witness insertions before giving up.
    pub repair_cap: usize,
    /// Sampled robot positions for witness candidates.
    pub positions: usize,
    pub lambda_resolution: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig { raster_cells: 300, coverage: 0.999, repair_cap: 400, positions: 16, lambda_resolution: LAMBDA_RESOLUTION }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptBounds {
    pub lower: f64,
    /// Infinite when no covering tour was found within the repair cap.
    pub upper: f64,
    /// The covering tour behind `upper`, closed at the start.
    pub tour: Option<Polyline>,
    /// Covered fraction of the raster for `tour`.
    pub coverage: f64,
}

/// Twice the distance from the start to the line of the farthest edge it is
/// strictly behind.
pub fn cut_lower_bound(scene: &Scene) -> f64 {
    let s = scene.start;
    scene
        .edges()
        .iter()
        .filter(|e| orient_sign(e.a, e.b, s) < 0)
        .map(|e| {
            let d = e.b.sub(e.a);
            2.0 * d.cross(s.sub(e.a)).abs() / d.norm()
        })
        .fold(0.0, f64::max)
}

pub fn opt_bounds(scene: &Scene) -> OptBounds {
    opt_bounds_with(scene, &OptConfig::default())
}

pub fn opt_bounds_with(scene: &Scene, cfg: &OptConfig) -> OptBounds {
    let g = VisGraph::new(scene);
    let mut lower = cut_lower_bound(scene);
    for c in scene.colors() {
        if let Ok(t) = encircling_tour_in(&g, scene.start, c) {
            if let Ok((l, _)) = lambda_lower_bound_in(&g, &t, cfg.lambda_resolution) {
                lower = lower.max(l);
            }
        }
    }
    let (upper, tour, coverage) = match covering_tour(scene, &g, cfg) {
        Some((t, cov)) => (t.length(), Some(t), cov),
        None => (f64::INFINITY, None, 0.0),
    };
    OptBounds { lower, upper, tour, coverage }
}

fn halton(i: usize, base: usize) -> f64 {
    let (mut f, mut r, mut i) = (1.0, 0.0, i);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn sample_positions(scene: &Scene, k: usize) -> Vec<Point> {
    let (lo, hi) = scene.bbox();
    let mut out = vec![];
    for i in 1..20_000 {
        if out.len() >= k {
            break;
        }
        let q = Point::new(lo.x + halton(i, 2) * (hi.x - lo.x), lo.y + halton(i, 3) * (hi.y - lo.y));
        if scene.is_free(q) {
            out.push(q);
        }
    }
    out
}

/// Points in front of edges close to where a robot would first see them,
/// plus window midpoints seen from sampled positions.
fn candidates(scene: &Scene, positions: &[Point]) -> Vec<Point> {
    let diam = scene.diameter();
    let nudge = 1e-4 * diam;
    let mut out = vec![];
    for e in scene.edges() {
        let seg = Segment::new(e.a, e.b);
        if seg.is_degenerate() {
            continue;
        }
        let n = e.b.sub(e.a).unit().perp();
        out.push(seg.midpoint().add(n.scale(0.02 * diam)));
        for &x in positions {
            let t = seg.project_param(x);
            out.push(seg.at(t).add(n.scale(nudge)));
            out.push(seg.closest_point(x).add(n.scale(nudge)));
        }
    }
    for &x in positions {
        if let Ok(vp) = visibility_polygon(scene, x) {
            out.extend(vp.windows.iter().map(|w| w.chord.midpoint()));
        }
    }
    out.retain(|&q| q.is_finite() && scene.is_free(q));
    out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    out.dedup();
    out
}

const EDGE_SAMPLES: usize = 8;

fn key(p: Point) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

struct Tsp<'g> {
    g: &'g VisGraph,
    nodes: Vec<Point>,
    fields: Vec<Field>,
}

impl Tsp<'_> {
    fn add(&mut self, p: Point) {
        self.fields.push(self.g.field(&[(p, 0.0)]));
        self.nodes.push(p);
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.g.dist_to(&self.fields[i], self.nodes[j]).0
        }
    }

    /// Nearest neighbour from node 0, improved by 2-opt; returns the order.
    fn order(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.dist(i, j)).collect()).collect();
        let mut tour = vec![0];
        let mut left: Vec<usize> = (1..n).collect();
        while !left.is_empty() {
            let cur = *tour.last().unwrap();
            let (k, _) = left.iter().enumerate().min_by(|a, b| d[cur][*a.1].total_cmp(&d[cur][*b.1])).unwrap();
            tour.push(left.remove(k));
        }
        let len = tour.len();
        let mut improved = true;
        while improved && len > 3 {
            improved = false;
            for i in 0..len - 1 {
                for j in i + 2..len {
                    let (a, b) = (tour[i], tour[i + 1]);
                    let (c, e) = (tour[j], tour[(j + 1) % len]);
                    if a == e {
                        continue;
                    }
                    if d[a][c] + d[b][e] < d[a][b] + d[c][e] - 1e-12 {
                        tour[i + 1..=j].reverse();
                        improved = true;
                    }
                }
            }
        }
        tour
    }

    fn polyline(&self, order: &[usize]) -> Polyline {
        let mut pts = vec![self.nodes[0]];
        for w in 0..order.len() {
            let (i, j) = (order[w], order[(w + 1) % order.len()]);
            if i == j {
                continue;
            }
            let (_, last) = self.g.dist_to(&self.fields[i], self.nodes[j]);
            pts.extend(self.g.path_to(&self.fields[i], self.nodes[j], last).into_iter().skip(1));
        }
        pts.dedup();
        Polyline::open(pts)
    }
}

struct Seen {
    vp: Option<VisibilityPolygon>,
    raster: Raster,
}

/// Edge samples strictly inside each boundary edge, with the edge's
/// free-side normal.
fn edge_samples(scene: &Scene, per_edge: usize) -> Vec<(Point, Segment, Point)> {
    let mut out = vec![];
    for e in scene.edges() {
        let seg = Segment::new(e.a, e.b);
        if seg.is_degenerate() {
            continue;
        }
        let n = e.b.sub(e.a).unit().perp();
        for k in 0..per_edge {
            out.push((seg.at((k as f64 + 0.5) / per_edge as f64), seg, n));
        }
    }
    out
}

/// Greedy witness insertion until the tour sees every edge sample and the
/// required fraction of free-space samples.
fn covering_tour(scene: &Scene, g: &VisGraph, cfg: &OptConfig) -> Option<(Polyline, f64)> {
    let diam = scene.diameter();
    let cell = diam / cfg.raster_cells.max(1) as f64;
    let tol = 1e-7 * diam;
    let free = free_mask(scene, cell);
    let total = free.count().max(1);
    let mut cache: HashMap<(u64, u64), Seen> = HashMap::new();
    let look = |cache: &mut HashMap<(u64, u64), Seen>, p: Point| {
        cache.entry(key(p)).or_insert_with(|| {
            let vp = visibility_polygon(scene, p).ok();
            let mut raster = Raster::for_scene(scene, cell);
            if let Some(vp) = &vp {
                raster.fill(&[&vp.boundary.vertices]);
            }
            Seen { vp, raster }
        });
        key(p)
    };
    let positions = {
        let mut v = vec![scene.start];
        v.extend(sample_positions(scene, cfg.positions));
        v
    };
    let cands = candidates(scene, &positions);
    let samples = edge_samples(scene, EDGE_SAMPLES);
    let mut tsp = Tsp { g, nodes: vec![], fields: vec![] };
    tsp.add(scene.start);
    let mut skipped_cells: HashSet<(usize, usize)> = HashSet::new();
    let mut skipped_samples: HashSet<usize> = HashSet::new();
    for _ in 0..=cfg.repair_cap {
        let order = tsp.order();
        let tour = tsp.polyline(&order);
        let keys: Vec<(u64, u64)> = tour.vertices.iter().map(|&v| look(&mut cache, v)).collect();
        let mut cover = Raster::for_scene(scene, cell);
        for k in &keys {
            cover.union_with(&cache[k].raster);
        }
        let seen = |q: Point| keys.iter().any(|k| cache[k].vp.as_ref().is_some_and(|vp| vp.contains(q, tol)));
        let unseen_sample = (0..samples.len()).find(|&i| !skipped_samples.contains(&i) && !seen(samples[i].0));
        let covered = cover.count_and(&free);
        if unseen_sample.is_none() && covered as f64 >= cfg.coverage * total as f64 {
            let mut closed = tour.vertices.clone();
            if closed.len() > 1 {
                closed.push(scene.start);
            }
            return Some((Polyline::open(closed), covered as f64 / total as f64));
        }
        let f = g.field(&tour.vertices.iter().map(|&v| (v, 0.0)).collect::<Vec<_>>());
        let nearest = |ok: &dyn Fn(Point) -> bool| {
            cands
                .iter()
                .filter(|&&c| ok(c))
                .map(|&c| (g.dist_to(&f, c).0, c))
                .filter(|(d, _)| d.is_finite())
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.x.total_cmp(&b.1.x)).then(a.1.y.total_cmp(&b.1.y)))
                .map(|(_, c)| c)
        };
        let w = if let Some(i) = unseen_sample {
            let (q, seg, n) = samples[i];
            let front = |c: Point| orient_sign(seg.a, seg.b, c) > 0 && sees_unchecked(scene, c, q);
            let fallback = q.add(n.scale(1e-4 * diam));
            match nearest(&front).or_else(|| scene.is_free(fallback).then_some(fallback)) {
                Some(w) if !tsp.nodes.contains(&w) => {
                    let k = look(&mut cache, w);
                    if !cache[&k].vp.as_ref().is_some_and(|vp| vp.contains(q, tol)) {
                        skipped_samples.insert(i);
                    }
                    w
                }
                _ => {
                    skipped_samples.insert(i);
                    continue;
                }
            }
        } else {
            let Some((i, j)) = (0..free.ny)
                .flat_map(|j| (0..free.nx).map(move |i| (i, j)))
                .find(|&(i, j)| free.get(i, j) && !cover.get(i, j) && !skipped_cells.contains(&(i, j)))
            else {
                return None;
            };
            let p = free.center(i, j);
            match nearest(&|c: Point| sees_unchecked(scene, c, p)).or_else(|| scene.is_free(p).then_some(p)) {
                Some(w) if !tsp.nodes.contains(&w) => {
                    let k = look(&mut cache, w);
                    if !cache[&k].raster.get(i, j) {
                        skipped_cells.insert((i, j));
                    }
                    w
                }
                _ => {
                    skipped_cells.insert((i, j));
                    continue;
                }
            }
        };
        tsp.add(w);
    }
    None
}
