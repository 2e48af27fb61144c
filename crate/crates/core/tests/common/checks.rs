//! Measurement loops shared by the property tests and the acceptance run.

use super::*;
use cpex::geodesic::{
    angle_hull, apex_angle, build_fence, encircling_tour, eulerian_safe_tour, lambda_lower_bound, path_to_hole,
    VisGraph, LAMBDA_RESOLUTION,
};
use cpex::geometry::{Polyline, Segment};
use cpex::scenarios::{gen_random, opt_bounds};
use cpex::search::{distance_to_cut, semicircle_approach, Walker};
use cpex::visibility::{visibility_polygon, Side};
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

#[derive(Debug, Default)]
pub struct VisStats {
    pub scenes: usize,
    pub viewpoints: usize,
    pub rays: usize,
    pub mismatches: usize,
    pub max_err: f64,
}

/// Compares radial distances of visibility polygons with plain ray casting on
/// random scenes with up to three holes and at most 40 vertices.
pub fn visibility_sweep(scenes: usize, viewpoints: usize, rays: usize, tol: f64, seed: u64) -> VisStats {
    let mut st = VisStats::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..scenes {
        let h = k % 4;
        let n = 8 + (k * 7) % 13;
        let scene = gen_random(h, n, seed.wrapping_add(k as u64)).expect("random scene").scene;
        assert!(scene.vertex_count() <= 40);
        st.scenes += 1;
        for _ in 0..viewpoints {
            let o = random_free_point(&scene, &mut rng);
            let vp = visibility_polygon(&scene, o).expect("interior viewpoint");
            st.viewpoints += 1;
            for _ in 0..rays {
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let u = p(th.cos(), th.sin());
                let want = ray_cast(&scene, o, u);
                let got = vp.radial_distance(u);
                let err = (want - got).abs();
                st.rays += 1;
                st.max_err = st.max_err.max(err);
                if err > tol {
                    st.mismatches += 1;
                }
            }
        }
    }
    st
}

#[derive(Debug)]
pub struct TourCase {
    pub label: String,
    pub color: u32,
    pub library: f64,
    pub brute: f64,
}

/// Encircling tours of small random scenes against exhaustive search.
pub fn encircling_cases(count: usize, seed: u64) -> Vec<TourCase> {
    let mut out = vec![];
    let mut k = 0u64;
    while out.len() < count {
        let h = 1 + (k % 2) as usize;
        let n = 5 + (k % 3) as usize;
        let b = gen_random(h, n, seed.wrapping_add(k)).expect("random scene");
        k += 1;
        for hole in &b.scene.holes {
            let lib = encircling_tour(&b.scene, hole.color).expect("library tour");
            let (brute, _) = brute_encircling(&b.scene, hole.color, 10).expect("brute-force tour");
            out.push(TourCase { label: b.label.clone(), color: hole.color, library: lib.length, brute });
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct FenceStats {
    pub scenes: usize,
    pub critical: usize,
    pub max_angle: f64,
    pub violations: usize,
    pub fence_errors: usize,
    pub max_area_err: f64,
}

/// Apex angle and fence partition on needle scenes whose tour exceeds 5λ.
pub fn fence_sweep(scenes: usize, seed: u64) -> FenceStats {
    let mut st = FenceStats::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..scenes {
        let scene = needle_scene(&mut rng);
        st.scenes += 1;
        let t = encircling_tour(&scene, 1).expect("tour");
        let (lambda, w) = lambda_lower_bound(&scene, &t, LAMBDA_RESOLUTION).expect("lambda");
        if t.length <= 5.0 * lambda {
            continue;
        }
        st.critical += 1;
        let a = apex_angle(&t, w.apex_index);
        st.max_angle = st.max_angle.max(a);
        if a >= PI / 6.0 {
            st.violations += 1;
        }
        match build_fence(&scene, &t, &w) {
            Ok(f) => {
                let area = |s: &cpex::geometry::Scene| {
                    ring_area(&s.outer).abs() - s.holes.iter().map(|h| ring_area(&h.vertices).abs()).sum::<f64>()
                };
                let total = area(&scene);
                let err = (area(&f.frontyard) + area(&f.backyard) - total).abs() / total;
                st.max_area_err = st.max_area_err.max(err);
            }
            Err(_) => st.fence_errors += 1,
        }
    }
    st
}

pub fn ring_area(r: &[Point]) -> f64 {
    let n = r.len();
    0.5 * (0..n).map(|i| r[i].x * r[(i + 1) % n].y - r[(i + 1) % n].x * r[i].y).sum::<f64>()
}

#[derive(Debug, Default)]
pub struct EulerStats {
    pub cases: usize,
    pub max_formula_err: f64,
    pub safe_cases: usize,
    pub max_safe_ratio: f64,
}

/// Length identity of the Eulerian tour on random one-hole scenes, with the
/// constructed covering tour as the reference tour.
pub fn euler_sweep(count: usize, seed: u64) -> EulerStats {
    let mut st = EulerStats::default();
    let mut k = 0;
    while st.cases < count {
        let b = gen_random(1, 10, seed.wrapping_add(k)).expect("random scene");
        k += 1;
        let scene = &b.scene;
        let Some(reference) = opt_bounds(scene).tour else { continue };
        let t = encircling_tour(scene, 1).expect("tour");
        let g = VisGraph::new(scene);
        let bar = path_to_hole(&g, scene.start, 1).expect("barrier");
        let e = eulerian_safe_tour(&t, &bar, &reference);
        let (lr, lb, lref) = (t.length, poly_len(&bar.vertices, false), poly_len(&reference.vertices, true));
        let want = 2.0 * (lr + 2.0 * lb + lref);
        let got = poly_len(&e.vertices, true);
        st.cases += 1;
        st.max_formula_err = st.max_formula_err.max((got - want).abs() / want);
        if lr <= 5.0 * lref {
            st.safe_cases += 1;
            st.max_safe_ratio = st.max_safe_ratio.max(got / lref);
        }
    }
    st
}

fn box_scene(half: f64, holes: Vec<Hole>, start: Point) -> Scene {
    let outer = vec![p(-half, -half), p(half, -half), p(half, half), p(-half, half)];
    let mut s = Scene::new(outer, holes, start);
    s.normalize_orientation();
    s
}

/// Largest ratio of angle-hull curve length to chain length over shortest
/// paths: single segments in an empty room, chains hugging a convex hole in
/// a room small enough to clip the hull, and geodesics in random scenes.
pub fn angle_hull_sweep(count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let side = if rng.gen_bool(0.5) { Side::Right } else { Side::Left };
        let (scene, chain, side) = match k % 3 {
            0 => {
                let pts = vec![p(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)), p(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0))];
                (box_scene(50.0, vec![], p(-50.0, -30.0)), pts, side)
            }
            1 => {
                let (hole, ccw) = convex_hole(&mut rng);
                let j = rng.gen_range(0..ccw.len());
                let m = rng.gen_range(2..=ccw.len());
                let pts: Vec<Point> = (0..m).map(|i| ccw[(j + i) % ccw.len()]).collect();
                let half = rng.gen_range(7.0..12.0);
                // Free space is on the right of a counter-clockwise chain.
                (box_scene(half, vec![hole], p(-half, 0.0)), pts, Side::Right)
            }
            _ => {
                let scene = gen_random(2, 12, seed.wrapping_add(k as u64)).expect("random scene").scene;
                let (a, b) = (random_free_point(&scene, &mut rng), random_free_point(&scene, &mut rng));
                let path = cpex::geodesic::shortest_path(&scene, a, b).expect("path");
                (scene, path.vertices, side)
            }
        };
        if poly_len(&chain, false) < 1e-6 {
            continue;
        }
        let hull = angle_hull(&scene, &Polyline::open(chain.clone()), side, 1e-4);
        worst = worst.max(poly_len(&hull.curve.vertices, false) / poly_len(&chain, false));
    }
    worst
}

/// A convex hole around the origin: (clockwise hole ring, counter-clockwise
/// vertex order).
pub fn convex_hole(rng: &mut ChaCha8Rng) -> (Hole, Vec<Point>) {
    let k = rng.gen_range(5..10);
    let r = rng.gen_range(2.0..6.0);
    let mut th: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    th.sort_by(f64::total_cmp);
    th.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    let ccw: Vec<Point> = th.iter().map(|t| p(r * t.cos(), r * t.sin())).collect();
    let mut cw = ccw.clone();
    cw.reverse();
    (Hole { color: 1, vertices: cw }, ccw)
}

#[derive(Debug, Default)]
pub struct PursuitStats {
    pub cases: usize,
    /// Route length up to the crossing over the shortest path start → cut.
    pub max_ratio: f64,
    /// Cases with that ratio at most 4.
    pub within_four: usize,
    /// Hull length from its first vertex to the crossing point `r` over the
    /// shortest path between the two.
    pub max_hull_vs_path: f64,
    /// Shortest path from the hull's first vertex to `r` over its distance
    /// to the cut.
    pub max_path_vs_cut: f64,
    pub misses: usize,
}

/// Backyard pursuit on wedge-shaped holes: the apex (fence apex) points
/// away from the start, which sits behind the blunt end. The robot walks
/// the shortest path to the tour point farthest to the side of the fence,
/// then the angle hull of the tour chain from there to the apex, until it
/// crosses a cut that crosses the fence on that side and ends on the chain.
/// Compares with the shortest path from the start to the cut.
pub fn pursuit_sweep(count: usize, seed: u64) -> PursuitStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = PursuitStats::default();
    while st.cases < count {
        // Fence: the line x = 0 through the apex at the origin.
        let half = rng.gen_range(2f64.to_radians()..15f64.to_radians());
        // Lower chain from (-len, -w) up to the apex, slopes rising from 0
        // to tan(half).
        let m = rng.gen_range(1..=5);
        let mut slopes: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..half.tan())).collect();
        slopes.sort_by(f64::total_cmp);
        slopes[m - 1] = half.tan();
        let mut ds: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..1.0)).collect();
        let len = rng.gen_range(2.0..25.0);
        let total: f64 = ds.iter().sum();
        ds.iter_mut().for_each(|d| *d *= len / total);
        let w: f64 = ds.iter().zip(&slopes).map(|(d, k)| d * k).sum();
        if w < 0.05 {
            continue;
        }
        let mut chain = vec![p(0.0, 0.0)];
        for k in (0..m).rev() {
            let q = *chain.last().unwrap();
            chain.push(p(q.x - ds[k], q.y - ds[k] * slopes[k]));
        }
        chain.reverse();
        let pl = chain[0];
        let back = rng.gen_range(0.3..3.0);
        let mut ccw: Vec<Point> = chain.clone();
        ccw.extend(chain.iter().rev().skip(1).map(|q| p(q.x, -q.y)));
        ccw.push(p(pl.x - back, 0.7 * w));
        ccw.push(p(pl.x - 1.3 * back, 0.0));
        ccw.push(p(pl.x - back, -0.7 * w));
        let mut ring = ccw.clone();
        ring.reverse();
        let s = p(pl.x - 1.3 * back - rng.gen_range(0.3..3.0), 0.0);
        let scene = box_scene(80.0, vec![Hole { color: 1, vertices: ring }], s);
        // Cut through the fence below the apex, ending on the chain.
        let e = rng.gen_range(0..m);
        let c = chain[e].lerp(chain[e + 1], rng.gen_range(0.05..0.95));
        let y_f = -rng.gen_range(0.05..20.0);
        let cut = Segment::new(c, c.add(p(0.0, y_f).sub(c).scale(1.5)));
        let approach = cpex::geodesic::shortest_path(&scene, s, pl).expect("path");
        let hull = angle_hull(&scene, &Polyline::open(chain.clone()), Side::Right, 1e-4);
        let route: Vec<Point> = approach.vertices.iter().chain(hull.curve.vertices.iter().skip(1)).copied().collect();
        let mut walked = 0.0;
        let mut hit = None;
        for w in route.windows(2) {
            if let Some(x) = seg_intersection(w[0], w[1], cut.a, cut.b) {
                hit = Some((walked + w[0].dist(x), x));
                break;
            }
            walked += w[0].dist(w[1]);
        }
        let Some((traveled, r)) = hit else {
            st.misses += 1;
            continue;
        };
        let g = VisGraph::new(&scene);
        let (to_cut, _, _) = g.dist_to_segment(&g.field(&[(s, 0.0)]), &cut);
        st.cases += 1;
        let ratio = traveled / to_cut.max(1e-12);
        st.max_ratio = st.max_ratio.max(ratio);
        if ratio <= 4.0 {
            st.within_four += 1;
        }
        let on_hull = traveled - approach.length();
        if on_hull > 0.0 {
            let pl_r = g.shortest_path(pl, r).0;
            let (pl_cut, _, _) = g.dist_to_segment(&g.field(&[(pl, 0.0)]), &cut);
            st.max_hull_vs_path = st.max_hull_vs_path.max(on_hull / pl_r.max(1e-12));
            st.max_path_vs_cut = st.max_path_vs_cut.max(pl_r / pl_cut.max(1e-12));
        }
    }
    st
}

fn seg_intersection(a: Point, b: Point, c: Point, d: Point) -> Option<Point> {
    let r = b.sub(a);
    let s = d.sub(c);
    let den = r.cross(s);
    if den.abs() < 1e-300 {
        return None;
    }
    let t = c.sub(a).cross(s) / den;
    let u = c.sub(a).cross(r) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| a.add(r.scale(t)))
}

/// Walker in open space.
pub struct Free(pub Point);

impl Walker for Free {
    fn position(&self) -> Point {
        self.0
    }
    fn walk_to(&mut self, q: Point) -> Result<f64, Point> {
        let d = self.0.dist(q);
        self.0 = q;
        Ok(d)
    }
}

/// Semicircle approach in open space: robot at distance `r` from the vertex
/// at the origin, hidden edge arriving at the vertex from direction
/// `edge_angle`. Returns (arc length, straight distance to the cut ray), or
/// `None` when the robot already sees the edge.
pub fn semicircle_case(r: f64, robot_angle: f64, edge_angle: f64, tol: f64) -> Option<(f64, f64)> {
    let v = p(0.0, 0.0);
    let x = p(r * robot_angle.cos(), r * robot_angle.sin());
    let a = p(edge_angle.cos(), edge_angle.sin());
    // Hidden edge (a, v): the cut continues from v away from a.
    let cut_dir = v.sub(a).unit();
    let side = a.sub(v).cross(x.sub(v)) * -1.0;
    if side >= 0.0 {
        return None;
    }
    let t = x.dot(cut_dir).max(0.0);
    let straight = x.dist(cut_dir.scale(t));
    let mut w = Free(x);
    let out = semicircle_approach(&mut w, v, (a, v), tol);
    // Also exercise the library's own distance helper.
    debug_assert!((distance_to_cut(x, v, (a, v)) - straight).abs() < 1e-9 * (1.0 + r));
    Some((out.length, straight))
}

/// Independent replay of the doubling schedule: walk out and back until the
/// target depth fits into a round on its ray.
pub fn doubling_cost(target: f64, on_second: bool, unit: f64) -> f64 {
    let mut total = 0.0;
    let mut depth = unit;
    let mut ray = 0;
    loop {
        if (ray == 1) == on_second && target <= depth {
            return total + target;
        }
        total += 2.0 * depth;
        depth *= 2.0;
        ray ^= 1;
    }
}
