//! Cutting a scene along chords, and merging a hole into the outer boundary
//! with a thin barrier wall.

use super::GeodesicError;
use crate::geometry::{
    free_bisector, ring_boundary_dist, ring_contains, signed_area, validate_scene, BoundaryTag, Hole, Point, Polyline,
    RingKind, Scene, Segment,
};
use std::collections::HashMap;
use std::f64::consts::TAU;

/// One region produced by cutting a scene.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub ring: Vec<Point>,
    pub tags: Vec<BoundaryTag>,
    pub holes: Vec<Hole>,
}

impl Face {
    pub fn area(&self) -> f64 {
        signed_area(&self.ring) + self.holes.iter().map(|h| signed_area(&h.vertices)).sum::<f64>()
    }

    /// On the outer ring of the face (within `tol`).
    pub fn touches(&self, p: Point, tol: f64) -> bool {
        ring_boundary_dist(&self.ring, p) <= tol
    }

    /// In the closed face, holes excluded.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        if self.touches(p, tol) {
            return true;
        }
        ring_contains(&self.ring, p) && !self.holes.iter().any(|h| ring_contains(&h.vertices, p))
    }

    pub fn to_scene(&self, start: Point) -> Scene {
        Scene { outer: self.ring.clone(), outer_tags: self.tags.clone(), holes: self.holes.clone(), start }
    }
}

fn key(p: Point) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

/// Splits free space along chord segments whose endpoints lie on scene edges.
/// Chords are walls afterwards and are tagged as outer boundary.
pub fn split_by_chord(scene: &Scene, chord: &[Segment]) -> Result<Vec<Face>, GeodesicError> {
    let tol = scene.eps();
    let ends: Vec<Point> = chord.iter().flat_map(|c| [c.a, c.b]).collect();
    let mut darts: Vec<(Point, Point, BoundaryTag)> = vec![];
    for e in scene.edges() {
        let seg = e.segment();
        let mut cuts: Vec<(f64, Point)> = ends
            .iter()
            .filter(|&&q| q != e.a && q != e.b && seg.dist_to_point(q) <= tol)
            .map(|&q| (seg.project_param(q), q))
            .collect();
        cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
        cuts.dedup_by(|a, b| a.1 == b.1);
        let mut prev = e.a;
        for (_, q) in cuts {
            darts.push((prev, q, e.tag));
            prev = q;
        }
        darts.push((prev, e.b, e.tag));
    }
    for c in chord {
        darts.push((c.a, c.b, BoundaryTag::Outer));
        darts.push((c.b, c.a, BoundaryTag::Outer));
    }
    let mut out_of: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (i, d) in darts.iter().enumerate() {
        out_of.entry(key(d.0)).or_default().push(i);
    }
    let next = |i: usize| -> Option<usize> {
        let (u, v, _) = darts[i];
        let back = u.sub(v).angle();
        out_of.get(&key(v))?.iter().copied().min_by(|&x, &y| {
            let rot = |j: usize| {
                let r = (back - darts[j].1.sub(v).angle()).rem_euclid(TAU);
                if r <= 0.0 || darts[j].1 == u {
                    TAU + r
                } else {
                    r
                }
            };
            rot(x).total_cmp(&rot(y))
        })
    };
    let mut used = vec![false; darts.len()];
    let mut cycles: Vec<(Vec<Point>, Vec<BoundaryTag>)> = vec![];
    for s in 0..darts.len() {
        if used[s] {
            continue;
        }
        let mut pts = vec![];
        let mut tags = vec![];
        let mut cur = s;
        loop {
            if used[cur] {
                break;
            }
            used[cur] = true;
            pts.push(darts[cur].0);
            tags.push(darts[cur].2);
            match next(cur) {
                Some(n) => cur = n,
                None => return Err(GeodesicError::Fence("dangling chord endpoint".into())),
            }
        }
        if cur != s {
            return Err(GeodesicError::Fence("inconsistent chord arrangement".into()));
        }
        cycles.push((pts, tags));
    }
    let mut faces: Vec<Face> = vec![];
    let mut holes: Vec<(Vec<Point>, BoundaryTag)> = vec![];
    for (pts, tags) in cycles {
        let a = signed_area(&pts);
        if a > 0.0 {
            faces.push(Face { ring: pts, tags, holes: vec![] });
        } else if a < 0.0 {
            holes.push((pts, tags[0]));
        }
    }
    for (pts, tag) in holes {
        let BoundaryTag::Hole(color) = tag else {
            return Err(GeodesicError::Fence("chord left an outer-boundary cycle".into()));
        };
        let host = (0..faces.len())
            .filter(|&k| ring_contains(&faces[k].ring, pts[0]))
            .min_by(|&x, &y| signed_area(&faces[x].ring).total_cmp(&signed_area(&faces[y].ring)));
        if let Some(k) = host {
            faces[k].holes.push(Hole { color, vertices: pts });
        }
    }
    Ok(faces)
}

/// Point on the edge of `ring` containing `p`, moved along that edge so it is
/// at least `gap` away from both edge endpoints.
fn anchor_on_ring(ring: &[Point], p: Point, gap: f64, tol: f64) -> Option<(usize, Point)> {
    let n = ring.len();
    let mut best: Option<(f64, usize)> = None;
    for i in 0..n {
        let s = Segment::new(ring[i], ring[(i + 1) % n]);
        let d = s.dist_to_point(p);
        if d <= tol && s.length() > 4.0 * gap && best.is_none_or(|b| d < b.0) {
            best = Some((d, i));
        }
    }
    let (_, i) = best?;
    let s = Segment::new(ring[i], ring[(i + 1) % n]);
    let l = s.length();
    let t = s.project_param(p).clamp(2.0 * gap / l, 1.0 - 2.0 * gap / l);
    Some((i, s.at(t)))
}

/// Merges hole `color` into the outer boundary along the path `b` (from a
/// point on the outer boundary to a point on the hole) using a wall of
/// half-width `width`. The wall is shifted off the start point and off the
/// vertices `b` bends around, so those stay in free space.
pub fn merge_hole_with_barrier(scene: &Scene, color: u32, b: &Polyline, width: f64) -> Result<Scene, GeodesicError> {
    let hi = scene.hole_index(color).ok_or(GeodesicError::NoSuchHole(color))?;
    let tol = scene.eps().max(1e-9);
    let mut w = width;
    for _ in 0..6 {
        if let Some(sc) = try_barrier(scene, hi, b, w, tol) {
            if validate_scene(&sc).is_ok() {
                return Ok(sc);
            }
        }
        w /= 4.0;
    }
    Err(GeodesicError::Barrier(format!("could not route a barrier to hole {color}")))
}

fn try_barrier(scene: &Scene, hi: usize, b: &Polyline, w: f64, tol: f64) -> Option<Scene> {
    let v = &b.vertices;
    if v.len() < 2 {
        return None;
    }
    let outer = &scene.outer;
    let hole = &scene.holes[hi].vertices;
    // A path that first runs along the outer boundary leaves it at v[k];
    // the wall starts there, not at the start.
    let mut k = 0;
    while k + 2 < v.len()
        && outer.contains(&v[k + 1])
        && ring_boundary_dist(outer, v[k].lerp(v[k + 1], 0.5)) <= tol
    {
        k += 1;
    }
    let (oi, s_star) = if k == 0 {
        // Move the mouth a little along the edge so the start itself stays free.
        let (oi, s0) = anchor_on_ring(outer, v[0], 4.0 * w, tol)?;
        let oe = Segment::new(outer[oi], outer[(oi + 1) % outer.len()]);
        let od = oe.b.sub(oe.a).unit();
        let cand = s0.add(od.scale(3.0 * w));
        if oe.dist_to_point(cand) <= tol && cand.dist(oe.b) > 2.0 * w {
            (oi, cand)
        } else {
            (oi, s0.sub(od.scale(3.0 * w)))
        }
    } else {
        let back = v[k - 1].sub(v[k]);
        if back.norm() <= 12.0 * w {
            return None;
        }
        anchor_on_ring(outer, v[k].add(back.unit().scale(6.0 * w)), 4.0 * w, tol)?
    };
    let v = &v[k..];
    let oe = Segment::new(outer[oi], outer[(oi + 1) % outer.len()]);
    let od = oe.b.sub(oe.a).unit();
    let (hj, h_star) = anchor_on_ring(hole, *v.last().unwrap(), 4.0 * w, tol)?;
    let he = Segment::new(hole[hj], hole[(hj + 1) % hole.len()]);
    let hd = he.b.sub(he.a).unit();

    let mut center = vec![s_star];
    for &q in &v[1..v.len() - 1] {
        let shifted = match super::ring_of_vertex(scene, q) {
            Some((r, i)) => q.add(free_bisector(scene.ring(r), i).scale(4.0 * w)),
            None => q,
        };
        center.push(shifted);
    }
    center.push(h_star);
    center.dedup();
    if center.len() < 2 {
        return None;
    }
    let (left, right) = offsets(&center, w)?;
    let mut ring = vec![];
    let mut tags = vec![];
    let n = outer.len();
    // Outer ring from the end of the mouth edge around to its start.
    for k in 0..n {
        let idx = (oi + 1 + k) % n;
        ring.push(outer[idx]);
        tags.push(scene.edge_tag(RingKind::Outer, idx));
    }
    // Edge tag for outer[oi] -> mouth was pushed last; fine as Outer.
    ring.push(s_star.sub(od.scale(w)));
    tags.push(BoundaryTag::Outer);
    for &q in &left[1..left.len() - 1] {
        ring.push(q);
        tags.push(BoundaryTag::Outer);
    }
    let hc = BoundaryTag::Hole(scene.holes[hi].color);
    ring.push(h_star.add(hd.scale(w)));
    tags.push(hc);
    let m = hole.len();
    for k in 0..m {
        let idx = (hj + 1 + k) % m;
        ring.push(hole[idx]);
        tags.push(hc);
    }
    ring.push(h_star.sub(hd.scale(w)));
    tags.push(BoundaryTag::Outer);
    for &q in right[1..right.len() - 1].iter().rev() {
        ring.push(q);
        tags.push(BoundaryTag::Outer);
    }
    ring.push(s_star.add(od.scale(w)));
    tags.push(scene.edge_tag(RingKind::Outer, oi));
    let holes = scene.holes.iter().enumerate().filter(|(k, _)| *k != hi).map(|(_, h)| h.clone()).collect();
    Some(Scene { outer: ring, outer_tags: tags, holes, start: scene.start })
}

/// Left and right miter offsets of a polyline.
fn offsets(c: &[Point], w: f64) -> Option<(Vec<Point>, Vec<Point>)> {
    let n = c.len();
    let mut l = vec![];
    let mut r = vec![];
    for i in 0..n {
        let din = if i > 0 { c[i].sub(c[i - 1]).unit() } else { c[1].sub(c[0]).unit() };
        let dout = if i + 1 < n { c[i + 1].sub(c[i]).unit() } else { din };
        let m = din.perp().add(dout.perp());
        if m.norm() < 1e-9 {
            return None;
        }
        let m = m.unit();
        let cos = m.dot(din.perp()).max(0.2);
        l.push(c[i].add(m.scale(w / cos)));
        r.push(c[i].sub(m.scale(w / cos)));
    }
    Some((l, r))
}
