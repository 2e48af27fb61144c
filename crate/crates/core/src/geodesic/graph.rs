//! Visibility graph over reflex vertices with multi-source Dijkstra.

use crate::geometry::{Point, Polyline, Scene, Segment};
use crate::visibility::sees_unchecked;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, PartialEq)]
struct Item {
    d: f64,
    node: usize,
}

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.total_cmp(&self.d).then_with(|| o.node.cmp(&self.node))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pred {
    None,
    Source(usize),
    Node(usize),
}

/// Shortest-path distances from a set of weighted source points.
#[derive(Clone, Debug)]
pub struct Field {
    pub sources: Vec<(Point, f64)>,
    pub dist: Vec<f64>,
    pub pred: Vec<Pred>,
}

/// Visibility graph of a scene. Nodes are the reflex vertices of free space;
/// arbitrary query points are connected on demand.
#[derive(Clone, Debug)]
pub struct VisGraph {
    pub scene: Scene,
    pub nodes: Vec<Point>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl VisGraph {
    pub fn new(scene: &Scene) -> VisGraph {
        let nodes: Vec<Point> = scene.reflex_vertices().into_iter().map(|(r, i)| scene.ring(r)[i]).collect();
        let n = nodes.len();
        let mut adj = vec![vec![]; n];
        for i in 0..n {
            for j in i + 1..n {
                if sees_unchecked(scene, nodes[i], nodes[j]) {
                    let d = nodes[i].dist(nodes[j]);
                    adj[i].push((j, d));
                    adj[j].push((i, d));
                }
            }
        }
        VisGraph { scene: scene.clone(), nodes, adj }
    }

    pub fn sees(&self, a: Point, b: Point) -> bool {
        sees_unchecked(&self.scene, a, b)
    }

    /// Nodes visible from `p` with their straight-line distances.
    pub fn visible_nodes(&self, p: Point) -> Vec<(usize, f64)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, &q)| self.sees(p, q))
            .map(|(i, &q)| (i, p.dist(q)))
            .collect()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    /// Dijkstra from several sources, each with a starting offset.
    pub fn field(&self, sources: &[(Point, f64)]) -> Field {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![Pred::None; n];
        let mut heap = BinaryHeap::new();
        for (si, &(p, off)) in sources.iter().enumerate() {
            for (j, d) in self.visible_nodes(p) {
                if off + d < dist[j] {
                    dist[j] = off + d;
                    pred[j] = Pred::Source(si);
                    heap.push(Item { d: dist[j], node: j });
                }
            }
        }
        while let Some(Item { d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for &(m, w) in &self.adj[node] {
                let nd = d + w;
                if nd < dist[m] {
                    dist[m] = nd;
                    pred[m] = Pred::Node(node);
                    heap.push(Item { d: nd, node: m });
                }
            }
        }
        Field { sources: sources.to_vec(), dist, pred }
    }

    /// Distance from the field's sources to `q`, with the last hop.
    pub fn dist_to(&self, f: &Field, q: Point) -> (f64, Pred) {
        let mut best = (f64::INFINITY, Pred::None);
        for (si, &(p, off)) in f.sources.iter().enumerate() {
            let d = off + p.dist(q);
            if d < best.0 && self.sees(p, q) {
                best = (d, Pred::Source(si));
            }
        }
        for (i, &u) in self.nodes.iter().enumerate() {
            let d = f.dist[i] + u.dist(q);
            if d < best.0 && self.sees(u, q) {
                best = (d, Pred::Node(i));
            }
        }
        best
    }

    /// Walks predecessors back to a source; returns the path source → `q`.
    pub fn path_to(&self, f: &Field, q: Point, last: Pred) -> Vec<Point> {
        let mut rev = vec![q];
        let mut cur = last;
        let mut guard = 0;
        loop {
            match cur {
                Pred::None => break,
                Pred::Source(si) => {
                    rev.push(f.sources[si].0);
                    break;
                }
                Pred::Node(j) => {
                    rev.push(self.nodes[j]);
                    cur = f.pred[j];
                }
            }
            guard += 1;
            if guard > self.nodes.len() + 2 {
                break;
            }
        }
        rev.reverse();
        rev.dedup();
        rev
    }

    /// Shortest path between two free points.
    pub fn shortest_path(&self, a: Point, b: Point) -> (f64, Polyline) {
        if a == b {
            return (0.0, Polyline::open(vec![a]));
        }
        let f = self.field(&[(a, 0.0)]);
        let (d, last) = self.dist_to(&f, b);
        (d, Polyline::open(self.path_to(&f, b, last)))
    }

    /// Shortest distance from the field to a segment, and the point reached.
    pub fn dist_to_segment(&self, f: &Field, seg: &Segment) -> (f64, Point, Pred) {
        let mut best = (f64::INFINITY, seg.a, Pred::None);
        let mut consider = |from: Point, base: f64, pred: Pred| {
            for y in [seg.closest_point(from), seg.a, seg.b] {
                let d = base + from.dist(y);
                if d < best.0 && self.sees(from, y) {
                    best = (d, y, pred);
                }
            }
        };
        for (si, &(p, off)) in f.sources.iter().enumerate() {
            consider(p, off, Pred::Source(si));
        }
        for (i, &u) in self.nodes.iter().enumerate() {
            if f.dist[i].is_finite() {
                consider(u, f.dist[i], Pred::Node(i));
            }
        }
        best
    }
}
