//! Bitset rasters of sample points at cell centers, filled by scanline.

use crate::geometry::{Point, Scene};

#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub origin: Point,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Raster {
    pub fn new(lo: Point, hi: Point, cell: f64) -> Raster {
        let nx = (((hi.x - lo.x) / cell).ceil() as usize).max(1);
        let ny = (((hi.y - lo.y) / cell).ceil() as usize).max(1);
        let words = nx.div_ceil(64);
        Raster { origin: lo, cell, nx, ny, words, bits: vec![0; words * ny] }
    }

    /// Empty raster over the scene's bounding box with cells of side `resolution`.
    pub fn for_scene(scene: &Scene, resolution: f64) -> Raster {
        let (lo, hi) = scene.bbox();
        Raster::new(lo, hi, resolution.max(1e-12))
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(self.origin.x + (i as f64 + 0.5) * self.cell, self.origin.y + (j as f64 + 0.5) * self.cell)
    }

    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.words + i / 64] >> (i % 64) & 1 == 1
    }

    /// Whether the sample nearest to `p` is set.
    pub fn covers(&self, p: Point) -> bool {
        self.cell_of(p).is_some_and(|(i, j)| self.get(i, j))
    }

    fn set_span(&mut self, j: usize, i0: usize, i1: usize) {
        let row = &mut self.bits[j * self.words..(j + 1) * self.words];
        for i in i0..=i1 {
            row[i / 64] |= 1 << (i % 64);
        }
    }

    /// Sets every sample inside the even-odd union of `rings`.
    pub fn fill(&mut self, rings: &[&[Point]]) {
        let mut xs: Vec<f64> = vec![];
        let (lo_y, hi_y) = rings
            .iter()
            .flat_map(|r| r.iter())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.y), b.max(p.y)));
        if !lo_y.is_finite() {
            return;
        }
        let j0 = (((lo_y - self.origin.y) / self.cell - 0.5).ceil().max(0.0)) as usize;
        let j1 = ((hi_y - self.origin.y) / self.cell - 0.5).floor();
        if j1 < 0.0 {
            return;
        }
        let j1 = (j1 as usize).min(self.ny - 1);
        for j in j0..=j1 {
            let y = self.origin.y + (j as f64 + 0.5) * self.cell;
            xs.clear();
            for ring in rings {
                let n = ring.len();
                for k in 0..n {
                    let (a, b) = (ring[k], ring[(k + 1) % n]);
                    if (a.y > y) != (b.y > y) {
                        xs.push(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
                    }
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let i0 = ((pair[0] - self.origin.x) / self.cell - 0.5).ceil().max(0.0);
                let i1 = ((pair[1] - self.origin.x) / self.cell - 0.5).floor();
                if i1 < i0 || i1 < 0.0 {
                    continue;
                }
                let i1 = (i1 as usize).min(self.nx - 1);
                let i0 = i0 as usize;
                if i0 <= i1 {
                    self.set_span(j, i0, i1);
                }
            }
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of samples set in both rasters (same grid assumed).
    pub fn count_and(&self, o: &Raster) -> usize {
        self.bits.iter().zip(&o.bits).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// First sample set in `self` but not in `o`, in row-major order.
    pub fn first_missing(&self, o: &Raster) -> Option<Point> {
        for j in 0..self.ny {
            for w in 0..self.words {
                let k = j * self.words + w;
                let d = self.bits[k] & !o.bits[k];
                if d != 0 {
                    let i = w * 64 + d.trailing_zeros() as usize;
                    return Some(self.center(i, j));
                }
            }
        }
        None
    }

    pub fn union_with(&mut self, o: &Raster) {
        for (a, b) in self.bits.iter_mut().zip(&o.bits) {
            *a |= b;
        }
    }
}

/// Samples of the scene's free space.
pub fn free_mask(scene: &Scene, cell: f64) -> Raster {
    let mut r = Raster::for_scene(scene, cell);
    let rings: Vec<&[Point]> = scene.rings().map(|(_, ring)| ring).collect();
    r.fill(&rings);
    r
}
