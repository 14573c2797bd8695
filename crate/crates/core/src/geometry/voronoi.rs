use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geo::{Equirectangular, GeoPoint};
use crate::ingest::LocationRegistry;

pub const DEFAULT_BBOX_MARGIN: f64 = 0.05;

/// Tolerance, in projected units, for collinearity and degenerate edges.
const EPS: f64 = 1e-9;

type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }
}

/// Voronoi cells of the seeds in an equirectangular projection, clipped to
/// the (expanded) seed bounding box.
#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    projection: Equirectangular,
    seeds: Vec<Point>,
    /// Counter-clockwise cell polygons.
    cells: Vec<Vec<Point>>,
    neighbours: Vec<Vec<usize>>,
    edges: BTreeMap<(usize, usize), [Point; 2]>,
    bbox: BBox,
    locator: CellGrid,
}

/// Cell polygon vertex; `next` is the seed across the edge that starts here,
/// `None` on the clipping box.
#[derive(Debug, Clone, Copy)]
struct Vertex {
    p: Point,
    next: Option<usize>,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dist2(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

/// Keeps the part of `poly` closer to `seed` than to `other`.
fn clip(poly: &[Vertex], seed: Point, other: Point, other_id: usize) -> Vec<Vertex> {
    let dir = sub(other, seed);
    let mid = [(seed[0] + other[0]) / 2.0, (seed[1] + other[1]) / 2.0];
    let side = |p: Point| dot(sub(p, mid), dir);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, a) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()];
        let (fa, fb) = (side(a.p), side(b.p));
        let crossing = || {
            let t = fa / (fa - fb);
            [a.p[0] + t * (b.p[0] - a.p[0]), a.p[1] + t * (b.p[1] - a.p[1])]
        };
        match (fa <= 0.0, fb <= 0.0) {
            (true, true) => out.push(*a),
            (true, false) => {
                out.push(*a);
                if fa < 0.0 {
                    out.push(Vertex { p: crossing(), next: Some(other_id) });
                } else {
                    out.last_mut().expect("just pushed").next = Some(other_id);
                }
            }
            (false, true) => {
                if fb < 0.0 {
                    out.push(Vertex { p: crossing(), next: a.next });
                }
            }
            (false, false) => {}
        }
    }
    out
}

/// Drops vertices that coincide with their successor.
fn dedup(mut poly: Vec<Vertex>, tol2: f64) -> Vec<Vertex> {
    let mut i = 0;
    while poly.len() > 1 && i < poly.len() {
        let j = (i + 1) % poly.len();
        if dist2(poly[i].p, poly[j].p) <= tol2 {
            poly.remove(i);
        } else {
            i += 1;
        }
    }
    poly
}

pub fn build_voronoi(registry: &LocationRegistry, bbox_margin: f64) -> Result<VoronoiDiagram> {
    let projection = Equirectangular::centred_on(registry.points());
    let seeds = registry.points().map(|p| projection.forward(p)).collect();
    VoronoiDiagram::from_projected(seeds, projection, bbox_margin)
}

impl VoronoiDiagram {
    /// Diagram over points already in plane coordinates (kilometres around
    /// lat/lon 0,0).
    pub fn planar(seeds: Vec<Point>, bbox_margin: f64) -> Result<Self> {
        Self::from_projected(seeds, Equirectangular::new(GeoPoint::new(0.0, 0.0)), bbox_margin)
    }

    fn from_projected(seeds: Vec<Point>, projection: Equirectangular, margin: f64) -> Result<Self> {
        let n = seeds.len();
        if n < 3 {
            return Err(Error::DegenerateSeeds(format!("{n} seeds, at least 3 are required")));
        }
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::Config(format!("invalid bounding box margin {margin}")));
        }
        check_not_collinear(&seeds)?;

        let mut min = seeds[0];
        let mut max = seeds[0];
        for s in &seeds {
            for k in 0..2 {
                min[k] = min[k].min(s[k]);
                max[k] = max[k].max(s[k]);
            }
        }
        let (w, h) = (max[0] - min[0], max[1] - min[1]);
        let bbox = BBox {
            min: [min[0] - margin * w, min[1] - margin * h],
            max: [max[0] + margin * w, max[1] + margin * h],
        };
        let scale = bbox.width().hypot(bbox.height()).max(1.0);
        let tol = EPS * scale;

        let corners = [
            bbox.min,
            [bbox.max[0], bbox.min[1]],
            bbox.max,
            [bbox.min[0], bbox.max[1]],
        ];
        let mut cells = Vec::with_capacity(n);
        let mut edges: BTreeMap<(usize, usize), [Point; 2]> = BTreeMap::new();
        let grid = SeedGrid::new(&seeds);
        let mut ring: Vec<(f64, usize)> = Vec::new();
        for (i, &seed) in seeds.iter().enumerate() {
            let mut poly: Vec<Vertex> = corners.iter().map(|&p| Vertex { p, next: None }).collect();
            let mut reach2 = poly.iter().map(|v| dist2(v.p, seed)).fold(0.0, f64::max);
            let home = grid.bucket(seed);
            for r in 0..=grid.max_ring() {
                ring.clear();
                grid.ring(home, r, |j| {
                    if j != i {
                        ring.push((dist2(seed, seeds[j]), j));
                    }
                });
                ring.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                for &(d2, j) in &ring {
                    // a seed further than twice the cell radius cannot cut it
                    if d2 > 4.0 * reach2 {
                        break;
                    }
                    poly = clip(&poly, seed, seeds[j], j);
                    reach2 = poly.iter().map(|v| dist2(v.p, seed)).fold(0.0, f64::max);
                }
                // everything beyond ring r is at least r bucket widths away
                let gap = r as f64 * grid.min_size;
                if gap * gap > 4.0 * reach2 {
                    break;
                }
            }
            let poly = dedup(poly, tol * tol);
            for (k, v) in poly.iter().enumerate() {
                let Some(j) = v.next else { continue };
                let q = poly[(k + 1) % poly.len()].p;
                if dist2(v.p, q) > tol * tol {
                    edges.entry((i.min(j), i.max(j))).or_insert(if i < j { [v.p, q] } else { [q, v.p] });
                }
            }
            cells.push(poly.into_iter().map(|v| v.p).collect::<Vec<_>>());
        }

        let mut neighbours = vec![Vec::new(); n];
        for &(a, b) in edges.keys() {
            neighbours[a].push(b);
            neighbours[b].push(a);
        }
        for list in &mut neighbours {
            list.sort_unstable();
        }
        let locator = CellGrid::new(&cells, bbox);
        Ok(Self {
            projection,
            seeds,
            cells,
            neighbours,
            edges,
            bbox,
            locator,
        })
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn projection(&self) -> &Equirectangular {
        &self.projection
    }

    pub fn seed(&self, i: usize) -> Point {
        self.seeds[i]
    }

    pub fn seeds(&self) -> &[Point] {
        &self.seeds
    }

    /// Counter-clockwise polygon of cell `i` in projected coordinates.
    pub fn cell(&self, i: usize) -> &[Point] {
        &self.cells[i]
    }

    /// Cell polygon as a closed lat/lon ring.
    pub fn cell_ring(&self, i: usize) -> Vec<GeoPoint> {
        let cell = &self.cells[i];
        cell.iter()
            .chain(cell.first())
            .map(|&p| self.unproject(p))
            .collect()
    }

    pub fn cell_area(&self, i: usize) -> f64 {
        let c = &self.cells[i];
        (0..c.len())
            .map(|k| cross(c[k], c[(k + 1) % c.len()]))
            .sum::<f64>()
            / 2.0
    }

    /// Sorted neighbours of cell `i`.
    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.neighbours[i]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.neighbours
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains_key(&(a.min(b), a.max(b)))
    }

    /// Shared edges keyed by `(a, b)` with `a < b`.
    pub fn shared_edges(&self) -> impl Iterator<Item = ((usize, usize), [Point; 2])> + '_ {
        self.edges.iter().map(|(&k, &v)| (k, v))
    }

    pub fn project(&self, p: GeoPoint) -> Point {
        self.projection.forward(p)
    }

    pub fn unproject(&self, p: Point) -> GeoPoint {
        self.projection.inverse(p)
    }

    /// Cell containing `p`, found by polygon containment. Points on a shared
    /// edge go to the cell with the larger inner margin. `None` outside the
    /// clipping box.
    pub fn locate(&self, p: Point) -> Option<usize> {
        if !self.bbox.contains(p) {
            return None;
        }
        let mut best: Option<(f64, usize)> = None;
        for &i in self.locator.candidates(p) {
            let margin = inner_margin(&self.cells[i], p);
            if margin >= -EPS && best.is_none_or(|(m, _)| margin > m) {
                best = Some((margin, i));
            }
        }
        best.map(|(_, i)| i)
    }
}

fn check_not_collinear(seeds: &[Point]) -> Result<()> {
    let p0 = seeds[0];
    let p1 = *seeds
        .iter()
        .max_by(|a, b| dist2(**a, p0).total_cmp(&dist2(**b, p0)))
        .expect("non-empty");
    let len = dist2(p1, p0).sqrt();
    if len <= EPS {
        return Err(Error::DegenerateSeeds("all seeds coincide".into()));
    }
    let dir = sub(p1, p0);
    let spread = seeds
        .iter()
        .map(|&s| (cross(dir, sub(s, p0)) / len).abs())
        .fold(0.0, f64::max);
    if spread <= EPS {
        return Err(Error::DegenerateSeeds("all seeds are collinear".into()));
    }
    Ok(())
}

/// Smallest signed distance from `p` to the edges of a counter-clockwise
/// convex polygon; non-negative inside.
fn inner_margin(poly: &[Point], p: Point) -> f64 {
    (0..poly.len())
        .map(|k| {
            let a = poly[k];
            let b = poly[(k + 1) % poly.len()];
            let e = sub(b, a);
            let len = dot(e, e).sqrt();
            if len == 0.0 {
                f64::INFINITY
            } else {
                cross(e, sub(p, a)) / len
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Uniform bucket grid over the clipping box listing the cells whose
/// bounding boxes overlap each bucket.
#[derive(Debug, Clone)]
struct CellGrid {
    origin: Point,
    size: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl CellGrid {
    fn new(cells: &[Vec<Point>], bbox: BBox) -> Self {
        let side = (cells.len() as f64).sqrt().ceil().max(1.0) as usize;
        let dims = [side, side];
        let size = [bbox.width() / side as f64, bbox.height() / side as f64];
        let mut grid = Self {
            origin: bbox.min,
            size,
            dims,
            buckets: vec![Vec::new(); side * side],
        };
        for (i, cell) in cells.iter().enumerate() {
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for p in cell {
                for k in 0..2 {
                    lo[k] = lo[k].min(p[k] - EPS);
                    hi[k] = hi[k].max(p[k] + EPS);
                }
            }
            let (a, b) = (grid.bucket(lo), grid.bucket(hi));
            for y in a[1]..=b[1] {
                for x in a[0]..=b[0] {
                    grid.buckets[y * dims[0] + x].push(i);
                }
            }
        }
        grid
    }

    fn bucket(&self, p: Point) -> [usize; 2] {
        let mut out = [0; 2];
        for k in 0..2 {
            let t = ((p[k] - self.origin[k]) / self.size[k]).floor();
            out[k] = (t.max(0.0) as usize).min(self.dims[k] - 1);
        }
        out
    }

    fn candidates(&self, p: Point) -> &[usize] {
        let [x, y] = self.bucket(p);
        &self.buckets[y * self.dims[0] + x]
    }
}

/// Uniform bucket grid over the seeds, about two seeds per bucket, used to
/// visit seeds in rings of increasing distance.
#[derive(Debug, Clone)]
struct SeedGrid {
    origin: Point,
    size: [f64; 2],
    min_size: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl SeedGrid {
    fn new(seeds: &[Point]) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for s in seeds {
            for k in 0..2 {
                lo[k] = lo[k].min(s[k]);
                hi[k] = hi[k].max(s[k]);
            }
        }
        let (w, h) = ((hi[0] - lo[0]).max(EPS), (hi[1] - lo[1]).max(EPS));
        let target = seeds.len() as f64 / 2.0;
        let dim = |a: f64, b: f64| ((target * a / b).sqrt().ceil() as usize).clamp(1, seeds.len());
        let dims = [dim(w, h), dim(h, w)];
        let size = [w / dims[0] as f64, h / dims[1] as f64];
        let mut grid = Self {
            origin: lo,
            size,
            min_size: size[0].min(size[1]),
            dims,
            buckets: vec![Vec::new(); dims[0] * dims[1]],
        };
        for (i, &s) in seeds.iter().enumerate() {
            let [x, y] = grid.bucket(s);
            grid.buckets[y * dims[0] + x].push(i);
        }
        grid
    }

    fn bucket(&self, p: Point) -> [usize; 2] {
        let mut out = [0; 2];
        for k in 0..2 {
            let t = ((p[k] - self.origin[k]) / self.size[k]).floor();
            out[k] = (t.max(0.0) as usize).min(self.dims[k] - 1);
        }
        out
    }

    fn max_ring(&self) -> usize {
        self.dims[0].max(self.dims[1])
    }

    /// Calls `f` for every seed in the buckets at Chebyshev distance `r`
    /// from `home`.
    fn ring(&self, home: [usize; 2], r: usize, mut f: impl FnMut(usize)) {
        let (hx, hy) = (home[0] as isize, home[1] as isize);
        let r = r as isize;
        for y in (hy - r).max(0)..=(hy + r).min(self.dims[1] as isize - 1) {
            let edge_row = (y - hy).abs() == r;
            let mut x = (hx - r).max(0);
            let x_end = (hx + r).min(self.dims[0] as isize - 1);
            while x <= x_end {
                if edge_row || (x - hx).abs() == r {
                    for &j in &self.buckets[y as usize * self.dims[0] + x as usize] {
                        f(j);
                    }
                    x += 1;
                } else {
                    // interior of the ring row: jump to its right edge
                    x = hx + r;
                }
            }
        }
    }
}
