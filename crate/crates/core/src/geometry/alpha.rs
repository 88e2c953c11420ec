use std::collections::BTreeMap;

use serde::Serialize;

use super::polygon::{trace_rings, Polygon};
use super::triangulation::Triangulation;
use super::{triangle_area, Point};
use crate::error::{Error, Result};

/// Converts a disk diameter in meters to the squared pixel radius used as
/// alpha.
pub fn alpha_from_width(width: f64, resolution: f64) -> Result<f64> {
    if !(width > 0.0) || !(resolution > 0.0) {
        return Err(Error::InvalidInput(format!(
            "width and resolution must be positive (got {width}, {resolution})"
        )));
    }
    let w_pixel = width / resolution;
    Ok((w_pixel / 2.0).powi(2))
}

/// Classification of a Delaunay triangulation against one alpha value.
///
/// A triangle belongs to the complex when its circumradius² is at most
/// alpha. An edge belongs when it bounds such a triangle, or when it is
/// Gabriel and half its length squared is at most alpha.
pub struct AlphaComplex<'a> {
    tr: &'a Triangulation,
    alpha: f64,
    solid_tri: Vec<bool>,
}

impl<'a> AlphaComplex<'a> {
    pub fn new(tr: &'a Triangulation, alpha: f64) -> Self {
        let solid_tri = (0..tr.triangles.len())
            .map(|t| tr.circumradius2(t) <= alpha)
            .collect();
        AlphaComplex { tr, alpha, solid_tri }
    }

    pub fn triangle_in_complex(&self, t: usize) -> bool {
        self.solid_tri[t]
    }

    pub fn edge_in_complex(&self, t: usize, i: usize) -> bool {
        if self.solid_tri[t] {
            return true;
        }
        let n = self.tr.neighbors[t][i];
        if n.is_some_and(|n| self.solid_tri[n]) {
            return true;
        }
        let (a, b) = self.tr.edge(t, i);
        let (pa, pb) = (self.tr.points[a], self.tr.points[b]);
        if pa.dist2(pb) / 4.0 > self.alpha {
            return false;
        }
        let mut opposite = vec![self.tr.opposite(t, i)];
        if let Some(n) = n {
            opposite.push(self.tr.opposite(n, self.tr.shared_edge_index(n, t)));
        }
        opposite.into_iter().all(|c| {
            let pc = self.tr.points[c];
            (pa - pc).dot(pb - pc) >= 0.0
        })
    }

    /// Connected components of the points under the complex's edges, with
    /// the area covered by each component's triangles.
    pub fn point_components(&self) -> (Vec<usize>, Vec<f64>) {
        let n = self.tr.points.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (t, i) in self.tr.undirected_edges() {
            if self.edge_in_complex(t, i) {
                let (a, b) = self.tr.edge(t, i);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut comp = vec![0; n];
        for p in 0..n {
            let r = find(&mut parent, p);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            comp[p] = label[r];
        }
        let mut area = vec![0.0; count];
        for t in 0..self.tr.triangles.len() {
            if self.solid_tri[t] {
                let [a, b, c] = self.tr.corners(t);
                area[comp[self.tr.triangles[t][0]]] += triangle_area(a, b, c);
            }
        }
        (comp, area)
    }

    /// Open regions (connected triangles outside the complex) and their
    /// boundary rings. Region `None` is the unbounded exterior.
    fn regions(&self) -> BTreeMap<Option<usize>, RegionRings> {
        let nt = self.tr.triangles.len();
        let ext = nt;
        let mut parent: Vec<usize> = (0..=nt).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let join = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                // the exterior is always the root of its class
                let (lo, hi) = if rb == ext || (ra != ext && rb < ra) { (rb, ra) } else { (ra, rb) };
                p[hi] = lo;
            }
        };
        for (t, i) in self.tr.undirected_edges() {
            if self.solid_tri[t] || self.edge_in_complex(t, i) {
                continue;
            }
            match self.tr.neighbors[t][i] {
                Some(n) => join(&mut parent, t, n),
                None => join(&mut parent, t, ext),
            }
        }

        let mut out: BTreeMap<Option<usize>, RegionRings> = BTreeMap::new();
        let region_of = |p: &mut Vec<usize>, t: usize| {
            let r = find(p, t);
            if r == ext {
                None
            } else {
                Some(r)
            }
        };
        for (t, i) in self.tr.undirected_edges() {
            if !self.edge_in_complex(t, i) {
                continue;
            }
            let (a, b) = self.tr.edge(t, i);
            let (pa, pb) = (self.tr.points[a], self.tr.points[b]);
            // t lies on the left of a -> b
            if !self.solid_tri[t] {
                let r = region_of(&mut parent, t);
                let entry = out.entry(r).or_default();
                entry.edges.push((pa, pb));
                entry.seed.get_or_insert(t);
            }
            match self.tr.neighbors[t][i] {
                Some(n) if !self.solid_tri[n] => {
                    let r = region_of(&mut parent, n);
                    let entry = out.entry(r).or_default();
                    entry.edges.push((pb, pa));
                    entry.seed.get_or_insert(n);
                }
                None => out.entry(None).or_default().edges.push((pb, pa)),
                _ => {}
            }
        }
        out
    }
}

#[derive(Default)]
struct RegionRings {
    edges: Vec<(Point, Point)>,
    seed: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    /// Outer boundary of obstacle structure, seen from the unbounded exterior.
    Outer,
    /// Bounded open space where the probing disk fits.
    Open,
}

/// Closed alpha-shape polygons of one alpha value.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaShapeSet {
    pub alpha: f64,
    /// Clockwise rings.
    pub shapes: Vec<Polygon>,
    pub kinds: Vec<ShapeKind>,
    /// A point strictly inside the open region of each `Open` shape.
    pub anchors: Vec<Option<Point>>,
    pub boundary_index: usize,
}

impl AlphaShapeSet {
    pub fn from_triangulation(tr: &Triangulation, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
        }
        let complex = AlphaComplex::new(tr, alpha);
        let mut shapes = Vec::new();
        let mut kinds = Vec::new();
        let mut anchors = Vec::new();
        for (region, rr) in complex.regions() {
            let rings = trace_rings(&rr.edges);
            match region {
                None => {
                    for ring in rings.into_iter().filter(|r| r.signed_area() < 0.0) {
                        shapes.push(ring);
                        kinds.push(ShapeKind::Outer);
                        anchors.push(None);
                    }
                }
                Some(_) => {
                    let outer = rings
                        .into_iter()
                        .filter(|r| r.signed_area() > 0.0)
                        .max_by(|a, b| a.signed_area().total_cmp(&b.signed_area()));
                    if let Some(ring) = outer {
                        shapes.push(ring.reversed());
                        kinds.push(ShapeKind::Open);
                        anchors.push(rr.seed.map(|t| {
                            let [a, b, c] = tr.corners(t);
                            Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
                        }));
                    }
                }
            }
        }
        if shapes.is_empty() {
            return Err(Error::AlphaTooSmall);
        }
        let boundary_index = (0..shapes.len())
            .max_by(|&i, &j| shapes[i].area().total_cmp(&shapes[j].area()).then(j.cmp(&i)))
            .unwrap_or(0);
        Ok(AlphaShapeSet { alpha, shapes, kinds, anchors, boundary_index })
    }

    pub fn boundary(&self) -> &Polygon {
        &self.shapes[self.boundary_index]
    }

    /// Open-space shapes strictly inside the boundary.
    pub fn rooms(&self) -> Vec<&Polygon> {
        let boundary = self.boundary();
        (0..self.shapes.len())
            .filter(|&i| i != self.boundary_index && self.kinds[i] == ShapeKind::Open)
            .filter(|&i| self.anchors[i].is_some_and(|a| boundary.contains(a)))
            .map(|i| &self.shapes[i])
            .collect()
    }

    pub fn room_count(&self) -> usize {
        self.rooms().len()
    }
}

/// Alpha shapes of a point set; the largest shape is the boundary.
pub fn compute_alpha_shapes(points: &[Point], alpha: f64) -> Result<AlphaShapeSet> {
    let tr = Triangulation::new(points)?;
    AlphaShapeSet::from_triangulation(&tr, alpha)
}
