use serde::Serialize;

use super::polygon::{stitch_polygons, Polygon};
use super::triangulation::Triangulation;
use super::{incircle, orient, point_segment_dist2, Point};
use crate::error::{Error, Result};

pub type VertexId = usize;
pub type HalfEdgeId = usize;

/// One directed side of a Voronoi edge.
///
/// The face of a halfedge is the site whose cell lies on its clockwise side,
/// i.e. `orient(origin, target, site) < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfEdge {
    /// `None` for the end at infinity of a ray.
    pub origin: Option<VertexId>,
    pub target: Option<VertexId>,
    pub twin: HalfEdgeId,
    pub face: usize,
}

/// Voronoi diagram of a point set in halfedge form.
///
/// Edge `k` is represented by halfedges `2k` and `2k + 1`. Rays keep their
/// finite vertex as the origin of halfedge `2k` and carry an explicit
/// outward direction.
#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    pub sites: Vec<Point>,
    pub vertices: Vec<Point>,
    /// Sites equidistant to each vertex (three or more when cocircular).
    pub vertex_sites: Vec<Vec<usize>>,
    pub halfedges: Vec<HalfEdge>,
    ray_dirs: Vec<Option<Point>>,
    pub triangulation: Triangulation,
    /// Voronoi vertex of each Delaunay triangle.
    pub triangle_vertex: Vec<VertexId>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.0[hi] = lo;
        }
    }
}

/// Builds the Voronoi diagram of `sites` as the dual of their Delaunay
/// triangulation. Cocircular triangles collapse onto one Voronoi vertex.
pub fn compute_voronoi(sites: &[Point]) -> Result<VoronoiDiagram> {
    let tr = Triangulation::new(sites)?;
    let nt = tr.triangles.len();
    let centers: Vec<Point> = (0..nt).map(|t| tr.circumcenter(t)).collect();

    let mut uf = UnionFind((0..nt).collect());
    for (t, i) in tr.undirected_edges() {
        if let Some(n) = tr.neighbors[t][i] {
            let [a, b, c] = tr.corners(t);
            let d = tr.points[tr.opposite(n, tr.shared_edge_index(n, t))];
            if incircle(a, b, c, d) == 0.0 || centers[t].key() == centers[n].key() {
                uf.union(t, n);
            }
        }
    }

    let mut group_vertex = vec![usize::MAX; nt];
    let mut triangle_vertex = vec![0; nt];
    let mut vertices = Vec::new();
    let mut vertex_sites: Vec<Vec<usize>> = Vec::new();
    for t in 0..nt {
        let root = uf.find(t);
        if group_vertex[root] == usize::MAX {
            group_vertex[root] = vertices.len();
            vertices.push(centers[root]);
            vertex_sites.push(Vec::new());
        }
        let v = group_vertex[root];
        triangle_vertex[t] = v;
        vertex_sites[v].extend_from_slice(&tr.triangles[t]);
    }
    for s in &mut vertex_sites {
        s.sort_unstable();
        s.dedup();
    }

    let mut halfedges = Vec::new();
    let mut ray_dirs = Vec::new();
    for (t, i) in tr.undirected_edges() {
        let (p, q) = tr.edge(t, i);
        let a = triangle_vertex[t];
        let k = halfedges.len();
        match tr.neighbors[t][i] {
            Some(n) => {
                let b = triangle_vertex[n];
                if a == b {
                    continue;
                }
                let (fa, fb) = faces_of(vertices[a], vertices[b], sites[p], p, q);
                halfedges.push(HalfEdge { origin: Some(a), target: Some(b), twin: k + 1, face: fa });
                halfedges.push(HalfEdge { origin: Some(b), target: Some(a), twin: k, face: fb });
                ray_dirs.push(None);
            }
            None => {
                // triangle interior is on the left of p -> q, so the ray
                // points to the right
                let d = tr.points[q] - tr.points[p];
                let dir = Point::new(d.y, -d.x) * (1.0 / d.norm());
                let (fa, fb) = faces_of(vertices[a], vertices[a] + dir, sites[p], p, q);
                halfedges.push(HalfEdge { origin: Some(a), target: None, twin: k + 1, face: fa });
                halfedges.push(HalfEdge { origin: None, target: Some(a), twin: k, face: fb });
                ray_dirs.push(Some(dir));
            }
        }
    }

    Ok(VoronoiDiagram {
        sites: sites.to_vec(),
        vertices,
        vertex_sites,
        halfedges,
        ray_dirs,
        triangulation: tr,
        triangle_vertex,
    })
}

fn faces_of(a: Point, b: Point, sp: Point, p: usize, q: usize) -> (usize, usize) {
    if orient(a, b, sp) < 0.0 {
        (p, q)
    } else {
        (q, p)
    }
}

impl VoronoiDiagram {
    pub fn edge_count(&self) -> usize {
        self.halfedges.len() / 2
    }

    pub fn is_ray(&self, edge: usize) -> bool {
        self.ray_dirs[edge].is_some()
    }

    pub fn ray_direction(&self, edge: usize) -> Option<Point> {
        self.ray_dirs[edge]
    }

    /// The two sites separated by an edge, as (face of `2k`, face of `2k+1`).
    pub fn edge_sites(&self, edge: usize) -> (usize, usize) {
        (self.halfedges[2 * edge].face, self.halfedges[2 * edge + 1].face)
    }

    /// The finite endpoints of an edge. For rays the second entry is `None`.
    pub fn edge_vertices(&self, edge: usize) -> (VertexId, Option<VertexId>) {
        let h = self.halfedges[2 * edge];
        (h.origin.expect("halfedge 2k has a finite origin"), h.target)
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        match self.edge_vertices(edge) {
            (a, Some(b)) => self.vertices[a].dist(self.vertices[b]),
            _ => f64::INFINITY,
        }
    }

    /// Minimum distance from the edge to its nearest obstacle site.
    ///
    /// Along a Voronoi edge the nearest sites are exactly the two it
    /// separates, so the minimum is the distance from one of them to the
    /// segment (or ray).
    pub fn clearance(&self, edge: usize) -> f64 {
        let (s, _) = self.edge_sites(edge);
        let site = self.sites[s];
        let (a, b) = self.edge_vertices(edge);
        let pa = self.vertices[a];
        match (b, self.ray_dirs[edge]) {
            (Some(b), _) => point_segment_dist2(site, pa, self.vertices[b]).sqrt(),
            (None, Some(d)) => {
                let t = (site - pa).dot(d).max(0.0);
                site.dist(pa + d * t)
            }
            (None, None) => unreachable!("edges without a target are rays"),
        }
    }

    /// Incident halfedges leaving each vertex.
    pub fn outgoing(&self) -> Vec<Vec<HalfEdgeId>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (h, he) in self.halfedges.iter().enumerate() {
            if let Some(o) = he.origin {
                out[o].push(h);
            }
        }
        out
    }
}

/// Clockwise polygon of one side of a halfedge chain: the chain's waypoints
/// followed by the sites of its faces, walked back in reverse.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfPolygon {
    pub polygon: Polygon,
    pub halfedges: Vec<HalfEdgeId>,
}

/// Stitched pair of twin half-polygons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePolygon {
    pub polygon: Polygon,
    pub halfedges: Vec<HalfEdgeId>,
}

/// Builds the half-polygon of a contiguous chain of bounded halfedges.
/// Each face contributes its site once, in chain order.
pub fn build_half_polygon(vd: &VoronoiDiagram, chain: &[HalfEdgeId]) -> Result<HalfPolygon> {
    if chain.is_empty() {
        return Err(Error::Geometry("empty halfedge chain".into()));
    }
    let mut waypoints = Vec::with_capacity(chain.len() + 1);
    let mut sites: Vec<usize> = Vec::new();
    for (i, &h) in chain.iter().enumerate() {
        let he = vd.halfedges[h];
        let (Some(o), Some(t)) = (he.origin, he.target) else {
            return Err(Error::Geometry(format!("halfedge {h} is a ray; half-polygon is partial")));
        };
        if i == 0 {
            waypoints.push(vd.vertices[o]);
        } else if vd.halfedges[chain[i - 1]].target != Some(o) {
            return Err(Error::Geometry(format!("halfedge chain breaks at {h}")));
        }
        waypoints.push(vd.vertices[t]);
        if sites.last() != Some(&he.face) {
            sites.push(he.face);
        }
    }
    let mut points = waypoints;
    points.extend(sites.iter().rev().map(|&s| vd.sites[s]));
    let polygon = Polygon::new(points);
    if polygon.len() < 3 || polygon.signed_area() > 0.0 {
        return Err(Error::Geometry("half-polygon is not clockwise".into()));
    }
    Ok(HalfPolygon { polygon, halfedges: chain.to_vec() })
}

impl EdgePolygon {
    /// Polygon of a chain and its twin chain.
    pub fn from_chain(vd: &VoronoiDiagram, chain: &[HalfEdgeId]) -> Result<EdgePolygon> {
        let twins: Vec<HalfEdgeId> = chain.iter().rev().map(|&h| vd.halfedges[h].twin).collect();
        let a = build_half_polygon(vd, chain)?;
        let b = build_half_polygon(vd, &twins)?;
        let polygon = stitch_polygons(&a.polygon, &b.polygon)?;
        let mut halfedges = a.halfedges;
        halfedges.extend(b.halfedges);
        Ok(EdgePolygon { polygon, halfedges })
    }
}
