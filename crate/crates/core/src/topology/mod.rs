//! Topology Graph: the pruned Voronoi diagram whose edges carry the polygons
//! of the free space they represent.
//!
//! Polygons are kept as sets of disjoint triangles ("atoms"). An atom is the
//! triangle spanned by one Voronoi edge segment and the site of the face on
//! one of its sides, so the atoms of a diagram tile its bounded cells
//! exactly. Moving atoms between half-polygons merges polygons without any
//! loss of area, and the boundary of a polygon is recovered by stitching its
//! atoms together.

mod build;
mod prune;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{trace_rings, Point, Polygon};

pub use build::{filter_low_clearance, join_halfedge_polys, remove_outside, EdgeStatus, PrunedVoronoi, BURIED};
pub use prune::{keep_biggest_group, merge_close_vertices, remove_deadends, remove_rays};

/// Thresholds of the pruning stages, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneParams {
    pub min_clearance: f64,
    pub deadend_min_length: f64,
    pub vertex_merge_dist: f64,
    pub deadend_passes: usize,
}

impl PruneParams {
    /// Defaults derived from the robot width.
    pub fn for_robot(robot_width: f64) -> Self {
        PruneParams {
            min_clearance: robot_width / 2.0,
            deadend_min_length: 1.0,
            vertex_merge_dist: 0.5,
            deadend_passes: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = self.min_clearance > 0.0
            && self.deadend_min_length > 0.0
            && self.vertex_merge_dist > 0.0
            && self.deadend_passes > 0;
        if !all_positive {
            return Err(Error::InvalidInput(format!("prune parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

impl Default for PruneParams {
    fn default() -> Self {
        PruneParams::for_robot(0.4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    DeadEnd,
    Junction,
    /// Finite stand-in for the far end of a ray.
    RayEndpoint,
    /// Degree-2 vertex created by cutting an edge at a room boundary.
    Passage,
    /// Degree-2 vertex kept only because one of its edges is a ray.
    RayJunction,
    /// Interior chain vertex; never present after a join.
    Chain,
    Isolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VertexRole {
    Normal,
    RayEnd,
    Passage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoVertex {
    pub position: Point,
    pub(crate) role: VertexRole,
}

/// Atom membership in a half-polygon. The anchor is a point on the owning
/// edge's chain that the atom is attached to; cutting an edge distributes
/// atoms by where their anchor falls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomRef {
    pub atom: usize,
    pub anchor: Point,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HalfPoly {
    pub atoms: Vec<AtomRef>,
}

/// A Topology Graph edge: a maximal chain of Voronoi edges between two
/// non-chain vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct TopoEdge {
    pub from: usize,
    pub to: usize,
    /// Waypoints from `from` to `to`, both included.
    pub chain: Vec<Point>,
    pub ray: bool,
    /// `halves[0]` lies on the clockwise side of the chain walked from
    /// `from` to `to`, `halves[1]` on the other side.
    pub halves: [HalfPoly; 2],
    /// Minimum distance to the nearest obstacle along the chain, in pixels.
    pub clearance: f64,
}

impl TopoEdge {
    pub fn length_px(&self) -> f64 {
        if self.ray {
            return f64::INFINITY;
        }
        self.chain.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub(crate) fn reverse(&mut self) {
        std::mem::swap(&mut self.from, &mut self.to);
        self.chain.reverse();
        self.halves.swap(0, 1);
    }

    pub fn atoms(&self) -> impl Iterator<Item = &AtomRef> {
        self.halves[0].atoms.iter().chain(self.halves[1].atoms.iter())
    }

    /// Point at half of the chain's arc length.
    pub fn midpoint(&self) -> Point {
        let total = self.length_px();
        if !total.is_finite() || self.chain.len() < 2 {
            return self.chain[0];
        }
        let mut acc = 0.0;
        for w in self.chain.windows(2) {
            let l = w[0].dist(w[1]);
            if acc + l >= total / 2.0 && l > 0.0 {
                return w[0].lerp(w[1], (total / 2.0 - acc) / l);
            }
            acc += l;
        }
        *self.chain.last().unwrap_or(&self.chain[0])
    }
}

/// Where an edge touches a vertex: the chain starts there or ends there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Incidence {
    pub edge: usize,
    pub at_start: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Joined,
    DeadendsRemoved,
    BiggestGroup,
    RaysRemoved,
    VerticesMerged,
    Cut,
}

/// G⁰ with polygons: vertices, edges and the shared atom table.
#[derive(Debug, Clone)]
pub struct TopologyGraph {
    pub vertices: Vec<TopoVertex>,
    pub edges: Vec<TopoEdge>,
    pub atoms: Vec<[Point; 3]>,
    pub stage: Stage,
}

impl TopologyGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.from] += 1;
            deg[e.to] += 1;
        }
        deg
    }

    pub fn vertex_kind(&self, v: usize) -> VertexKind {
        let deg = self.degrees();
        self.kind_with(v, &deg)
    }

    pub(crate) fn kind_with(&self, v: usize, deg: &[usize]) -> VertexKind {
        match self.vertices[v].role {
            VertexRole::RayEnd => return VertexKind::RayEndpoint,
            VertexRole::Passage if deg[v] == 2 => return VertexKind::Passage,
            _ => {}
        }
        match deg[v] {
            0 => VertexKind::Isolated,
            1 => VertexKind::DeadEnd,
            2 if self.incident(v).iter().any(|i| self.edges[i.edge].ray) => VertexKind::RayJunction,
            2 => VertexKind::Chain,
            _ => VertexKind::Junction,
        }
    }

    pub(crate) fn incident(&self, v: usize) -> Vec<Incidence> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == v {
                out.push(Incidence { edge: i, at_start: true });
            }
            if e.to == v {
                out.push(Incidence { edge: i, at_start: false });
            }
        }
        out
    }

    /// Direction in which an incidence leaves its vertex.
    pub(crate) fn leaving_direction(&self, inc: Incidence) -> Point {
        let c = &self.edges[inc.edge].chain;
        let n = c.len();
        if inc.at_start {
            c[1.min(n - 1)] - c[0]
        } else {
            c[n.saturating_sub(2)] - c[n - 1]
        }
    }

    /// Incidences around `v` sorted by increasing bearing in image
    /// coordinates, which is visually clockwise. Ties go to the lower edge id.
    pub(crate) fn rotation(&self, v: usize) -> Vec<Incidence> {
        let mut inc = self.incident(v);
        inc.sort_by(|a, b| {
            let da = self.leaving_direction(*a);
            let db = self.leaving_direction(*b);
            da.y.atan2(da.x)
                .total_cmp(&db.y.atan2(db.x))
                .then(a.edge.cmp(&b.edge))
                .then(b.at_start.cmp(&a.at_start))
        });
        inc
    }

    /// Half-polygon index of the halfedge leaving the vertex at `inc`.
    pub(crate) fn leaving_half(inc: Incidence) -> usize {
        if inc.at_start {
            0
        } else {
            1
        }
    }

    /// Half-polygon index of the halfedge arriving at the vertex at `inc`.
    pub(crate) fn arriving_half(inc: Incidence) -> usize {
        1 - Self::leaving_half(inc)
    }

    /// Anchor for atoms attached next to the vertex at `inc`.
    pub(crate) fn anchor_near(&self, inc: Incidence) -> Point {
        let c = &self.edges[inc.edge].chain;
        let n = c.len();
        if inc.at_start {
            c[0].midpoint(c[1.min(n - 1)])
        } else {
            c[n - 1].midpoint(c[n.saturating_sub(2)])
        }
    }

    pub fn atom_area(&self, atom: usize) -> f64 {
        let [a, b, c] = self.atoms[atom];
        0.5 * (b - a).cross(c - a).abs()
    }

    pub fn edge_area(&self, e: usize) -> f64 {
        self.edges[e].atoms().map(|r| self.atom_area(r.atom)).sum()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.edges.len()).map(|e| self.edge_area(e)).sum()
    }

    pub fn total_length_px(&self) -> f64 {
        self.edges.iter().filter(|e| !e.ray).map(|e| e.length_px()).sum()
    }

    /// Stitched boundary of a set of atoms: clockwise outer rings and
    /// counter-clockwise holes.
    pub fn rings_of<'a>(&self, atoms: impl IntoIterator<Item = &'a AtomRef>) -> Vec<Polygon> {
        let mut edges = Vec::new();
        for r in atoms {
            let [a, b, c] = self.atoms[r.atom];
            // atoms are clockwise; reverse so the interior is on the left
            edges.push((b, a));
            edges.push((c, b));
            edges.push((a, c));
        }
        trace_rings(&edges).into_iter().map(|r| r.reversed()).collect()
    }

    pub fn edge_polygon(&self, e: usize) -> Vec<Polygon> {
        self.rings_of(self.edges[e].atoms())
    }

    pub fn half_polygon(&self, e: usize, half: usize) -> Vec<Polygon> {
        self.rings_of(self.edges[e].halves[half].atoms.iter())
    }

    /// Merges chains through every plain degree-2 vertex.
    pub(crate) fn collapse_chains(&mut self) {
        loop {
            let deg = self.degrees();
            let candidate = (0..self.vertices.len()).find(|&v| {
                deg[v] == 2 && self.kind_with(v, &deg) == VertexKind::Chain && {
                    let inc = self.incident(v);
                    inc[0].edge != inc[1].edge
                }
            });
            let Some(v) = candidate else { break };
            let inc = self.incident(v);
            let (i, j) = (inc[0].edge, inc[1].edge);
            if self.edges[i].to != v {
                self.edges[i].reverse();
            }
            if self.edges[j].from != v {
                self.edges[j].reverse();
            }
            let second = self.edges[j].clone();
            let first = &mut self.edges[i];
            first.chain.extend_from_slice(&second.chain[1..]);
            first.to = second.to;
            first.clearance = first.clearance.min(second.clearance);
            for h in 0..2 {
                first.halves[h].atoms.extend_from_slice(&second.halves[h].atoms);
            }
            self.edges.remove(j);
        }
        self.compact();
    }

    /// Drops vertices without edges and renumbers.
    pub(crate) fn compact(&mut self) {
        let deg = self.degrees();
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut kept = Vec::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            if deg[v] > 0 {
                map[v] = kept.len();
                kept.push(vert.clone());
            }
        }
        for e in &mut self.edges {
            e.from = map[e.from];
            e.to = map[e.to];
        }
        self.vertices = kept;
    }

    /// Moves every atom of edge `src` into half `half` of edge `dst`,
    /// re-anchored at `anchor`.
    pub(crate) fn absorb(&mut self, src: usize, dst: usize, half: usize, anchor: Point) {
        let moved: Vec<AtomRef> = self.edges[src]
            .atoms()
            .map(|r| AtomRef { atom: r.atom, anchor })
            .collect();
        self.edges[src].halves = Default::default();
        self.edges[dst].halves[half].atoms.extend(moved);
    }

    /// Splits edge `e` at `point`, which lies on chain segment `seg` (or is
    /// one of its interior waypoints). Returns the new passage vertex. The first piece keeps index `e`, the
    /// second is appended.
    pub fn split_edge(&mut self, e: usize, seg: usize, point: Point) -> Result<usize> {
        let edge = self.edges[e].clone();
        if edge.ray || seg + 1 >= edge.chain.len() {
            return Err(Error::Geometry(format!("cannot split edge {e} at segment {seg}")));
        }
        let (a, b) = (edge.chain[seg], edge.chain[seg + 1]);
        let last = edge.chain.len() - 1;
        let at_waypoint = match (point == a, point == b) {
            (true, _) if seg > 0 => Some(seg),
            (_, true) if seg + 1 < last => Some(seg + 1),
            (false, false) => None,
            _ => return Err(Error::Geometry("split point coincides with an edge end".into())),
        };
        if let Some(k) = at_waypoint {
            return Ok(self.split_at_waypoint(e, k));
        }
        let seg_len2 = a.dist2(b);
        let t_cut = (point - a).dot(b - a) / seg_len2;

        let mut first_chain = edge.chain[..=seg].to_vec();
        first_chain.push(point);
        let mut second_chain = vec![point];
        second_chain.extend_from_slice(&edge.chain[seg + 1..]);

        let mut halves_first: [HalfPoly; 2] = Default::default();
        let mut halves_second: [HalfPoly; 2] = Default::default();
        let locator = ChainLocator::new(&edge.chain);
        for h in 0..2 {
            for r in &edge.halves[h].atoms {
                let tri = self.atoms[r.atom];
                if tri.contains(&a) && tri.contains(&b) {
                    let site = *tri.iter().find(|p| **p != a && **p != b).expect("atom has a site corner");
                    let ia = self.push_atom(clockwise([a, point, site]));
                    let ib = self.push_atom(clockwise([point, b, site]));
                    halves_first[h].atoms.push(AtomRef { atom: ia, anchor: a.midpoint(point) });
                    halves_second[h].atoms.push(AtomRef { atom: ib, anchor: point.midpoint(b) });
                    continue;
                }
                let (s, t) = locator.locate(r.anchor);
                if s < seg || (s == seg && t < t_cut) {
                    halves_first[h].atoms.push(*r);
                } else {
                    halves_second[h].atoms.push(*r);
                }
            }
        }

        Ok(self.replace_with_pieces(e, point, first_chain, second_chain, halves_first, halves_second))
    }

    fn split_at_waypoint(&mut self, e: usize, k: usize) -> usize {
        let edge = self.edges[e].clone();
        let locator = ChainLocator::new(&edge.chain);
        let mut first: [HalfPoly; 2] = Default::default();
        let mut second: [HalfPoly; 2] = Default::default();
        for h in 0..2 {
            for r in &edge.halves[h].atoms {
                if locator.locate(r.anchor).0 < k {
                    first[h].atoms.push(*r);
                } else {
                    second[h].atoms.push(*r);
                }
            }
        }
        let point = edge.chain[k];
        self.replace_with_pieces(e, point, edge.chain[..=k].to_vec(), edge.chain[k..].to_vec(), first, second)
    }

    fn replace_with_pieces(
        &mut self,
        e: usize,
        point: Point,
        first_chain: Vec<Point>,
        second_chain: Vec<Point>,
        halves_first: [HalfPoly; 2],
        halves_second: [HalfPoly; 2],
    ) -> usize {
        let edge = self.edges[e].clone();
        let v = self.vertices.len();
        self.vertices.push(TopoVertex { position: point, role: VertexRole::Passage });
        self.edges[e] = TopoEdge {
            from: edge.from,
            to: v,
            chain: first_chain,
            ray: false,
            halves: halves_first,
            clearance: edge.clearance,
        };
        self.edges.push(TopoEdge {
            from: v,
            to: edge.to,
            chain: second_chain,
            ray: false,
            halves: halves_second,
            clearance: edge.clearance,
        });
        v
    }

    /// Plain-text dump: one line per vertex, then one per edge.
    pub fn to_text(&self, resolution: f64) -> String {
        use std::fmt::Write;
        let deg = self.degrees();
        let mut out = format!("# vertices {}\n", self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let kind = self.kind_with(i, &deg);
            let _ = writeln!(out, "v {i} {:.3} {:.3} {kind:?} {}", v.position.x, v.position.y, deg[i]);
        }
        let _ = writeln!(out, "# edges {}", self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let len = if e.ray { "inf".to_string() } else { format!("{:.3}", e.length_px() * resolution) };
            let _ = writeln!(out, "e {i} {} {} {len} {:.3}", e.from, e.to, self.edge_area(i));
        }
        out
    }

    fn push_atom(&mut self, tri: [Point; 3]) -> usize {
        self.atoms.push(tri);
        self.atoms.len() - 1
    }
}

pub(crate) fn clockwise(t: [Point; 3]) -> [Point; 3] {
    if (t[1] - t[0]).cross(t[2] - t[0]) > 0.0 {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

/// Maps points on (or near) a chain to a segment index and parameter.
struct ChainLocator<'a> {
    chain: &'a [Point],
    midpoints: std::collections::HashMap<(u64, u64), usize>,
}

impl<'a> ChainLocator<'a> {
    fn new(chain: &'a [Point]) -> Self {
        let midpoints = chain
            .windows(2)
            .enumerate()
            .map(|(i, w)| (w[0].midpoint(w[1]).key(), i))
            .collect();
        ChainLocator { chain, midpoints }
    }

    fn locate(&self, p: Point) -> (usize, f64) {
        if let Some(&i) = self.midpoints.get(&p.key()) {
            return (i, 0.5);
        }
        let mut best = (f64::INFINITY, 0, 0.0);
        for (i, w) in self.chain.windows(2).enumerate() {
            let ab = w[1] - w[0];
            let len2 = ab.dot(ab);
            let t = if len2 > 0.0 { ((p - w[0]).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let d = p.dist2(w[0] + ab * t);
            if d < best.0 {
                best = (d, i, t);
            }
        }
        (best.1, best.2)
    }
}

#[cfg(test)]
mod tests;
