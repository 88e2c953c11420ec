use std::collections::{HashMap, VecDeque};

use log::debug;

use super::{AtomRef, HalfPoly, Stage, TopoEdge, TopoVertex, TopologyGraph, VertexRole};
use crate::error::{Error, Result};
use crate::geometry::{HalfEdgeId, Point, Polygon, PolygonIndex, VoronoiDiagram};

/// Distance, in pixels, from a ray's origin to its stand-in endpoint.
const RAY_STUB: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeStatus {
    Kept,
    Outside,
    LowClearance,
}

/// A Voronoi diagram with per-edge pruning marks.
#[derive(Debug, Clone)]
pub struct PrunedVoronoi<'a> {
    pub vd: &'a VoronoiDiagram,
    pub status: Vec<EdgeStatus>,
    pub vertex_inside: Vec<bool>,
}

impl PrunedVoronoi<'_> {
    pub fn kept_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.status.len()).filter(|&e| self.status[e] == EdgeStatus::Kept)
    }
}

/// Marks every vertex outside `boundary` and every edge touching one.
/// Rays are kept when their origin is inside.
pub fn remove_outside<'a>(vd: &'a VoronoiDiagram, boundary: &Polygon) -> Result<PrunedVoronoi<'a>> {
    if boundary.len() < 3 || boundary.area() <= 0.0 {
        return Err(Error::Degenerate("boundary polygon has no area".into()));
    }
    let index = PolygonIndex::new(boundary);
    let vertex_inside: Vec<bool> = vd.vertices.iter().map(|&p| index.contains(p)).collect();
    let status = (0..vd.edge_count())
        .map(|e| {
            let inside = match vd.edge_vertices(e) {
                (a, Some(b)) => vertex_inside[a] && vertex_inside[b],
                (a, None) => vertex_inside[a],
            };
            if inside {
                EdgeStatus::Kept
            } else {
                EdgeStatus::Outside
            }
        })
        .collect();
    Ok(PrunedVoronoi { vd, status, vertex_inside })
}

/// Marks kept edges that pass closer than `min_clearance_px` to an obstacle.
pub fn filter_low_clearance<'a>(mut pv: PrunedVoronoi<'a>, min_clearance_px: f64) -> Result<PrunedVoronoi<'a>> {
    for e in 0..pv.status.len() {
        if pv.status[e] == EdgeStatus::Kept && pv.vd.clearance(e) < min_clearance_px {
            pv.status[e] = EdgeStatus::LowClearance;
        }
    }
    if pv.kept_edges().all(|e| pv.vd.is_ray(e)) {
        return Err(Error::NoTraversableSpace);
    }
    Ok(pv)
}

/// Collapses the kept edges into chains between non-chain vertices and
/// attaches the cells of all surviving Voronoi edges to them.
///
/// Cells of kept edges go to the half-polygon of the chain they lie on.
/// Cells of low-clearance edges are handed out by a breadth-first flood
/// over cell adjacency, seeded from the kept cells, so every region the
/// clearance filter cut away joins the nearest surviving edge. The flood
/// does not enter cells of edges buried inside obstacles (see [`BURIED`]).
pub fn join_halfedge_polys(pv: &PrunedVoronoi) -> TopologyGraph {
    let vd = pv.vd;
    let mut atoms: Vec<[Point; 3]> = Vec::new();
    let mut atom_of: HashMap<HalfEdgeId, usize> = HashMap::new();
    for e in 0..vd.edge_count() {
        if pv.status[e] == EdgeStatus::Outside || vd.is_ray(e) {
            continue;
        }
        for h in [2 * e, 2 * e + 1] {
            let he = vd.halfedges[h];
            let (Some(o), Some(t)) = (he.origin, he.target) else { continue };
            atom_of.insert(h, atoms.len());
            atoms.push([vd.vertices[o], vd.vertices[t], vd.sites[he.face]]);
        }
    }

    let out = vd.outgoing();
    let kept_out: Vec<Vec<HalfEdgeId>> = out
        .iter()
        .map(|hs| hs.iter().copied().filter(|&h| pv.status[h / 2] == EdgeStatus::Kept).collect())
        .collect();
    let has_ray = |v: usize| kept_out[v].iter().any(|&h| vd.is_ray(h / 2));
    let is_node = |v: usize| kept_out[v].len() != 2 || has_ray(v);

    let mut graph = TopologyGraph { vertices: Vec::new(), edges: Vec::new(), atoms, stage: Stage::Joined };
    let mut topo_of: HashMap<usize, usize> = HashMap::new();
    let mut used = vec![false; vd.edge_count()];
    let mut owner: Vec<Option<(usize, usize, Point)>> = vec![None; graph.atoms.len()];

    let mut starts: Vec<usize> = (0..vd.vertices.len()).filter(|&v| !kept_out[v].is_empty() && is_node(v)).collect();
    // vertices on pure cycles become nodes once everything else is walked
    let cycle_starts: Vec<usize> = (0..vd.vertices.len()).filter(|&v| kept_out[v].len() == 2 && !has_ray(v)).collect();
    starts.extend(cycle_starts);

    for &start in &starts {
        for &h0 in &kept_out[start] {
            if used[h0 / 2] {
                continue;
            }
            let from = node(&mut graph, &mut topo_of, start, vd.vertices[start], VertexRole::Normal);
            if vd.is_ray(h0 / 2) {
                used[h0 / 2] = true;
                let origin = vd.vertices[start];
                let end = origin + vd.ray_direction(h0 / 2).expect("ray") * RAY_STUB;
                let to = graph.vertices.len();
                graph.vertices.push(TopoVertex { position: end, role: VertexRole::RayEnd });
                graph.edges.push(TopoEdge {
                    from,
                    to,
                    chain: vec![origin, end],
                    ray: true,
                    halves: Default::default(),
                    clearance: vd.clearance(h0 / 2),
                });
                continue;
            }
            let mut chain = vec![vd.vertices[start]];
            let mut hs = Vec::new();
            let mut h = h0;
            let mut clearance = f64::INFINITY;
            let end = loop {
                used[h / 2] = true;
                hs.push(h);
                clearance = clearance.min(vd.clearance(h / 2));
                let t = vd.halfedges[h].target.expect("bounded edge");
                chain.push(vd.vertices[t]);
                if t == start || is_node(t) {
                    break t;
                }
                match kept_out[t].iter().find(|&&n| n / 2 != h / 2 && !used[n / 2]) {
                    Some(&n) => h = n,
                    None => break t,
                }
            };
            let to = node(&mut graph, &mut topo_of, end, vd.vertices[end], VertexRole::Normal);
            let id = graph.edges.len();
            let mut halves: [HalfPoly; 2] = Default::default();
            for &h in &hs {
                let he = vd.halfedges[h];
                let anchor = vd.vertices[he.origin.unwrap()].midpoint(vd.vertices[he.target.unwrap()]);
                for (side, hh) in [(0, h), (1, he.twin)] {
                    let atom = atom_of[&hh];
                    halves[side].atoms.push(AtomRef { atom, anchor });
                    owner[atom] = Some((id, side, anchor));
                }
            }
            graph.edges.push(TopoEdge { from, to, chain, ray: false, halves, clearance });
        }
    }

    absorb_pruned_cells(pv, &atom_of, &mut graph, owner);
    debug!(
        "joined {} topology edges over {} vertices, {} atoms",
        graph.edges.len(),
        graph.vertices.len(),
        graph.atoms.len()
    );
    graph
}

fn node(
    graph: &mut TopologyGraph,
    topo_of: &mut HashMap<usize, usize>,
    v: usize,
    position: Point,
    role: VertexRole,
) -> usize {
    *topo_of.entry(v).or_insert_with(|| {
        graph.vertices.push(TopoVertex { position, role });
        graph.vertices.len() - 1
    })
}

/// Voronoi vertices this close to their sites sit on the corners between
/// adjacent obstacle cells; edges between two of them run inside obstacles.
pub const BURIED: f64 = std::f64::consts::FRAC_1_SQRT_2 + 1e-9;

fn absorb_pruned_cells(
    pv: &PrunedVoronoi,
    atom_of: &HashMap<HalfEdgeId, usize>,
    graph: &mut TopologyGraph,
    mut owner: Vec<Option<(usize, usize, Point)>>,
) {
    let vd = pv.vd;
    let n = graph.atoms.len();
    let mut halfedge_of = vec![0; n];
    for (&h, &a) in atom_of {
        halfedge_of[a] = h;
    }
    // atoms of one cell meeting at a Voronoi vertex are neighbours
    let mut corner: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for a in 0..n {
        let he = vd.halfedges[halfedge_of[a]];
        for v in [he.origin.unwrap(), he.target.unwrap()] {
            corner.entry((v, he.face)).or_default().push(a);
        }
    }
    let clearance = |v: usize| vd.vertices[v].dist(vd.sites[vd.vertex_sites[v][0]]);
    let buried = |a: usize| {
        let he = vd.halfedges[halfedge_of[a]];
        clearance(he.origin.unwrap()) <= BURIED && clearance(he.target.unwrap()) <= BURIED
    };
    let mut queue: VecDeque<usize> = (0..n).filter(|&a| owner[a].is_some()).collect();
    queue.make_contiguous().sort_by_key(|&a| owner[a].map(|o| (o.0, o.1)));
    while let Some(a) = queue.pop_front() {
        let own = owner[a].expect("queued atoms have owners");
        let he = vd.halfedges[halfedge_of[a]];
        let mut neighbours = Vec::new();
        if let Some(&t) = atom_of.get(&he.twin) {
            neighbours.push(t);
        }
        for v in [he.origin.unwrap(), he.target.unwrap()] {
            neighbours.extend(corner[&(v, he.face)].iter().copied());
        }
        for b in neighbours {
            if owner[b].is_none() && !buried(b) {
                owner[b] = Some(own);
                graph.edges[own.0].halves[own.1].atoms.push(AtomRef { atom: b, anchor: own.2 });
                queue.push_back(b);
            }
        }
    }
    let dropped = owner.iter().filter(|o| o.is_none()).count();
    if dropped > 0 {
        debug!("{dropped} pruned cells are not connected to any kept edge");
    }
}
