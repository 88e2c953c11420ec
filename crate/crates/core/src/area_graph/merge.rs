use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::debug;

use super::{Area, AreaGraph, AreaSource, Passage, RoomSet};
use crate::error::Result;
use crate::geometry::Point;
use crate::topology::{AtomRef, TopologyGraph, VertexKind};

/// Distance from a room boundary below which a waypoint is not used to
/// check room membership.

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Owner {
    Room(usize),
    Edge(usize),
}

/// Groups the cut Topology Graph into areas: all edges inside one room
/// become one area, every other edge its own area. An edge outside all
/// rooms that only links room boundaries and is shorter than
/// `bridge_max_px` (a doorway between two α-shapes) joins the
/// lowest-numbered room it touches.
pub fn merge_areas(g: &TopologyGraph, rooms: &RoomSet, bridge_max_px: f64) -> Result<AreaGraph> {
    let room_of = edge_rooms(g, rooms);
    let deg = g.degrees();
    let kinds: Vec<VertexKind> = (0..g.vertices.len()).map(|v| g.kind_with(v, &deg)).collect();

    // rooms touching each passage vertex
    let mut rooms_at: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (e, edge) in g.edges.iter().enumerate() {
        if let Some(r) = room_of[e] {
            for v in [edge.from, edge.to] {
                if kinds[v] == VertexKind::Passage {
                    rooms_at.entry(v).or_default().insert(r);
                }
            }
        }
    }
    let owner: Vec<Owner> = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            if let Some(r) = room_of[e] {
                return Owner::Room(r);
            }
            let bridge = kinds[edge.from] == VertexKind::Passage
                && kinds[edge.to] == VertexKind::Passage
                && edge.length_px() < bridge_max_px;
            let touching = [edge.from, edge.to]
                .iter()
                .filter_map(|v| rooms_at.get(v))
                .flat_map(|s| s.iter().copied())
                .min();
            match touching {
                Some(r) if bridge => Owner::Room(r),
                _ => Owner::Edge(e),
            }
        })
        .collect();

    // areas are numbered by their lowest edge index
    let mut first_edge: BTreeMap<Owner, usize> = BTreeMap::new();
    for (e, o) in owner.iter().enumerate() {
        first_edge.entry(*o).or_insert(e);
    }
    let mut order: Vec<(usize, Owner)> = first_edge.iter().map(|(o, e)| (*e, *o)).collect();
    order.sort();
    let id_of: HashMap<Owner, usize> = order.iter().enumerate().map(|(i, (_, o))| (*o, i + 1)).collect();
    let area_of_edge: Vec<usize> = owner.iter().map(|o| id_of[o]).collect();

    let mut areas: Vec<Area> = order
        .iter()
        .enumerate()
        .map(|(i, (_, o))| {
            let edges: Vec<usize> = (0..g.edges.len()).filter(|&e| owner[e] == *o).collect();
            let atoms: Vec<&AtomRef> = edges.iter().flat_map(|&e| g.edges[e].atoms()).collect();
            let source = match o {
                Owner::Room(_) => AreaSource::RoomMerged,
                Owner::Edge(e) => {
                    let edge = &g.edges[*e];
                    if kinds[edge.from] == VertexKind::DeadEnd || kinds[edge.to] == VertexKind::DeadEnd {
                        AreaSource::DeadEndSegment
                    } else {
                        AreaSource::CorridorSegment
                    }
                }
            };
            Area {
                id: i + 1,
                room: match o {
                    Owner::Room(r) => Some(*r),
                    Owner::Edge(_) => None,
                },
                source,
                area_px: atoms.iter().map(|r| g.atom_area(r.atom)).sum(),
                rings: g.rings_of(atoms.iter().copied()),
                edges,
                passages: Vec::new(),
            }
        })
        .collect();

    let passages = find_passages(g, &area_of_edge, &areas);
    for p in &passages {
        areas[p.areas.0 - 1].passages.push(p.id);
        areas[p.areas.1 - 1].passages.push(p.id);
    }
    debug!("{} areas, {} passages", areas.len(), passages.len());
    Ok(AreaGraph { areas, passages })
}

/// Room index of every edge, from the midpoint of its chain.
fn edge_rooms(g: &TopologyGraph, rooms: &RoomSet) -> Vec<Option<usize>> {
    g.edges.iter().map(|e| if e.ray { None } else { rooms.room_at(e.midpoint()) }).collect()
}

/// A passage wherever two different areas meet at a vertex: between the
/// areas of edges adjacent in the rotation around that vertex.
fn find_passages(g: &TopologyGraph, area_of_edge: &[usize], areas: &[Area]) -> Vec<Passage> {
    let shared = shared_boundaries(g, area_of_edge, areas.len());
    let mut passages = Vec::new();
    for v in 0..g.vertices.len() {
        let rot = g.rotation(v);
        if rot.len() < 2 {
            continue;
        }
        let mut pairs = BTreeSet::new();
        for i in 0..rot.len() {
            let a = area_of_edge[rot[i].edge];
            let b = area_of_edge[rot[(i + 1) % rot.len()].edge];
            if a != b {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
        let point = g.vertices[v].position;
        for (a, b) in pairs {
            let segment = shared.get(&(a, b)).map(|s| component_at(s, point)).unwrap_or_default();
            passages.push(Passage { id: passages.len() + 1, areas: (a, b), point, segment });
        }
    }
    passages
}

/// Boundary segments shared by each pair of areas.
fn shared_boundaries(
    g: &TopologyGraph,
    area_of_edge: &[usize],
    n_areas: usize,
) -> HashMap<(usize, usize), Vec<(Point, Point)>> {
    type Key = ((u64, u64), (u64, u64));
    let mut directed: Vec<HashMap<Key, (Point, Point)>> = vec![HashMap::new(); n_areas + 1];
    for (e, edge) in g.edges.iter().enumerate() {
        let map = &mut directed[area_of_edge[e]];
        for r in edge.atoms() {
            let [a, b, c] = g.atoms[r.atom];
            for (p, q) in [(a, b), (b, c), (c, a)] {
                // interior edges of one area cancel against their reverse
                if map.remove(&(q.key(), p.key())).is_none() {
                    map.insert((p.key(), q.key()), (p, q));
                }
            }
        }
    }
    let mut owner: HashMap<Key, usize> = HashMap::new();
    for (area, map) in directed.iter().enumerate() {
        for k in map.keys() {
            owner.insert(*k, area);
        }
    }
    let mut out: HashMap<(usize, usize), Vec<(Point, Point)>> = HashMap::new();
    for (area, map) in directed.iter().enumerate() {
        let mut segs: Vec<_> = map.iter().collect();
        segs.sort_by(|x, y| x.0.cmp(y.0));
        for (k, &(p, q)) in segs {
            if let Some(&other) = owner.get(&(k.1, k.0)) {
                if other > area {
                    out.entry((area, other)).or_default().push((p, q));
                }
            }
        }
    }
    out
}

/// Segments connected to `point` through shared endpoints.
fn component_at(segments: &[(Point, Point)], point: Point) -> Vec<(Point, Point)> {
    let mut taken = vec![false; segments.len()];
    let mut frontier = vec![point.key()];
    let mut out = Vec::new();
    while let Some(k) = frontier.pop() {
        for (i, &(p, q)) in segments.iter().enumerate() {
            if !taken[i] && (p.key() == k || q.key() == k) {
                taken[i] = true;
                out.push((p, q));
                frontier.push(if p.key() == k { q.key() } else { p.key() });
            }
        }
    }
    out
}
