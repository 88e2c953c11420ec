use super::*;
use crate::map_io::GridMap;
use crate::topology::{clockwise, AtomRef, HalfPoly, Stage, TopoEdge, TopoVertex, TopologyGraph, VertexRole};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
    Polygon::new(vec![p(x0, y0), p(x0, y1), p(x1, y1), p(x1, y0)])
}

/// Straight edges with one fan triangle per side and segment, sites at
/// distance `half` from the chain.
fn graph(vertices: &[(f64, f64)], edges: &[(usize, usize)], half: f64) -> TopologyGraph {
    let mut g = TopologyGraph {
        vertices: vertices
            .iter()
            .map(|&(x, y)| TopoVertex { position: p(x, y), role: VertexRole::Normal })
            .collect(),
        edges: Vec::new(),
        atoms: Vec::new(),
        stage: Stage::VerticesMerged,
    };
    for &(from, to) in edges {
        let (a, b) = (g.vertices[from].position, g.vertices[to].position);
        let d = b - a;
        let n = p(-d.y, d.x) * (half / d.norm());
        let m = a.midpoint(b);
        let mut halves: [HalfPoly; 2] = Default::default();
        for (side, site) in [(0, m - n), (1, m + n)] {
            let atom = g.atoms.len();
            g.atoms.push(clockwise([a, b, site]));
            halves[side].atoms.push(AtomRef { atom, anchor: m });
        }
        g.edges.push(TopoEdge { from, to, chain: vec![a, b], ray: false, halves, clearance: half });
    }
    g
}

fn rooms(shapes: Vec<Polygon>) -> RoomSet {
    RoomSet::from_shapes(1.0, 100.0, shapes)
}

#[test]
fn strategy_widths() {
    assert!((choose_w(0.9, 2.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((choose_w(2.0, 1.5).unwrap() - 1.4).abs() < 1e-12);
    assert!((choose_w(1.0, 1.0).unwrap() - 0.9).abs() < 1e-12);
    assert_eq!(choose_w(0.05, 0.05).unwrap(), MIN_W);
    assert!(choose_w(0.0, 1.0).is_err());
    assert!(choose_w(1.0, -2.0).is_err());
    assert!(RoomWidth::Fixed { w: 0.0 }.width().is_err());
}

#[test]
fn edge_entering_a_room_is_cut_on_its_boundary() {
    let mut g = graph(&[(0.0, 5.0), (30.0, 5.0)], &[(0, 1)], 3.0);
    let room = rect(10.0, -10.0, 50.0, 20.0);
    let area = g.total_area();
    let oracle = crate::geometry::segment_polygon_intersection(p(0.0, 5.0), p(30.0, 5.0), &room);
    assert_eq!(cut_edges(&mut g, &rooms(vec![room.clone()]), 1.0).unwrap(), 1);
    assert_eq!(g.edges.len(), 2);
    let v = g.edges[0].to;
    let passage = g.vertices[v].position;
    assert_eq!(passage, oracle[0]);
    assert!(room.boundary_distance(passage) < crate::geometry::EPS_GEOM);
    assert!(((g.edge_area(0) + g.edge_area(1)) - area).abs() <= 1e-6 * area);
    assert!((g.edge_area(0) - area / 3.0).abs() < 1e-9);
}

#[test]
fn edges_clear_of_rooms_stay_whole() {
    let mut g = graph(&[(0.0, 5.0), (30.0, 5.0)], &[(0, 1)], 3.0);
    let before = g.edges.clone();
    assert_eq!(cut_edges(&mut g, &rooms(vec![rect(40.0, 0.0, 60.0, 10.0)]), 1.0).unwrap(), 0);
    assert_eq!(g.edges, before);
}

#[test]
fn edge_through_a_room_is_cut_twice() {
    let mut g = graph(&[(0.0, 5.0), (40.0, 5.0)], &[(0, 1)], 3.0);
    let area = g.total_area();
    assert_eq!(cut_edges(&mut g, &rooms(vec![rect(10.0, -10.0, 20.0, 20.0)]), 1.0).unwrap(), 2);
    assert_eq!(g.edges.len(), 3);
    assert!((g.total_area() - area).abs() <= 1e-6 * area);
}

#[test]
fn short_deadend_tips_are_not_cut() {
    // junction at x=30 with a 7 px stub entering the room 2 px before its tip
    let mut g = graph(
        &[(0.0, 5.0), (30.0, 5.0), (60.0, 5.0), (30.0, 12.0)],
        &[(0, 1), (1, 2), (1, 3)],
        1.0,
    );
    let room = rect(25.0, 10.0, 35.0, 30.0);
    assert_eq!(cut_edges(&mut g, &rooms(vec![room.clone()]), 3.0).unwrap(), 0);
    assert_eq!(cut_edges(&mut g, &rooms(vec![room]), 1.5).unwrap(), 1);
}

/// Plus-shaped graph: junction at the origin and four arms of length 20.
fn plus() -> TopologyGraph {
    graph(&[(0.0, 0.0), (20.0, 0.0), (0.0, 20.0), (-20.0, 0.0), (0.0, -20.0)], &[(0, 1), (0, 2), (0, 3), (0, 4)], 2.0)
}

#[test]
fn without_rooms_each_edge_is_an_area() {
    let g = plus();
    let ag = merge_areas(&g, &RoomSet::empty(1.0, 100.0), 20.0).unwrap();
    assert_eq!(ag.areas.len(), g.edges.len());
    // four arms around one junction: consecutive pairs only
    assert_eq!(ag.passages.len(), 4);
    assert!(ag.passages.iter().all(|ps| ps.point == p(0.0, 0.0)));
    assert!(ag.areas.iter().all(|a| a.source == AreaSource::DeadEndSegment));
    assert!(ag.is_connected());
    assert!((ag.total_area_px() - g.total_area()).abs() <= 1e-9 * g.total_area());
}

#[test]
fn one_room_over_everything_is_one_area() {
    let g = plus();
    let ag = merge_areas(&g, &rooms(vec![rect(-30.0, -30.0, 30.0, 30.0)]), 20.0).unwrap();
    assert_eq!(ag.areas.len(), 1);
    assert!(ag.passages.is_empty());
    assert_eq!(ag.areas[0].room, Some(0));
    assert_eq!(ag.areas[0].source, AreaSource::RoomMerged);
    assert_eq!(ag.areas[0].edges.len(), 4);
}

#[test]
fn doorway_piece_joins_a_room() {
    // room A left of x=10, doorway 10..14, room B right of x=14
    let mut g = graph(&[(0.0, 5.0), (30.0, 5.0)], &[(0, 1)], 2.0);
    let set = rooms(vec![rect(-5.0, -5.0, 10.0, 15.0), rect(14.0, -5.0, 40.0, 15.0)]);
    let area = g.total_area();
    assert_eq!(cut_edges(&mut g, &set, 1.0).unwrap(), 2);
    let ag = merge_areas(&g, &set, 20.0).unwrap();
    assert_eq!(ag.areas.len(), 2);
    assert_eq!(ag.passages.len(), 1);
    let ps = &ag.passages[0];
    assert_eq!(ps.point, p(14.0, 5.0));
    assert!(!ps.segment.is_empty());
    assert!(ps.segment.iter().any(|&(a, b)| a == ps.point || b == ps.point));
    assert!((ag.total_area_px() - area).abs() <= 1e-6 * area);

    // a long link between the rooms stays a corridor
    let narrow = merge_areas(&g, &set, 3.0).unwrap();
    assert_eq!(narrow.areas.len(), 3);
    assert_eq!(narrow.passages.len(), 2);
}

#[test]
fn raster_follows_pixel_centers() {
    let map = GridMap::new(6, 4, 0.05, vec![255; 24]).unwrap();
    let mut g = graph(&[(0.0, 2.0), (3.0, 2.0), (6.0, 2.0)], &[(0, 1), (1, 2)], 2.0);
    g.atoms.clear();
    for e in 0..2 {
        let x0 = 3.0 * e as f64;
        let box_atoms = [
            clockwise([p(x0, 0.0), p(x0 + 3.0, 0.0), p(x0 + 3.0, 4.0)]),
            clockwise([p(x0, 0.0), p(x0 + 3.0, 4.0), p(x0, 4.0)]),
        ];
        for (h, t) in box_atoms.into_iter().enumerate() {
            g.atoms.push(t);
            g.edges[e].halves[h].atoms = vec![AtomRef { atom: 2 * e + h, anchor: g.edges[e].midpoint() }];
        }
    }
    let ag = merge_areas(&g, &RoomSet::empty(1.0, 100.0), 1.0).unwrap();
    let raster = rasterize(&ag, &map);
    assert_eq!(raster.label_set(), vec![1, 2]);
    for y in 0..4 {
        for x in 0..6 {
            assert_eq!(raster.get(x, y), if x < 3 { 1 } else { 2 });
        }
    }
    let labelled = raster.labels.iter().filter(|&&l| l != 0).count() as f64;
    assert!((labelled - ag.total_area_px()).abs() < 1e-9);
}
