use proptest::prelude::*;

use super::*;
use crate::geometry::{compute_alpha_shapes, compute_voronoi, EdgePolygon, Point};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Hand-built graph. Each edge gets one small marker atom per side so the
/// destination of absorbed polygons can be traced.
struct Builder {
    g: TopologyGraph,
}

impl Builder {
    fn new(vertices: &[(f64, f64)]) -> Self {
        let vertices = vertices
            .iter()
            .map(|&(x, y)| TopoVertex { position: p(x, y), role: VertexRole::Normal })
            .collect();
        Builder { g: TopologyGraph { vertices, edges: Vec::new(), atoms: Vec::new(), stage: Stage::Joined } }
    }

    fn edge(mut self, from: usize, to: usize) -> Self {
        let (a, b) = (self.g.vertices[from].position, self.g.vertices[to].position);
        let m = a.midpoint(b);
        let mut halves: [HalfPoly; 2] = Default::default();
        for (side, off) in [(0, 0.3), (1, -0.3)] {
            let atom = self.g.atoms.len();
            self.g.atoms.push(clockwise([a.lerp(b, 0.4), a.lerp(b, 0.6), m + p(off, off)]));
            halves[side].atoms.push(AtomRef { atom, anchor: m });
        }
        self.g.edges.push(TopoEdge { from, to, chain: vec![a, b], ray: false, halves, clearance: 1.0 });
        self
    }

    fn ray(mut self, from: usize, dir: (f64, f64)) -> Self {
        let a = self.g.vertices[from].position;
        let end = a + p(dir.0, dir.1);
        let to = self.g.vertices.len();
        self.g.vertices.push(TopoVertex { position: end, role: VertexRole::RayEnd });
        self.g.edges.push(TopoEdge {
            from,
            to,
            chain: vec![a, end],
            ray: true,
            halves: Default::default(),
            clearance: 1.0,
        });
        self
    }
}

fn find_edge(g: &TopologyGraph, a: Point, b: Point) -> usize {
    g.edges
        .iter()
        .position(|e| {
            let (s, t) = (g.vertices[e.from].position, g.vertices[e.to].position);
            (s == a && t == b) || (s == b && t == a)
        })
        .unwrap_or_else(|| panic!("no edge {a:?}-{b:?}"))
}

fn half_facing_start(g: &TopologyGraph, e: usize, at: Point, leaving: bool) -> &HalfPoly {
    let starts_here = g.vertices[g.edges[e].from].position == at;
    let half = if starts_here == leaving { 0 } else { 1 };
    &g.edges[e].halves[half]
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
}

/// Junction at the origin with a short stub pointing up, a long dead end
/// pointing down, a long dead end to the west and an edge east to a second
/// junction.
fn stub_fixture() -> Builder {
    Builder::new(&[(0.0, 0.0), (0.0, -3.0), (20.0, 0.0), (0.0, 20.0), (-20.0, 0.0), (40.0, 0.0), (20.0, 20.0)])
        .edge(0, 1)
        .edge(0, 2)
        .edge(0, 3)
        .edge(0, 4)
        .edge(2, 5)
        .edge(2, 6)
}

#[test]
fn stub_joins_next_half_polygon() {
    let mut g = stub_fixture().g;
    let stub_atoms: Vec<usize> = g.edges[0].atoms().map(|r| r.atom).collect();
    let area = g.total_area();
    assert_eq!(remove_deadends(&mut g, 10.0), 1);
    let east = find_edge(&g, p(0.0, 0.0), p(20.0, 0.0));
    let next = half_facing_start(&g, east, p(0.0, 0.0), true);
    for a in stub_atoms {
        assert!(next.atoms.iter().any(|r| r.atom == a));
    }
    assert!(rel_eq(g.total_area(), area, 1e-12));
}

#[test]
fn stub_next_to_another_stub_joins_last_half_polygon() {
    // second stub at -45 degrees sits between the first stub and east edge
    let mut b = stub_fixture();
    b.g.vertices.push(TopoVertex { position: p(2.0, -2.0), role: VertexRole::Normal });
    let mut g = b.edge(0, 7).g;
    let first: Vec<usize> = g.edges[0].atoms().map(|r| r.atom).collect();
    let second: Vec<usize> = g.edges[6].atoms().map(|r| r.atom).collect();
    assert_eq!(remove_deadends(&mut g, 10.0), 2);
    let west = find_edge(&g, p(0.0, 0.0), p(-20.0, 0.0));
    let last = half_facing_start(&g, west, p(0.0, 0.0), false);
    assert!(first.iter().all(|a| last.atoms.iter().any(|r| r.atom == *a)));
    let east = find_edge(&g, p(0.0, 0.0), p(20.0, 0.0));
    let next = half_facing_start(&g, east, p(0.0, 0.0), true);
    assert!(second.iter().all(|a| next.atoms.iter().any(|r| r.atom == *a)));
}

#[test]
fn deadend_removal_reaches_fixpoint() {
    let mut g = stub_fixture().g;
    while remove_deadends(&mut g, 25.0) > 0 {}
    let edges = g.edges.clone();
    assert_eq!(remove_deadends(&mut g, 25.0), 0);
    assert_eq!(g.edges, edges);
}

#[test]
fn biggest_component_survives() {
    let mut g = Builder::new(&[(0.0, 0.0), (10.0, 0.0), (0.0, 5.0), (3.0, 5.0)])
        .edge(0, 1)
        .edge(2, 3)
        .g;
    let kept_area = g.edge_area(0);
    keep_biggest_group(&mut g).unwrap();
    assert_eq!(g.edges.len(), 1);
    assert_eq!(g.edges[0].length_px(), 10.0);
    assert!(rel_eq(g.total_area(), kept_area, 1e-12));

    let mut connected = stub_fixture().g;
    let before = connected.edges.clone();
    keep_biggest_group(&mut connected).unwrap();
    assert_eq!(connected.edges, before);
}

#[test]
fn empty_graph_has_no_biggest_group() {
    let mut g = Builder::new(&[]).g;
    assert!(matches!(keep_biggest_group(&mut g), Err(Error::NoTraversableSpace)));
}

#[test]
fn removing_a_ray_rejoins_the_chain() {
    let mut g = Builder::new(&[(0.0, 0.0), (-10.0, 0.0), (10.0, 0.0)])
        .edge(1, 0)
        .edge(0, 2)
        .ray(0, (0.0, 1.0))
        .g;
    let area = g.total_area();
    remove_rays(&mut g);
    assert_eq!(g.edges.len(), 1);
    assert_eq!(g.vertices.len(), 2);
    assert!(g.edges.iter().all(|e| !e.ray));
    assert_eq!(g.edges[0].chain, vec![p(-10.0, 0.0), p(0.0, 0.0), p(10.0, 0.0)]);
    assert!(rel_eq(g.total_area(), area, 1e-12));

    let mut plain = stub_fixture().g;
    let before = plain.edges.clone();
    remove_rays(&mut plain);
    assert_eq!(plain.edges, before);
}

#[test]
fn two_close_t_junctions_merge_into_a_crossing() {
    let mut g = Builder::new(&[(0.0, 0.0), (2.0, 0.0), (0.0, -20.0), (-20.0, 0.0), (2.0, 20.0), (22.0, 0.0)])
        .edge(0, 1)
        .edge(0, 2)
        .edge(0, 3)
        .edge(1, 4)
        .edge(1, 5)
        .g;
    let area = g.total_area();
    let mut far = g.clone();
    assert_eq!(merge_close_vertices(&mut far, 1.5), 0);
    assert_eq!(merge_close_vertices(&mut g, 5.0), 1);
    assert_eq!(g.edges.len(), 4);
    assert_eq!(g.degrees().iter().filter(|&&d| d == 4).count(), 1);
    assert!(rel_eq(g.total_area(), area, 1e-12));
    // every edge still starts or ends on the merged vertex
    let hub = g.degrees().iter().position(|&d| d == 4).unwrap();
    for e in &g.edges {
        let first = if e.from == hub { e.chain[0] } else { *e.chain.last().unwrap() };
        assert_eq!(first, g.vertices[hub].position);
    }
}

#[test]
fn split_divides_polygon_area() {
    let mut g = Builder::new(&[(0.0, 0.0), (10.0, 0.0)]).g;
    let (a, b) = (p(0.0, 0.0), p(10.0, 0.0));
    let atoms = [clockwise([a, b, p(5.0, -4.0)]), clockwise([b, a, p(5.0, 4.0)])];
    g.atoms.extend(atoms);
    g.edges.push(TopoEdge {
        from: 0,
        to: 1,
        chain: vec![a, b],
        ray: false,
        halves: [
            HalfPoly { atoms: vec![AtomRef { atom: 0, anchor: a.midpoint(b) }] },
            HalfPoly { atoms: vec![AtomRef { atom: 1, anchor: a.midpoint(b) }] },
        ],
        clearance: 4.0,
    });
    let area = g.total_area();
    let v = g.split_edge(0, 0, p(3.0, 0.0)).unwrap();
    assert_eq!(g.vertex_kind(v), VertexKind::Passage);
    assert_eq!(g.edges.len(), 2);
    assert!(rel_eq(g.edge_area(0) + g.edge_area(1), area, 1e-12));
    // each child triangle pair spans its own share of the base
    assert!(rel_eq(g.edge_area(0), area * 0.3, 1e-12));
    assert!(g.split_edge(0, 0, p(0.0, 0.0)).is_err());
}

// ---- diagrams built from obstacle points ----

fn two_rows(len: usize, gap: f64) -> Vec<Point> {
    (0..=len).flat_map(|x| [p(x as f64, 0.0), p(x as f64, gap)]).collect()
}

#[test]
fn corridor_centerline_joins_into_one_edge() {
    let sites = two_rows(40, 10.0);
    let vd = compute_voronoi(&sites).unwrap();
    let boundary = Polygon::new(vec![p(5.0, -1.0), p(5.0, 11.0), p(35.0, 11.0), p(35.0, -1.0)]);
    let pv = filter_low_clearance(remove_outside(&vd, &boundary).unwrap(), 2.5).unwrap();
    let g = join_halfedge_polys(&pv);
    let non_ray: Vec<&TopoEdge> = g.edges.iter().filter(|e| !e.ray).collect();
    assert_eq!(non_ray.len(), 1);
    assert_eq!(g.degrees().iter().filter(|&&d| d == 1).count(), 2);
    assert!(g.edges.iter().all(|e| !e.ray));

    // oracle: stitched polygons of the constituent Voronoi edges
    let oracle: f64 = pv
        .kept_edges()
        .map(|e| EdgePolygon::from_chain(&vd, &[2 * e]).unwrap().polygon.area())
        .sum();
    assert!(rel_eq(g.total_area(), oracle, 1e-6));
    let len = non_ray[0].length_px();
    assert!(rel_eq(g.total_area(), 5.0 * len, 1e-9));
    // cells of single-row walls are open strips, so the triangles only touch
    // at the centerline vertices
    let rings: f64 = g.edge_polygon(0).iter().map(|r| r.area()).sum();
    assert!(rel_eq(rings, g.total_area(), 1e-9));
}

#[test]
fn outside_vertices_are_removed() {
    let sites = two_rows(20, 6.0);
    let vd = compute_voronoi(&sites).unwrap();
    let everything = Polygon::new(vec![p(-100.0, -100.0), p(-100.0, 100.0), p(100.0, 100.0), p(100.0, -100.0)]);
    let pv = remove_outside(&vd, &everything).unwrap();
    assert!(pv.status.iter().all(|s| *s == EdgeStatus::Kept));

    let left_half = Polygon::new(vec![p(-1.0, -1.0), p(-1.0, 7.0), p(10.0, 7.0), p(10.0, -1.0)]);
    let pv = remove_outside(&vd, &left_half).unwrap();
    for e in 0..vd.edge_count() {
        let (a, b) = vd.edge_vertices(e);
        let outside = !left_half.contains(vd.vertices[a]) || b.is_some_and(|b| !left_half.contains(vd.vertices[b]));
        assert_eq!(pv.status[e] == EdgeStatus::Outside, outside, "edge {e}");
    }
    let flat = Polygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]);
    assert!(remove_outside(&vd, &flat).is_err());
}

#[test]
fn clearance_equal_to_width_leaves_nothing() {
    let sites = two_rows(30, 8.0);
    let vd = compute_voronoi(&sites).unwrap();
    let boundary = Polygon::new(vec![p(2.0, -1.0), p(2.0, 9.0), p(28.0, 9.0), p(28.0, -1.0)]);
    let pv = remove_outside(&vd, &boundary).unwrap();
    assert!(filter_low_clearance(pv.clone(), 2.0).is_ok());
    assert!(matches!(filter_low_clearance(pv, 8.0), Err(Error::NoTraversableSpace)));
}

/// Cell centers of a `w`×`h` grid where `wall(x, y)` is occupied.
fn grid(w: usize, h: usize, wall: impl Fn(usize, usize) -> bool) -> Vec<Point> {
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if wall(x, y) {
                out.push(p(x as f64 + 0.5, y as f64 + 0.5));
            }
        }
    }
    out
}

fn frame(w: usize, h: usize, x: usize, y: usize) -> bool {
    x < 2 || y < 2 || x >= w - 2 || y >= h - 2
}

fn l_corridor() -> Vec<Point> {
    // 40x40 box with a 28x28 block removed from the bottom-right corner
    grid(40, 40, |x, y| frame(40, 40, x, y) || (x >= 10 && y >= 10))
}

fn t_corridor() -> Vec<Point> {
    // horizontal bar on top, vertical stem in the middle, all 8 px wide
    grid(60, 50, |x, y| {
        let bar = (2..10).contains(&y) && (2..58).contains(&x);
        let stem = (2..48).contains(&y) && (26..34).contains(&x);
        !(bar || stem)
    })
}

struct Pruned {
    sites: Vec<Point>,
    g: TopologyGraph,
    min_clearance: f64,
}

fn prune_sites(sites: Vec<Point>, min_clearance: f64, deadend: f64, merge: f64) -> Pruned {
    let shapes = compute_alpha_shapes(&sites, 4.0).unwrap();
    let vd = compute_voronoi(&sites).unwrap();
    let pv = filter_low_clearance(remove_outside(&vd, shapes.boundary()).unwrap(), min_clearance).unwrap();
    let mut g = join_halfedge_polys(&pv);
    for _ in 0..3 {
        remove_deadends(&mut g, deadend);
    }
    keep_biggest_group(&mut g).unwrap();
    remove_rays(&mut g);
    merge_close_vertices(&mut g, merge);
    Pruned { sites, g, min_clearance }
}

fn nearest_site(sites: &[Point], q: Point) -> f64 {
    sites.iter().map(|s| s.dist(q)).fold(f64::INFINITY, f64::min)
}

fn assert_clearance(r: &Pruned) {
    for e in &r.g.edges {
        for w in e.chain.windows(2) {
            for k in 0..=8 {
                let q = w[0].lerp(w[1], k as f64 / 8.0);
                let d = nearest_site(&r.sites, q);
                assert!(d >= r.min_clearance - 1e-9, "point {q:?} at distance {d}");
            }
        }
    }
}

fn assert_v0(g: &TopologyGraph) {
    let deg = g.degrees();
    for v in 0..g.vertices.len() {
        let ray = g.incident(v).iter().any(|i| g.edges[i.edge].ray);
        assert!(deg[v] != 2 || ray || g.edges.len() == 1, "vertex {v} has degree 2");
    }
}

fn assert_disjoint(g: &TopologyGraph, w: usize, h: usize) {
    let rings: Vec<Vec<Polygon>> = (0..g.edges.len()).map(|e| g.edge_polygon(e)).collect();
    for y in 0..h {
        for x in 0..w {
            let q = p(x as f64 + 0.318_7, y as f64 + 0.577_215);
            let owners = rings
                .iter()
                .filter(|rs| rs.iter().filter(|r| r.contains(q)).count() % 2 == 1)
                .count();
            assert!(owners <= 1, "{q:?} lies in {owners} edge polygons");
        }
    }
}

#[test]
fn l_corridor_respects_clearance() {
    let r = prune_sites(l_corridor(), 2.0, 4.0, 2.0);
    assert_clearance(&r);
    assert_v0(&r.g);
    assert_disjoint(&r.g, 40, 40);
}

#[test]
fn t_corridor_prunes_to_three_edges() {
    let r = prune_sites(t_corridor(), 2.0, 6.0, 2.0);
    assert_eq!(r.g.edges.len(), 3, "{}", r.g.to_text(1.0));
    let deg = r.g.degrees();
    assert_eq!(deg.iter().filter(|&&d| d == 3).count(), 1);
    assert_eq!(deg.iter().filter(|&&d| d == 1).count(), 3);
    assert_clearance(&r);
    assert_disjoint(&r.g, 60, 50);
}

#[test]
fn pruning_conserves_area() {
    let sites = t_corridor();
    let shapes = compute_alpha_shapes(&sites, 4.0).unwrap();
    let vd = compute_voronoi(&sites).unwrap();
    let pv = filter_low_clearance(remove_outside(&vd, shapes.boundary()).unwrap(), 2.0).unwrap();
    let mut g = join_halfedge_polys(&pv);
    let joined = g.total_area();
    while remove_deadends(&mut g, 6.0) > 0 {
        assert!(rel_eq(g.total_area(), joined, 1e-6));
    }
    remove_rays(&mut g);
    let before_merge = g.total_area();
    merge_close_vertices(&mut g, 4.0);
    assert!(rel_eq(g.total_area(), before_merge, 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_rooms_keep_invariants(
        walls in prop::collection::vec((4usize..40, 4usize..30, any::<bool>(), 6usize..20), 0..4),
    ) {
        let (w, h) = (44, 34);
        let sites = grid(w, h, |x, y| {
            frame(w, h, x, y)
                || walls.iter().any(|&(wx, wy, vertical, len)| {
                    if vertical {
                        (wx..wx + 2).contains(&x) && (wy..(wy + len).min(h)).contains(&y)
                    } else {
                        (wy..wy + 2).contains(&y) && (wx..(wx + len).min(w)).contains(&x)
                    }
                })
        });
        let shapes = compute_alpha_shapes(&sites, 4.0).unwrap();
        let vd = compute_voronoi(&sites).unwrap();
        let Ok(pv) = filter_low_clearance(remove_outside(&vd, shapes.boundary()).unwrap(), 1.5) else {
            return Ok(());
        };
        let mut g = join_halfedge_polys(&pv);
        let joined = g.total_area();
        for _ in 0..3 {
            remove_deadends(&mut g, 5.0);
            prop_assert!(rel_eq(g.total_area(), joined, 1e-6));
        }
        keep_biggest_group(&mut g).unwrap();
        remove_rays(&mut g);
        let kept = g.total_area();
        merge_close_vertices(&mut g, 3.0);
        prop_assert!(rel_eq(g.total_area(), kept, 1e-6));
        assert_v0(&g);
        assert_disjoint(&g, w, h);
        assert_clearance(&Pruned { sites, g, min_clearance: 1.5 });
    }
}

