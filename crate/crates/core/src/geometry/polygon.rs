use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{orient, Point};
use crate::error::{Error, Result};

/// A closed ring of points. The closing edge from the last point back to the
/// first is implicit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polygon {
    pub points: Vec<Point>,
}

impl Polygon {
    pub fn new(points: Vec<Point>) -> Self {
        Polygon { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    /// Shoelace area on raw coordinates; negative for clockwise rings.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn is_clockwise(&self) -> bool {
        self.signed_area() < 0.0
    }

    pub fn reversed(&self) -> Polygon {
        let mut points = self.points.clone();
        points.reverse();
        Polygon { points }
    }

    pub fn into_clockwise(self) -> Polygon {
        if self.signed_area() > 0.0 {
            self.reversed()
        } else {
            self
        }
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Area centroid. Falls back to the vertex mean for degenerate rings.
    pub fn centroid(&self) -> Point {
        let a = self.signed_area();
        if a.abs() < 1e-12 {
            let n = self.points.len().max(1) as f64;
            let s = self.points.iter().fold(Point::default(), |acc, &p| acc + p);
            return s * (1.0 / n);
        }
        let mut c = Point::default();
        for (p, q) in self.edges() {
            let w = p.cross(q);
            c = c + (p + q) * w;
        }
        c * (1.0 / (6.0 * a))
    }

    /// Even-odd point membership. Points exactly on the boundary may go
    /// either way.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the nearest boundary edge.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| super::point_segment_dist2(p, a, b))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    /// Brute-force simplicity check over all non-adjacent edge pairs.
    pub fn is_simple(&self) -> bool {
        let n = self.points.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            if a == b {
                return false;
            }
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = (self.points[j], self.points[(j + 1) % n]);
                if adjacent {
                    // adjacent edges may only share their common vertex
                    let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    if orient(other_a, shared, other_b) == 0.0
                        && (other_b - shared).dot(other_a - shared) > 0.0
                    {
                        return false;
                    }
                    continue;
                }
                if segments_touch(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Drops vertices lying exactly on the segment between their neighbours.
    pub fn without_collinear(&self) -> Polygon {
        let mut pts = self.points.clone();
        loop {
            let n = pts.len();
            if n <= 3 {
                break;
            }
            let drop = (0..n).find(|&i| {
                let p = pts[(i + n - 1) % n];
                let q = pts[i];
                let r = pts[(i + 1) % n];
                orient(p, q, r) == 0.0 && (p - q).dot(r - q) < 0.0
            });
            match drop {
                Some(i) => {
                    pts.remove(i);
                }
                None => break,
            }
        }
        Polygon { points: pts }
    }
}

/// Horizontal band index over a ring's edges for repeated membership and
/// intersection queries against large polygons.
#[derive(Debug, Clone)]
pub struct PolygonIndex {
    y0: f64,
    band: f64,
    edges: Vec<(Point, Point)>,
    bands: Vec<Vec<u32>>,
}

impl PolygonIndex {
    pub fn new(poly: &Polygon) -> Self {
        let (lo, hi) = poly.bbox();
        let n = ((poly.len() as f64).sqrt().ceil() as usize).max(1);
        let band = ((hi.y - lo.y) / n as f64).max(1e-9);
        let edges: Vec<(Point, Point)> = poly.edges().collect();
        let mut bands = vec![Vec::new(); n];
        for (k, &(a, b)) in edges.iter().enumerate() {
            let i0 = (((a.y.min(b.y) - lo.y) / band) as usize).min(n - 1);
            let i1 = (((a.y.max(b.y) - lo.y) / band) as usize).min(n - 1);
            for slot in &mut bands[i0..=i1] {
                slot.push(k as u32);
            }
        }
        PolygonIndex { y0: lo.y, band, edges, bands }
    }

    fn band_of(&self, y: f64) -> Option<usize> {
        let rel = (y - self.y0) / self.band;
        if rel < 0.0 || rel >= self.bands.len() as f64 + 1.0 {
            return None;
        }
        Some((rel as usize).min(self.bands.len() - 1))
    }

    /// Same answer as [`Polygon::contains`].
    pub fn contains(&self, p: Point) -> bool {
        let Some(i) = self.band_of(p.y) else { return false };
        let mut inside = false;
        for &k in &self.bands[i] {
            let (a, b) = self.edges[k as usize];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Same answer as [`segment_polygon_intersection`], with the parameter
    /// along `a b` of every hit.
    pub fn segment_hits(&self, a: Point, b: Point) -> Vec<(f64, Point)> {
        let clamp = |y: f64| {
            let rel = ((y - self.y0) / self.band).max(0.0);
            (rel as usize).min(self.bands.len() - 1)
        };
        let (ylo, yhi) = (a.y.min(b.y), a.y.max(b.y));
        if yhi < self.y0 || ylo > self.y0 + self.band * (self.bands.len() as f64 + 1.0) {
            return Vec::new();
        }
        let mut seen = std::collections::HashSet::new();
        let mut hits = Vec::new();
        for slot in &self.bands[clamp(ylo)..=clamp(yhi)] {
            for &k in slot {
                if seen.insert(k) {
                    let (c, d) = self.edges[k as usize];
                    if let Some(hit) = segment_intersection(a, b, c, d) {
                        hits.push(hit);
                    }
                }
            }
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        hits.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-12);
        hits
    }
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (o1 == 0.0 && on(a, b, c))
        || (o2 == 0.0 && on(a, b, d))
        || (o3 == 0.0 && on(c, d, a))
        || (o4 == 0.0 && on(c, d, b))
}

/// Intersection of segments `p1 p2` and `q1 q2`. Returns the parameter
/// along `p1 p2` and the point. Collinear overlaps yield `None`.
pub fn segment_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Option<(f64, Point)> {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 * o2 > 0.0 || o3 * o4 > 0.0 || (o1 == 0.0 && o2 == 0.0) {
        return None;
    }
    let r = p2 - p1;
    let s = q2 - q1;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let t = ((q1 - p1).cross(s) / denom).clamp(0.0, 1.0);
    Some((t, p1 + r * t))
}

/// All points where the segment `a b` meets the boundary of `poly`, ordered
/// along the segment. Coincident hits (at shared ring vertices) are reported
/// once.
pub fn segment_polygon_intersection(a: Point, b: Point, poly: &Polygon) -> Vec<Point> {
    let mut hits: Vec<(f64, Point)> = poly
        .edges()
        .filter_map(|(c, d)| segment_intersection(a, b, c, d))
        .collect();
    hits.sort_by(|x, y| x.0.total_cmp(&y.0));
    hits.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-12);
    hits.into_iter().map(|(_, p)| p).collect()
}

/// Chains directed boundary edges into closed rings.
///
/// Edges are expected with the enclosed face on their left. Opposite edge
/// pairs cancel first, so the edges of adjacent pieces can be passed in
/// directly. Where several edges leave one vertex the ring takes the first
/// edge clockwise from the incoming direction, which splits pinched
/// boundaries into separate simple rings. Outer rings come back with
/// positive signed area, hole rings with negative.
pub fn trace_rings(edges: &[(Point, Point)]) -> Vec<Polygon> {
    let mut count: HashMap<((u64, u64), (u64, u64)), i64> = HashMap::new();
    for &(a, b) in edges {
        if a == b {
            continue;
        }
        let fwd = (a.key(), b.key());
        let rev = (b.key(), a.key());
        match count.get_mut(&rev) {
            Some(c) if *c > 0 => *c -= 1,
            _ => *count.entry(fwd).or_insert(0) += 1,
        }
    }
    // keep the input order for determinism
    let mut remaining: Vec<(Point, Point)> = Vec::new();
    for &(a, b) in edges {
        if a == b {
            continue;
        }
        if let Some(c) = count.get_mut(&(a.key(), b.key())) {
            if *c > 0 {
                *c -= 1;
                remaining.push((a, b));
            }
        }
    }

    let mut outgoing: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (i, &(a, _)) in remaining.iter().enumerate() {
        outgoing.entry(a.key()).or_default().push(i);
    }
    let mut used = vec![false; remaining.len()];
    let mut rings = Vec::new();
    for start in 0..remaining.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let origin = remaining[start].0;
        let mut ring = vec![origin];
        let mut cur = start;
        loop {
            let (from, to) = remaining[cur];
            if to.key() == origin.key() {
                break;
            }
            let Some(next) = next_edge(&remaining, &outgoing, &used, from, to) else {
                break;
            };
            used[next] = true;
            ring.push(to);
            cur = next;
        }
        if ring.len() >= 3 {
            rings.push(Polygon::new(ring));
        }
    }
    rings
}

fn next_edge(
    edges: &[(Point, Point)],
    outgoing: &HashMap<(u64, u64), Vec<usize>>,
    used: &[bool],
    from: Point,
    at: Point,
) -> Option<usize> {
    let cands = outgoing.get(&at.key())?;
    let back = from - at;
    let ref_angle = back.y.atan2(back.x);
    cands
        .iter()
        .copied()
        .filter(|&i| !used[i])
        .min_by(|&i, &j| {
            let ang = |k: usize| {
                let d = edges[k].1 - at;
                let mut off = ref_angle - d.y.atan2(d.x);
                while off <= 0.0 {
                    off += TAU;
                }
                while off > TAU {
                    off -= TAU;
                }
                off
            };
            ang(i).total_cmp(&ang(j)).then(i.cmp(&j))
        })
}

/// Merges two polygons that share a boundary chain into one clockwise ring.
/// Both inputs may have either orientation.
pub fn stitch_polygons(a: &Polygon, b: &Polygon) -> Result<Polygon> {
    let a = a.clone().into_clockwise();
    let b = b.clone().into_clockwise();
    // clockwise rings have their interior on the right; flip for tracing
    let mut edges: Vec<(Point, Point)> = a.edges().map(|(p, q)| (q, p)).collect();
    let shared = b.edges().any(|(p, q)| a.edges().any(|(r, s)| r == q && s == p));
    if !shared {
        return Err(Error::Geometry("polygons share no boundary chain".into()));
    }
    edges.extend(b.edges().map(|(p, q)| (q, p)));
    let mut rings = trace_rings(&edges);
    if rings.len() != 1 {
        return Err(Error::Geometry(format!(
            "stitching produced {} rings instead of one",
            rings.len()
        )));
    }
    let ring = rings.pop().unwrap_or_default();
    Ok(ring.reversed().without_collinear())
}
