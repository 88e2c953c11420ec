//! Geometric substrate: points, polygons, Delaunay/Voronoi structures and
//! alpha shapes.
//!
//! All coordinates are in pixel space with x pointing right and y pointing
//! down. Orientation is always measured with the raw shoelace formula on
//! those coordinates: a ring is *clockwise* when its signed area is
//! negative.

mod alpha;
mod polygon;
mod triangulation;
mod voronoi;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

pub use alpha::{alpha_from_width, compute_alpha_shapes, AlphaComplex, AlphaShapeSet, ShapeKind};
pub use polygon::{
    segment_intersection, segment_polygon_intersection, PolygonIndex, stitch_polygons, trace_rings, Polygon,
};
pub use triangulation::Triangulation;
pub use voronoi::{
    build_half_polygon, compute_voronoi, EdgePolygon, HalfEdge, HalfEdgeId, HalfPolygon,
    VertexId, VoronoiDiagram,
};

/// Tolerance used by the non-exact geometric comparisons, in pixels.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn dist2(self, other: Point) -> f64 {
        let d = self - other;
        d.x * d.x + d.y * d.y
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Bit-exact key, used for hashing shared vertices.
    pub(crate) fn key(self) -> (u64, u64) {
        // normalise -0.0 so that equal coordinates hash equally
        ((self.x + 0.0).to_bits(), (self.y + 0.0).to_bits())
    }

    pub(crate) fn as_robust(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Exact orientation of `c` relative to the directed line `a -> b`.
/// Positive when `a, b, c` has positive shoelace area.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(a.as_robust(), b.as_robust(), c.as_robust())
}

/// Exact in-circle test. Positive when `d` is strictly inside the circle
/// through `a, b, c` given that `a, b, c` has positive orientation.
pub fn incircle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    robust::incircle(a.as_robust(), b.as_robust(), c.as_robust(), d.as_robust())
}

/// Circumcenter of a non-degenerate triangle.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Point {
    let b = b - a;
    let c = c - a;
    let d = 2.0 * b.cross(c);
    let b2 = b.dot(b);
    let c2 = c.dot(c);
    let ux = (c.y * b2 - b.y * c2) / d;
    let uy = (b.x * c2 - c.x * b2) / d;
    Point::new(a.x + ux, a.y + uy)
}

/// Squared distance from `p` to the segment `a b`.
pub fn point_segment_dist2(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist2(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist2(a + ab * t)
}

/// Signed area of the triangle `a b c` (negative when clockwise).
pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a)
}
