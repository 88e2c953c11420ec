use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation as _};

use super::{circumcenter, orient, Point};
use crate::error::{Error, Result};

struct Site {
    pos: Point2<f64>,
    id: usize,
}

impl HasPosition for Site {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

/// Delaunay triangulation of a site set, flattened into index arrays.
///
/// Every triangle is stored with positive orientation. `neighbors[t][i]` is
/// the triangle across the edge `triangles[t][i] -> triangles[t][(i + 1) % 3]`,
/// or `None` on the convex hull.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub neighbors: Vec<[Option<usize>; 3]>,
}

impl Triangulation {
    pub fn new(points: &[Point]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Degenerate(format!(
                "need at least 3 sites, got {}",
                points.len()
            )));
        }
        let sites = points
            .iter()
            .enumerate()
            .map(|(id, p)| Site {
                pos: Point2::new(p.x, p.y),
                id,
            })
            .collect();
        let dt: DelaunayTriangulation<Site> = DelaunayTriangulation::bulk_load(sites)
            .map_err(|e| Error::Degenerate(format!("triangulation failed: {e:?}")))?;
        if dt.num_vertices() != points.len() {
            return Err(Error::Degenerate("duplicate sites".into()));
        }

        let mut face_index = vec![usize::MAX; dt.num_all_faces()];
        for (i, f) in dt.inner_faces().enumerate() {
            face_index[f.fix().index()] = i;
        }
        let mut triangles = Vec::with_capacity(dt.num_inner_faces());
        let mut neighbors = Vec::with_capacity(dt.num_inner_faces());
        for f in dt.inner_faces() {
            let vs = f.vertices().map(|v| v.data().id);
            let mut tri = vs;
            if orient(points[tri[0]], points[tri[1]], points[tri[2]]) < 0.0 {
                tri.swap(1, 2);
            }
            let mut nb = [None; 3];
            for e in f.adjacent_edges() {
                let a = e.from().data().id;
                let b = e.to().data().id;
                let other = e.rev().face().as_inner().map(|g| face_index[g.fix().index()]);
                for i in 0..3 {
                    let (u, v) = (tri[i], tri[(i + 1) % 3]);
                    if (u == a && v == b) || (u == b && v == a) {
                        nb[i] = other;
                    }
                }
            }
            triangles.push(tri);
            neighbors.push(nb);
        }
        if triangles.is_empty() {
            return Err(Error::Degenerate("all sites are collinear".into()));
        }
        Ok(Triangulation {
            points: points.to_vec(),
            triangles,
            neighbors,
        })
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.points[i])
    }

    pub fn circumcenter(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        circumcenter(a, b, c)
    }

    pub fn circumradius2(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        circumcenter(a, b, c).dist2(a)
    }

    /// Endpoints of edge `i` of triangle `t`.
    pub fn edge(&self, t: usize, i: usize) -> (usize, usize) {
        let tri = self.triangles[t];
        (tri[i], tri[(i + 1) % 3])
    }

    /// The vertex of `t` opposite to its edge `i`.
    pub fn opposite(&self, t: usize, i: usize) -> usize {
        self.triangles[t][(i + 2) % 3]
    }

    /// Index of the edge of `n` that is shared with `t`.
    pub fn shared_edge_index(&self, n: usize, t: usize) -> usize {
        (0..3)
            .find(|&j| self.neighbors[n][j] == Some(t))
            .expect("neighbour relation is symmetric")
    }

    /// Each undirected edge once, as `(triangle, edge index)`.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.triangles.len()).flat_map(move |t| {
            (0..3).filter_map(move |i| match self.neighbors[t][i] {
                Some(n) if n < t => None,
                _ => Some((t, i)),
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_gives_two_positive_triangles() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let tr = Triangulation::new(&pts).unwrap();
        assert_eq!(tr.triangles.len(), 2);
        for t in 0..2 {
            let [a, b, c] = tr.corners(t);
            assert!(orient(a, b, c) > 0.0);
        }
        assert_eq!(tr.undirected_edges().count(), 5);
    }

    #[test]
    fn collinear_sites_are_rejected() {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert!(Triangulation::new(&pts).is_err());
    }
}
