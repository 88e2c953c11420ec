//! Room detection, passage cutting and the final Area Graph.

mod cut;
mod merge;
mod raster;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{alpha_from_width, AlphaShapeSet, Point, Polygon, PolygonIndex, Triangulation};

pub use cut::{cut_edges, MAX_CUT_PASSES};
pub use merge::merge_areas;
pub use raster::{rasterize, LabelRaster};

/// How the disk diameter W is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoomWidth {
    Fixed { w: f64 },
    Strategy { door_width: f64, corridor_width: f64 },
}

impl RoomWidth {
    pub fn width(&self) -> Result<f64> {
        match *self {
            RoomWidth::Fixed { w } if w > 0.0 => Ok(w),
            RoomWidth::Fixed { w } => Err(Error::InvalidInput(format!("W must be positive, got {w}"))),
            RoomWidth::Strategy { door_width, corridor_width } => choose_w(door_width, corridor_width),
        }
    }
}

/// Smallest W the strategy may return, in meters.
const MIN_W: f64 = 1e-3;

/// W from the widest door and the narrowest corridor: a little wider than
/// the doors when doors are narrower than corridors, otherwise a little
/// narrower than the corridors. Equal widths take the second branch.
pub fn choose_w(door_width: f64, corridor_width: f64) -> Result<f64> {
    if !(door_width > 0.0) || !(corridor_width > 0.0) {
        return Err(Error::InvalidInput(format!(
            "door and corridor widths must be positive (got {door_width}, {corridor_width})"
        )));
    }
    let w = if door_width < corridor_width { door_width + 0.1 } else { corridor_width - 0.1 };
    Ok(w.max(MIN_W))
}

/// Open α-shapes inside the map boundary, each one a room.
#[derive(Debug, Clone)]
pub struct RoomSet {
    pub width: f64,
    pub alpha: f64,
    pub shapes: Vec<Polygon>,
    index: Vec<PolygonIndex>,
}

impl RoomSet {
    pub fn empty(width: f64, alpha: f64) -> Self {
        RoomSet { width, alpha, shapes: Vec::new(), index: Vec::new() }
    }

    pub fn from_shapes(width: f64, alpha: f64, shapes: Vec<Polygon>) -> Self {
        let index = shapes.iter().map(PolygonIndex::new).collect();
        RoomSet { width, alpha, shapes, index }
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// Index of the room containing `p`, if any.
    pub fn room_at(&self, p: Point) -> Option<usize> {
        self.index.iter().position(|ix| ix.contains(p))
    }

    pub(crate) fn contains(&self, room: usize, p: Point) -> bool {
        self.index[room].contains(p)
    }
}

/// Rooms for disk diameter `w` (meters): every open α-shape whose interior
/// lies inside `boundary`.
pub fn detect_rooms(tr: &Triangulation, boundary: &Polygon, w: f64, resolution: f64) -> Result<RoomSet> {
    let alpha = alpha_from_width(w, resolution)?;
    let set = match AlphaShapeSet::from_triangulation(tr, alpha) {
        Ok(set) => set,
        Err(Error::AlphaTooSmall) => return Ok(RoomSet::empty(w, alpha)),
        Err(e) => return Err(e),
    };
    let inside = PolygonIndex::new(boundary);
    let shapes = (0..set.shapes.len())
        .filter(|&i| set.kinds[i] == crate::geometry::ShapeKind::Open)
        .filter(|&i| set.anchors[i].is_some_and(|a| inside.contains(a)))
        .filter(|&i| set.shapes[i].points != boundary.points)
        .map(|i| set.shapes[i].clone())
        .collect();
    Ok(RoomSet::from_shapes(w, alpha, shapes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaSource {
    RoomMerged,
    CorridorSegment,
    DeadEndSegment,
}

#[derive(Debug, Clone, Serialize)]
pub struct Area {
    /// Label in the rasterized output; starts at 1.
    pub id: usize,
    pub room: Option<usize>,
    pub source: AreaSource,
    /// Clockwise outer rings and counter-clockwise holes.
    pub rings: Vec<Polygon>,
    /// Area in square pixels.
    pub area_px: f64,
    /// Topology Graph edges that make up the area.
    pub edges: Vec<usize>,
    pub passages: Vec<usize>,
}

impl Area {
    /// The largest outer ring.
    pub fn polygon(&self) -> &Polygon {
        self.rings
            .iter()
            .filter(|r| r.is_clockwise())
            .max_by(|a, b| a.area().total_cmp(&b.area()))
            .unwrap_or(&self.rings[0])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Passage {
    /// 1-based, like area ids.
    pub id: usize,
    /// Area ids, smaller first.
    pub areas: (usize, usize),
    pub point: Point,
    /// Shared boundary segments of the two areas that meet at `point`.
    pub segment: Vec<(Point, Point)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AreaGraph {
    pub areas: Vec<Area>,
    pub passages: Vec<Passage>,
}

impl AreaGraph {
    pub fn area(&self, id: usize) -> &Area {
        &self.areas[id - 1]
    }

    pub fn total_area_px(&self) -> f64 {
        self.areas.iter().map(|a| a.area_px).sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.areas.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.areas.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &p in &self.areas[a].passages {
                let (x, y) = self.passages[p - 1].areas;
                for b in [x - 1, y - 1] {
                    if !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

#[cfg(test)]
mod tests;
