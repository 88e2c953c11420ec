//! Occupancy grid loading, obstacle extraction and point-set preprocessing.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{alpha_from_width, AlphaComplex, Point, Triangulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupancy {
    Occupied,
    Free,
    Unknown,
}

/// Intensity cutoffs: `< occupied_below` is occupied, `> free_above` is free,
/// anything in between is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub occupied_below: u8,
    pub free_above: u8,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { occupied_below: 100, free_above: 250 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<u8>,
    thresholds: Thresholds,
}

impl GridMap {
    pub fn new(width: usize, height: usize, resolution: f64, cells: Vec<u8>) -> Result<Self> {
        Self::with_thresholds(width, height, resolution, cells, Thresholds::default())
    }

    pub fn with_thresholds(
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<u8>,
        thresholds: Thresholds,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("map must have positive dimensions".into()));
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidInput(format!("resolution must be positive, got {resolution}")));
        }
        if cells.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        if thresholds.occupied_below > thresholds.free_above {
            return Err(Error::InvalidInput("occupied threshold above free threshold".into()));
        }
        Ok(GridMap { width, height, resolution, cells, thresholds })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds
    }

    pub fn set_thresholds(&mut self, thresholds: Thresholds) {
        self.thresholds = thresholds;
    }

    pub fn intensity(&self, x: usize, y: usize) -> u8 {
        self.cells[y * self.width + x]
    }

    pub fn occupancy(&self, x: usize, y: usize) -> Occupancy {
        let v = self.intensity(x, y);
        if v < self.thresholds.occupied_below {
            Occupancy::Occupied
        } else if v > self.thresholds.free_above {
            Occupancy::Free
        } else {
            Occupancy::Unknown
        }
    }

    pub fn count(&self, kind: Occupancy) -> usize {
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .filter(|&(x, y)| self.occupancy(x, y) == kind)
            .count()
    }
}

#[derive(Debug, Deserialize)]
struct Sidecar {
    resolution: f64,
}

/// Loads a PGM or grayscale PNG. The resolution comes from `resolution`
/// when given, otherwise from a `resolution:` entry in a `.yaml` file next
/// to the image.
pub fn load_map(path: &Path, resolution: Option<f64>) -> Result<GridMap> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let resolution = match resolution {
        Some(r) => r,
        None => read_sidecar(path)?,
    };
    decode_map(&bytes, &path.display().to_string(), resolution)
}

fn read_sidecar(path: &Path) -> Result<f64> {
    let yaml = path.with_extension("yaml");
    let text = std::fs::read_to_string(&yaml).map_err(|_| Error::MissingResolution)?;
    let meta: Sidecar = serde_yaml::from_str(&text).map_err(|e| {
        Error::InvalidInput(format!("{}: {e}", yaml.display()))
    })?;
    Ok(meta.resolution)
}

/// Decodes an in-memory grayscale raster.
pub fn decode_map(bytes: &[u8], name: &str, resolution: f64) -> Result<GridMap> {
    let img = image::ImageReader::new(std::io::Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::Image { path: name.into(), message: e.to_string() })?
        .decode()
        .map_err(|e| Error::Image { path: name.into(), message: e.to_string() })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let cells = match img {
        image::DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        image::DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(|v| (v >> 8) as u8).collect(),
        other => {
            return Err(Error::Image {
                path: name.into(),
                message: format!("expected a grayscale image, got {:?}", other.color()),
            })
        }
    };
    GridMap::new(w, h, resolution, cells)
}

/// Obstacle sites: one per occupied cell, at the cell centre.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    pub points: Vec<Point>,
}

impl PointSet {
    /// Builds a set from arbitrary points, dropping exact duplicates while
    /// keeping first-occurrence order.
    pub fn from_points(points: Vec<Point>) -> Self {
        let mut seen = std::collections::HashSet::new();
        let points = points.into_iter().filter(|p| seen.insert(p.key())).collect();
        PointSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn extract_obstacle_points(map: &GridMap) -> Result<PointSet> {
    let mut points = Vec::new();
    for y in 0..map.height() {
        for x in 0..map.width() {
            if map.occupancy(x, y) == Occupancy::Occupied {
                points.push(Point::new(x as f64 + 0.5, y as f64 + 0.5));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyObstacleSet);
    }
    Ok(PointSet { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessParams {
    pub noise_percent: f64,
    /// Robot width in meters.
    pub robot_width: f64,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        PreprocessParams { noise_percent: 0.01, robot_width: 0.4 }
    }
}

impl PreprocessParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.noise_percent) {
            return Err(Error::InvalidInput(format!(
                "noise_percent must be in [0, 1), got {}",
                self.noise_percent
            )));
        }
        if !(self.robot_width > 0.0) {
            return Err(Error::InvalidInput("robot_width must be positive".into()));
        }
        Ok(())
    }
}

const OUTLIER_NEIGHBORS: usize = 8;

/// Removes the `ceil(noise_percent * N)` points whose mean distance to their
/// 8 nearest neighbours is largest. Ties go to the earlier point.
pub fn remove_outliers(points: &PointSet, noise_percent: f64) -> Result<PointSet> {
    if !(0.0..1.0).contains(&noise_percent) {
        return Err(Error::InvalidInput(format!(
            "noise_percent must be in [0, 1), got {noise_percent}"
        )));
    }
    if points.is_empty() {
        return Err(Error::EmptyObstacleSet);
    }
    let n = points.len();
    let remove = (noise_percent * n as f64).ceil() as usize;
    if remove == 0 {
        return Ok(points.clone());
    }
    let scores = knn_mean_distances(&points.points, OUTLIER_NEIGHBORS);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut keep = vec![true; n];
    for &i in order.iter().take(remove.min(n)) {
        keep[i] = false;
    }
    Ok(PointSet {
        points: points.points.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect(),
    })
}

/// Mean distance from each point to its `k` nearest other points, using a
/// uniform bucket grid with expanding ring search.
pub(crate) fn knn_mean_distances(points: &[Point], k: usize) -> Vec<f64> {
    let n = points.len();
    let k = k.min(n.saturating_sub(1));
    if k == 0 {
        return vec![0.0; n];
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let extent = ((hi.x - lo.x) * (hi.y - lo.y)).max(1e-12);
    let cell = (extent / n as f64).sqrt().max(1e-9) * 2.0;
    let key = |p: Point| (((p.x - lo.x) / cell) as i64, ((p.y - lo.y) / cell) as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    let max_ring = (((hi.x - lo.x).max(hi.y - lo.y)) / cell) as i64 + 2;

    points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let (cx, cy) = key(p);
            let mut best: Vec<f64> = Vec::with_capacity(k + 1);
            for r in 0..=max_ring {
                for gx in (cx - r)..=(cx + r) {
                    for gy in (cy - r)..=(cy + r) {
                        if (gx - cx).abs() != r && (gy - cy).abs() != r {
                            continue;
                        }
                        if let Some(bucket) = grid.get(&(gx, gy)) {
                            for &j in bucket {
                                if j != i {
                                    insert_sorted(&mut best, p.dist(points[j]), k);
                                }
                            }
                        }
                    }
                }
                // every unvisited point is at least r * cell away
                if best.len() == k && best[k - 1] <= r as f64 * cell {
                    break;
                }
            }
            best.iter().sum::<f64>() / k as f64
        })
        .collect()
}

fn insert_sorted(best: &mut Vec<f64>, d: f64, k: usize) {
    if best.len() == k && d >= best[k - 1] {
        return;
    }
    let pos = best.partition_point(|&x| x <= d);
    best.insert(pos, d);
    best.truncate(k);
}

/// Deletes small obstacle components ("furniture").
///
/// Components are connected under the alpha complex with the disk diameter
/// equal to the robot width. A component is removed when the area covered by
/// its complex triangles is below `(robot_width / resolution)²` and it is not
/// the largest component, which carries the map boundary.
pub fn remove_furniture(points: &PointSet, robot_width: f64, resolution: f64) -> Result<PointSet> {
    if points.is_empty() {
        return Err(Error::EmptyObstacleSet);
    }
    let alpha = alpha_from_width(robot_width, resolution)?;
    let tr = match Triangulation::new(&points.points) {
        Ok(tr) => tr,
        Err(e) => {
            log::warn!("furniture removal skipped: {e}");
            return Ok(points.clone());
        }
    };
    let complex = AlphaComplex::new(&tr, alpha);
    let (comp, area) = complex.point_components();
    let biggest = (0..area.len())
        .max_by(|&a, &b| area[a].total_cmp(&area[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    let limit = (robot_width / resolution).powi(2);
    let kept: Vec<Point> = points
        .points
        .iter()
        .zip(&comp)
        .filter(|(_, &c)| c == biggest || area[c] >= limit)
        .map(|(p, _)| *p)
        .collect();
    Ok(PointSet { points: kept })
}
