use rayon::prelude::*;

use super::AreaGraph;
use crate::map_io::{GridMap, Occupancy};

/// Per-pixel area ids, row-major; 0 is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRaster {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
}

impl LabelRaster {
    pub fn new(width: usize, height: usize) -> Self {
        LabelRaster { width, height, labels: vec![0; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, label: u32) {
        self.labels[y * self.width + x] = label;
    }

    /// Distinct non-zero labels, ascending.
    pub fn label_set(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.labels.iter().copied().filter(|&l| l != 0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Labels each free pixel with the area whose rings contain its center
/// (even-odd over all rings of the area). When several areas claim a pixel
/// the lowest id wins.
pub fn rasterize(ag: &AreaGraph, map: &GridMap) -> LabelRaster {
    let (w, h) = (map.width(), map.height());
    // per area and row: sorted x crossings of the row's center line
    let crossings: Vec<Vec<Vec<f64>>> = ag
        .areas
        .par_iter()
        .map(|area| {
            let mut rows = vec![Vec::new(); h];
            for ring in &area.rings {
                for (a, b) in ring.edges() {
                    let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
                    let first = (lo - 0.5).ceil().max(0.0) as usize;
                    let mut y = first;
                    while y < h && (y as f64 + 0.5) < hi {
                        let yc = y as f64 + 0.5;
                        if (a.y <= yc) != (b.y <= yc) {
                            rows[y].push(a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x));
                        }
                        y += 1;
                    }
                }
            }
            for r in &mut rows {
                r.sort_by(f64::total_cmp);
            }
            rows
        })
        .collect();

    let mut labels = vec![0u32; w * h];
    labels.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (i, area) in ag.areas.iter().enumerate() {
            let xs = &crossings[i][y];
            for pair in xs.chunks_exact(2) {
                let start = (pair[0] - 0.5).ceil().max(0.0) as usize;
                let mut x = start;
                while x < w && (x as f64 + 0.5) < pair[1] {
                    if row[x] == 0 && map.occupancy(x, y) == Occupancy::Free {
                        row[x] = area.id as u32;
                    }
                    x += 1;
                }
            }
        }
    });
    LabelRaster { width: w, height: h, labels }
}
