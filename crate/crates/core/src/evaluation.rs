//! Matthews correlation coefficient scoring and the W sweep.
//!
//! Protocol: every ground-truth segment is matched to at most one predicted
//! segment, greedily by overlap (largest first, ties by smaller GT label and
//! then smaller predicted label). Each GT segment is scored one-vs-rest over
//! the non-background GT pixels and the scores are averaged weighted by GT
//! segment size.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use image::{DynamicImage, ImageReader};
use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::area_graph::LabelRaster;
use crate::error::{Error, Result};
use crate::map_io::GridMap;
use crate::pipeline::Prepared;

/// Identifies the scoring protocol in reports.
pub const MCC_PROTOCOL: &str = "one-vs-rest/greedy-max-overlap/size-weighted/v1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// MCC of binary counts, and whether the denominator vanished (score 0).
pub fn mcc_from_counts(c: ConfusionCounts) -> (f64, bool) {
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if den == 0.0 {
        return (0.0, true);
    }
    let mcc = (tp * tn - fp * fn_) / den.sqrt();
    (mcc.clamp(-1.0, 1.0), false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentScore {
    pub gt_label: u32,
    pub predicted: Option<u32>,
    pub pixels: u64,
    pub counts: ConfusionCounts,
    pub mcc: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub protocol: &'static str,
    pub mean_mcc: f64,
    pub evaluated_pixels: u64,
    pub segments: Vec<SegmentScore>,
}

/// Scores `seg` against `gt`. Pixels with GT label 0 are ignored; predicted
/// label 0 means "no segment" and never matches.
pub fn score_segmentation(seg: &LabelRaster, gt: &LabelRaster) -> Result<ScoreReport> {
    if seg.width != gt.width || seg.height != gt.height {
        return Err(Error::ShapeMismatch(seg.width, seg.height, gt.width, gt.height));
    }
    let mut gt_size: BTreeMap<u32, u64> = BTreeMap::new();
    let mut pred_size: HashMap<u32, u64> = HashMap::new();
    let mut overlap: HashMap<(u32, u32), u64> = HashMap::new();
    let mut n = 0u64;
    for (&g, &p) in gt.labels.iter().zip(&seg.labels) {
        if g == 0 {
            continue;
        }
        n += 1;
        *gt_size.entry(g).or_default() += 1;
        if p != 0 {
            *pred_size.entry(p).or_default() += 1;
            *overlap.entry((g, p)).or_default() += 1;
        }
    }

    let mut pairs: Vec<((u32, u32), u64)> = overlap.iter().map(|(&k, &v)| (k, v)).collect();
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut matched: HashMap<u32, u32> = HashMap::new();
    let mut used: HashSet<u32> = HashSet::new();
    for ((g, p), _) in pairs {
        if matched.contains_key(&g) || used.contains(&p) {
            continue;
        }
        matched.insert(g, p);
        used.insert(p);
    }

    let mut segments = Vec::with_capacity(gt_size.len());
    let mut weighted = 0.0;
    for (&g, &size) in &gt_size {
        let predicted = matched.get(&g).copied();
        let (tp, psize) = match predicted {
            Some(p) => (overlap[&(g, p)], pred_size[&p]),
            None => (0, 0),
        };
        let counts = ConfusionCounts { tp, fp: psize - tp, fn_: size - tp, tn: n - size - (psize - tp) };
        let (mcc, degenerate) = mcc_from_counts(counts);
        weighted += mcc * size as f64;
        segments.push(SegmentScore { gt_label: g, predicted, pixels: size, counts, mcc, degenerate });
    }
    let mean_mcc = if n == 0 { 0.0 } else { weighted / n as f64 };
    Ok(ScoreReport { protocol: MCC_PROTOCOL, mean_mcc, evaluated_pixels: n, segments })
}

/// Reads a label image. 16-bit grayscale images are taken as raw labels;
/// anything else is read as RGB where every distinct color other than
/// `background` is one segment, numbered in row-major order of first
/// appearance.
pub fn load_labels(path: &Path, background: [u8; 3]) -> Result<LabelRaster> {
    let name = path.display().to_string();
    let reader = ImageReader::open(path)
        .map_err(|source| Error::Io { path: name.clone(), source })?
        .with_guessed_format()
        .map_err(|source| Error::Io { path: name.clone(), source })?;
    let img = reader.decode().map_err(|e| Error::Image { path: name, message: e.to_string() })?;
    Ok(labels_from_image(&img, background))
}

pub fn labels_from_image(img: &DynamicImage, background: [u8; 3]) -> LabelRaster {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut out = LabelRaster::new(w, h);
    if let DynamicImage::ImageLuma16(buf) = img {
        for (i, p) in buf.pixels().enumerate() {
            out.labels[i] = p.0[0] as u32;
        }
        return out;
    }
    let rgb = img.to_rgb8();
    let mut ids: HashMap<[u8; 3], u32> = HashMap::new();
    for (i, p) in rgb.pixels().enumerate() {
        if p.0 == background {
            continue;
        }
        let next = ids.len() as u32 + 1;
        out.labels[i] = *ids.entry(p.0).or_insert(next);
    }
    out
}

/// Evenly spaced W values from `start` to `end` inclusive.
pub fn w_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || start <= 0.0 || end < start {
        return Err(Error::InvalidInput(format!("bad sweep range [{start}, {end}] step {step}")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub w: f64,
    /// `None` when the pipeline failed for this W.
    pub mcc: Option<f64>,
    pub areas: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub door_width: Option<f64>,
    pub corridor_width: Option<f64>,
}

impl SweepResult {
    /// Sample with the highest score; the smallest W among ties.
    pub fn best(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.mcc.is_some())
            .fold(None, |best: Option<&SweepPoint>, p| match best {
                Some(b) if b.mcc >= p.mcc => Some(b),
                _ => Some(p),
            })
    }

    /// Score of the sample nearest to `w`.
    pub fn mcc_near(&self, w: f64) -> Option<f64> {
        self.points
            .iter()
            .min_by(|a, b| (a.w - w).abs().total_cmp(&(b.w - w).abs()))
            .and_then(|p| p.mcc)
    }

    /// Two columns, `W MCC`, one sample per line; failed samples read `nan`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# W_m MCC\n");
        if let Some(d) = self.door_width {
            s.push_str(&format!("# W_d {d:.4}\n"));
        }
        if let Some(c) = self.corridor_width {
            s.push_str(&format!("# W_c {c:.4}\n"));
        }
        for p in &self.points {
            match p.mcc {
                Some(m) => s.push_str(&format!("{:.4} {:.6}\n", p.w, m)),
                None => s.push_str(&format!("{:.4} nan\n", p.w)),
            }
        }
        s
    }
}

/// Segments `prepared` at every W in `ws` and scores each result.
pub fn sweep_w(
    prepared: &Prepared,
    map: &GridMap,
    gt: &LabelRaster,
    ws: &[f64],
    markers: (Option<f64>, Option<f64>),
) -> Result<SweepResult> {
    if gt.width != map.width() || gt.height != map.height() {
        return Err(Error::ShapeMismatch(map.width(), map.height(), gt.width, gt.height));
    }
    if ws.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidInput("sweep widths must be strictly increasing".into()));
    }
    let points = ws
        .par_iter()
        .map(|&w| {
            let scored = prepared.segment(w).and_then(|s| {
                let report = score_segmentation(&s.labels(map), gt)?;
                Ok((report.mean_mcc, s.graph.areas.len()))
            });
            match scored {
                Ok((mcc, areas)) => SweepPoint { w, mcc: Some(mcc), areas: Some(areas) },
                Err(e) => {
                    warn!("W = {w}: {e}");
                    SweepPoint { w, mcc: None, areas: None }
                }
            }
        })
        .collect();
    Ok(SweepResult { points, door_width: markers.0, corridor_width: markers.1 })
}
