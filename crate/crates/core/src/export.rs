//! Output artifacts: JSON report, label and color images, debug overlays.
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::io::{Cursor, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use image::{DynamicImage, ImageBuffer, ImageFormat, Luma, Rgb, RgbImage};
use imageproc::drawing::{draw_filled_circle_mut, draw_hollow_circle_mut, draw_line_segment_mut};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::area_graph::LabelRaster;
use crate::error::{Error, Result};
use crate::evaluation::SweepResult;
use crate::map_io::{GridMap, Occupancy};
use crate::pipeline::Segmentation;
use crate::topology::{TopologyGraph, VertexKind};

/// Name of the field holding the wall-clock time; the only field that
/// differs between two runs on the same input.
pub const TIMESTAMP_FIELD: &str = "generated_at_unix";

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub input: String,
    pub input_sha256: String,
}

impl Provenance {
    pub fn new(input: &Path, bytes: &[u8]) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            input: input.display().to_string(),
            input_sha256: sha256_hex(bytes),
        }
    }

    /// Provenance block with the timestamp, ready for embedding.
    pub fn to_json(&self) -> Value {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut v = serde_json::to_value(self).expect("provenance serializes");
        v[TIMESTAMP_FIELD] = json!(now);
        v
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The Area Graph as JSON. Coordinates are given in pixels and in meters
/// (pixel coordinates times resolution, image frame, y down).
pub fn area_graph_json(seg: &Segmentation, resolution: f64, params: &Value, provenance: &Value) -> Value {
    let m = |v: f64| v * resolution;
    let areas: Vec<Value> = seg
        .graph
        .areas
        .iter()
        .map(|a| {
            let rings: Vec<Value> = a
                .rings
                .iter()
                .map(|r| {
                    let r = r.without_collinear();
                    json!({
                        "hole": !r.is_clockwise(),
                        "px": r.points.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
                        "m": r.points.iter().map(|p| [m(p.x), m(p.y)]).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({
                "id": a.id,
                "roomID": a.room.map(|r| r + 1),
                "source": a.source,
                "area_m2": a.area_px * resolution * resolution,
                "topology_edges": a.edges,
                "passages": a.passages,
                "polygon": rings,
            })
        })
        .collect();
    let passages: Vec<Value> = seg
        .graph
        .passages
        .iter()
        .map(|p| {
            json!({
                "id": p.id,
                "areas": [p.areas.0, p.areas.1],
                "point_px": [p.point.x, p.point.y],
                "point_m": [m(p.point.x), m(p.point.y)],
                "segment_px": p.segment.iter().map(|(a, b)| [[a.x, a.y], [b.x, b.y]]).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "provenance": provenance,
        "params": params,
        "resolution": resolution,
        "w": seg.w,
        "rooms": seg.rooms.len(),
        "areas": areas,
        "passages": passages,
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn write_png(path: &Path, img: &DynamicImage) -> Result<()> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .map_err(|e| Error::Image { path: path.display().to_string(), message: e.to_string() })?;
    write_atomic(path, buf.get_ref())
}

/// 16-bit grayscale image whose values are the area ids.
pub fn label_image(labels: &LabelRaster) -> Result<DynamicImage> {
    let data = labels
        .labels
        .iter()
        .map(|&l| u16::try_from(l).map_err(|_| Error::InvalidInput(format!("label {l} does not fit 16 bits"))))
        .collect::<Result<Vec<u16>>>()?;
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(labels.width as u32, labels.height as u32, data).expect("buffer matches raster size");
    Ok(DynamicImage::ImageLuma16(buf))
}

/// Stable, well-separated color for an area id.
pub fn area_color(id: u32) -> Rgb<u8> {
    let h = (id as f64 * 0.618_033_988_75).fract() * 6.0;
    let (s, v) = (0.55, 0.95);
    let c = v * s;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let to = |u: f64| ((u + v - c) * 255.0).round() as u8;
    Rgb([to(r), to(g), to(b)])
}

fn base_color(map: &GridMap, x: usize, y: usize) -> Rgb<u8> {
    match map.occupancy(x, y) {
        Occupancy::Occupied => Rgb([0, 0, 0]),
        Occupancy::Unknown => Rgb([128, 128, 128]),
        Occupancy::Free => Rgb([255, 255, 255]),
    }
}

/// Areas in their colors over the occupancy map.
pub fn color_image(labels: &LabelRaster, map: &GridMap) -> RgbImage {
    RgbImage::from_fn(labels.width as u32, labels.height as u32, |x, y| {
        let (x, y) = (x as usize, y as usize);
        match labels.get(x, y) {
            0 => base_color(map, x, y),
            l => area_color(l),
        }
    })
}

/// Topology Graph and passages drawn over a faded map.
pub fn topology_overlay(map: &GridMap, topology: &TopologyGraph, seg: Option<&Segmentation>) -> RgbImage {
    let mut img = RgbImage::from_fn(map.width() as u32, map.height() as u32, |x, y| {
        let Rgb([v, _, _]) = base_color(map, x as usize, y as usize);
        let f = 150 + v / 3;
        Rgb([f, f, f])
    });
    let pt = |p: crate::geometry::Point| (p.x as f32, p.y as f32);
    for e in &topology.edges {
        for w in e.chain.windows(2) {
            draw_line_segment_mut(&mut img, pt(w[0]), pt(w[1]), Rgb([30, 70, 200]));
        }
    }
    if let Some(seg) = seg {
        for p in &seg.graph.passages {
            for (a, b) in &p.segment {
                draw_line_segment_mut(&mut img, pt(*a), pt(*b), Rgb([240, 140, 0]));
            }
        }
    }
    let deg = topology.degrees();
    for (v, vert) in topology.vertices.iter().enumerate() {
        let color = match topology.vertex_kind(v) {
            VertexKind::DeadEnd => Rgb([220, 30, 30]),
            VertexKind::Junction => Rgb([130, 30, 160]),
            VertexKind::Passage => Rgb([240, 140, 0]),
            _ => Rgb([0, 150, 0]),
        };
        let c = (vert.position.x.round() as i32, vert.position.y.round() as i32);
        if deg[v] > 0 {
            draw_filled_circle_mut(&mut img, c, 2, color);
        }
    }
    img
}

/// W–MCC curve with vertical markers at the door and corridor widths and a
/// ring around the best sample.
pub fn sweep_curve(sweep: &SweepResult) -> RgbImage {
    let (w, h, margin) = (640u32, 400u32, 40.0f32);
    let mut img = RgbImage::from_pixel(w, h, Rgb([255, 255, 255]));
    let (Some(first), Some(last)) = (sweep.points.first(), sweep.points.last()) else {
        return img;
    };
    let (w0, w1) = (first.w, if last.w > first.w { last.w } else { first.w + 1.0 });
    let lo = sweep.points.iter().filter_map(|p| p.mcc).fold(0.0f64, f64::min);
    let sx = |x: f64| margin + ((x - w0) / (w1 - w0)) as f32 * (w as f32 - 2.0 * margin);
    let sy = |y: f64| h as f32 - margin - ((y - lo) / (1.0 - lo)) as f32 * (h as f32 - 2.0 * margin);
    let axis = Rgb([0, 0, 0]);
    draw_line_segment_mut(&mut img, (margin, sy(lo)), (w as f32 - margin, sy(lo)), axis);
    draw_line_segment_mut(&mut img, (margin, sy(lo)), (margin, sy(1.0)), axis);
    let grid = Rgb([220, 220, 220]);
    draw_line_segment_mut(&mut img, (margin, sy(1.0)), (w as f32 - margin, sy(1.0)), grid);
    if lo < 0.0 {
        draw_line_segment_mut(&mut img, (margin, sy(0.0)), (w as f32 - margin, sy(0.0)), grid);
    }
    let mut tick = w0.ceil();
    while tick <= w1 {
        draw_line_segment_mut(&mut img, (sx(tick), sy(lo)), (sx(tick), sy(lo) + 5.0), axis);
        tick += 1.0;
    }
    for (marker, color) in [(sweep.door_width, Rgb([0, 160, 0])), (sweep.corridor_width, Rgb([200, 0, 0]))] {
        if let Some(m) = marker.filter(|m| (w0..=w1).contains(m)) {
            draw_line_segment_mut(&mut img, (sx(m), sy(lo)), (sx(m), sy(1.0)), color);
        }
    }
    let line = Rgb([30, 70, 200]);
    for pair in sweep.points.windows(2) {
        if let (Some(a), Some(b)) = (pair[0].mcc, pair[1].mcc) {
            draw_line_segment_mut(&mut img, (sx(pair[0].w), sy(a)), (sx(pair[1].w), sy(b)), line);
        }
    }
    for p in &sweep.points {
        if let Some(m) = p.mcc {
            draw_filled_circle_mut(&mut img, (sx(p.w) as i32, sy(m) as i32), 1, line);
        }
    }
    if let Some(best) = sweep.best() {
        let c = (sx(best.w) as i32, sy(best.mcc.unwrap_or(0.0)) as i32);
        draw_hollow_circle_mut(&mut img, c, 6, Rgb([200, 0, 200]));
    }
    img
}
