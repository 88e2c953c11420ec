use log::debug;

use super::RoomSet;
use crate::error::{Error, Result};
use crate::geometry::{Point, PolygonIndex};
use crate::topology::{Stage, TopologyGraph, VertexKind};

/// Upper bound on cutting passes before giving up.
pub const MAX_CUT_PASSES: usize = 64;

/// Arc-length offset used to probe either side of a boundary hit.
const PROBE: f64 = 1e-6;

/// Splits every edge where it crosses a room boundary, one crossing per
/// edge and pass, until no edge crosses any room. Crossings closer than
/// `short_deadend_px` to a dead-end tip are ignored, so short dead-ends and
/// the short tips of long ones stay whole. Returns the number of cuts.
pub fn cut_edges(g: &mut TopologyGraph, rooms: &RoomSet, short_deadend_px: f64) -> Result<usize> {
    let index: Vec<PolygonIndex> = rooms.shapes.iter().map(PolygonIndex::new).collect();
    let bboxes: Vec<(Point, Point)> = rooms.shapes.iter().map(|s| s.bbox()).collect();
    let mut cuts = 0;
    for pass in 0.. {
        if pass == MAX_CUT_PASSES {
            let pending: Vec<usize> = (0..g.edges.len())
                .filter(|&e| !g.edges[e].ray && first_crossing(g, e, (0.0, 0.0), rooms, &index, &bboxes).is_some())
                .collect();
            return Err(Error::Geometry(format!(
                "edges {pending:?} still cross room boundaries after {MAX_CUT_PASSES} cutting passes"
            )));
        }
        let deg = g.degrees();
        let mut cut_this_pass = 0;
        for e in 0..g.edges.len() {
            let edge = &g.edges[e];
            if edge.ray {
                continue;
            }
            let tip = |v: usize| if g.kind_with(v, &deg) == VertexKind::DeadEnd { short_deadend_px } else { 0.0 };
            let skip = (tip(edge.from), tip(edge.to));
            if let Some((seg, point)) = first_crossing(g, e, skip, rooms, &index, &bboxes) {
                g.split_edge(e, seg, point)?;
                cut_this_pass += 1;
            }
        }
        cuts += cut_this_pass;
        if cut_this_pass == 0 {
            break;
        }
    }
    g.stage = Stage::Cut;
    debug!("cut {cuts} edges at room boundaries");
    Ok(cuts)
}

/// Earliest point along the chain of `e` where room membership changes,
/// ignoring the first `skip.0` and last `skip.1` px of arc length.
fn first_crossing(
    g: &TopologyGraph,
    e: usize,
    skip: (f64, f64),
    rooms: &RoomSet,
    index: &[PolygonIndex],
    bboxes: &[(Point, Point)],
) -> Option<(usize, Point)> {
    let chain = &g.edges[e].chain;
    let total: f64 = chain.windows(2).map(|w| w[0].dist(w[1])).sum();
    let mut offset = 0.0;
    for (k, w) in chain.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let len = a.dist(b);
        let mut best: Option<(f64, Point)> = None;
        for (r, ix) in index.iter().enumerate() {
            let (lo, hi) = bboxes[r];
            if a.x.max(b.x) < lo.x || a.x.min(b.x) > hi.x || a.y.max(b.y) < lo.y || a.y.min(b.y) > hi.y {
                continue;
            }
            for (t, p) in ix.segment_hits(a, b) {
                let s = offset + t * len;
                if s <= skip.0.max(PROBE) || s >= total - skip.1.max(PROBE) {
                    continue;
                }
                let before = point_at(chain, s - PROBE);
                let after = point_at(chain, s + PROBE);
                if rooms.contains(r, before) == rooms.contains(r, after) {
                    continue;
                }
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, p));
                }
                break;
            }
        }
        if let Some((_, p)) = best {
            return Some((k, p));
        }
        offset += len;
    }
    None
}

fn point_at(chain: &[Point], s: f64) -> Point {
    let mut acc = 0.0;
    for w in chain.windows(2) {
        let len = w[0].dist(w[1]);
        if acc + len >= s && len > 0.0 {
            return w[0].lerp(w[1], (s - acc) / len);
        }
        acc += len;
    }
    *chain.last().expect("chains are never empty")
}
