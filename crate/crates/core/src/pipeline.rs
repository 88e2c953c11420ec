//! End-to-end run from an occupancy grid to an Area Graph.
//!
//! The stages up to the pruned Topology Graph do not depend on W, so a
//! [`Prepared`] map can be segmented repeatedly with different disk widths.

use log::info;
use serde::{Deserialize, Serialize};

use crate::area_graph::{cut_edges, detect_rooms, merge_areas, rasterize, AreaGraph, LabelRaster, RoomSet, RoomWidth};
use crate::error::{Error, Result};
use crate::geometry::{alpha_from_width, compute_voronoi, AlphaShapeSet, Polygon, VoronoiDiagram};
use crate::map_io::{extract_obstacle_points, remove_furniture, remove_outliers, GridMap, PointSet, PreprocessParams};
use crate::topology::{
    filter_low_clearance, join_halfedge_polys, keep_biggest_group, merge_close_vertices, remove_deadends,
    remove_outside, remove_rays, PruneParams, TopologyGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub preprocess: PreprocessParams,
    pub prune: PruneParams,
    pub room: RoomWidth,
}

impl PipelineParams {
    pub fn new(preprocess: PreprocessParams, room: RoomWidth) -> Self {
        PipelineParams { preprocess, prune: PruneParams::for_robot(preprocess.robot_width), room }
    }

    pub fn validate(&self) -> Result<()> {
        self.preprocess.validate()?;
        self.prune.validate()?;
        self.room.width()?;
        Ok(())
    }
}

/// Everything up to and including the pruned Topology Graph.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub points: PointSet,
    pub voronoi: VoronoiDiagram,
    pub boundary: Polygon,
    pub topology: TopologyGraph,
    pub prune: PruneParams,
}

/// Result of segmenting a prepared map with one W.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub w: f64,
    pub rooms: RoomSet,
    pub topology: TopologyGraph,
    pub graph: AreaGraph,
}

pub fn prepare(map: &GridMap, preprocess: &PreprocessParams, prune: &PruneParams) -> Result<Prepared> {
    preprocess.validate()?;
    prune.validate()?;
    let res = map.resolution();
    let raw = extract_obstacle_points(map)?;
    let points = remove_outliers(&raw, preprocess.noise_percent)?;
    let points = remove_furniture(&points, preprocess.robot_width, res)?;
    info!("{} obstacle points ({} before preprocessing)", points.len(), raw.len());

    let voronoi = compute_voronoi(&points.points)?;
    let robot_alpha = alpha_from_width(preprocess.robot_width, res)?;
    let boundary = match AlphaShapeSet::from_triangulation(&voronoi.triangulation, robot_alpha) {
        Ok(set) => set.boundary().clone(),
        Err(Error::AlphaTooSmall) => return Err(Error::NoTraversableSpace),
        Err(e) => return Err(e),
    };

    let pv = remove_outside(&voronoi, &boundary)?;
    let pv = filter_low_clearance(pv, prune.min_clearance / res)?;
    let mut topology = join_halfedge_polys(&pv);
    for _ in 0..prune.deadend_passes {
        remove_deadends(&mut topology, prune.deadend_min_length / res);
    }
    keep_biggest_group(&mut topology)?;
    remove_rays(&mut topology);
    merge_close_vertices(&mut topology, prune.vertex_merge_dist / res);
    if topology.edges.is_empty() {
        return Err(Error::NoTraversableSpace);
    }
    info!("topology graph: {} vertices, {} edges", topology.vertices.len(), topology.edges.len());
    Ok(Prepared {
        width: map.width(),
        height: map.height(),
        resolution: res,
        points,
        voronoi,
        boundary,
        topology,
        prune: *prune,
    })
}

impl Prepared {
    pub fn segment(&self, w: f64) -> Result<Segmentation> {
        let rooms = detect_rooms(&self.voronoi.triangulation, &self.boundary, w, self.resolution)?;
        let mut topology = self.topology.clone();
        cut_edges(&mut topology, &rooms, self.prune.deadend_min_length / self.resolution)?;
        let graph = merge_areas(&topology, &rooms, w / self.resolution)?;
        info!("W = {w} m: {} rooms, {} areas, {} passages", rooms.len(), graph.areas.len(), graph.passages.len());
        Ok(Segmentation { w, rooms, topology, graph })
    }
}

impl Segmentation {
    pub fn labels(&self, map: &GridMap) -> LabelRaster {
        rasterize(&self.graph, map)
    }
}

/// Runs every stage with the given parameters.
pub fn run(map: &GridMap, params: &PipelineParams) -> Result<(Prepared, Segmentation)> {
    params.validate()?;
    let prepared = prepare(map, &params.preprocess, &params.prune)?;
    let seg = prepared.segment(params.room.width()?)?;
    Ok((prepared, seg))
}
