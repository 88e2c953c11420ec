//! Area Graph extraction from 2D occupancy grid maps.
//!
//! The map's obstacle cells are turned into a Voronoi diagram, pruned into a
//! Topology Graph whose edges carry the polygons of the free space around
//! them, and segmented into areas and passages using α-shape room
//! detection. [`pipeline`] ties the stages together.

pub mod area_graph;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod export;
pub mod geometry;
pub mod map_io;
pub mod pipeline;
pub mod topology;

pub use error::{Error, Result};
