//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;
use serde_json::{json, Value};

use crate::area_graph::RoomWidth;
use crate::error::{Error, Result};
use crate::evaluation::{load_labels, score_segmentation, sweep_w, w_grid};
use crate::export::{
    area_graph_json, color_image, label_image, sweep_curve, topology_overlay, write_atomic, write_json, write_png,
    Provenance,
};
use crate::map_io::{load_map, GridMap, PreprocessParams};
use crate::pipeline::{prepare, PipelineParams, Prepared};
use crate::topology::{PruneParams, VertexKind};

#[derive(Debug, Parser)]
#[command(name = "areagraph", version, about = "Area Graph extraction from 2D occupancy grid maps")]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the Area Graph of a map and write all artifacts.
    Segment {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        room: RoomArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Score a label image against a ground truth.
    Eval {
        segmentation: PathBuf,
        ground_truth: PathBuf,
        /// Background color of color-coded images, as R,G,B.
        #[arg(long, default_value = "0,0,0", value_parser = parse_rgb)]
        background: [u8; 3],
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score the segmentation over a range of W values.
    Sweep {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value = "0,0,0", value_parser = parse_rgb)]
        background: [u8; 3],
        #[arg(long, default_value_t = 0.5)]
        from: f64,
        #[arg(long, default_value_t = 10.0)]
        to: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Widest door, marked on the curve (m).
        #[arg(long)]
        door_width: Option<f64>,
        /// Narrowest corridor, marked on the curve (m).
        #[arg(long)]
        corridor_width: Option<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print Topology Graph statistics.
    Inspect {
        #[command(flatten)]
        map: MapArgs,
        /// Also write the topology dump and overlay here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct MapArgs {
    /// Occupancy grid (PGM or grayscale PNG).
    map: PathBuf,
    /// Meters per pixel; read from the sidecar .yaml when omitted.
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    noise_percent: f64,
    /// Robot width (m).
    #[arg(long, default_value_t = 0.4)]
    robot_width: f64,
    /// Minimum Voronoi clearance (m); defaults to half the robot width.
    #[arg(long)]
    min_clearance: Option<f64>,
    /// Dead-ends shorter than this are pruned (m).
    #[arg(long)]
    deadend_min_length: Option<f64>,
    /// Junctions closer than this are merged (m).
    #[arg(long)]
    vertex_merge_dist: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = true)]
struct RoomArgs {
    /// Room detection disk width (m).
    #[arg(long = "w", conflicts_with_all = ["door_width", "corridor_width"])]
    w: Option<f64>,
    /// Widest door (m); W is derived together with --corridor-width.
    #[arg(long, requires = "corridor_width")]
    door_width: Option<f64>,
    /// Narrowest corridor (m).
    #[arg(long, requires = "door_width")]
    corridor_width: Option<f64>,
}

impl RoomArgs {
    fn room_width(&self) -> RoomWidth {
        match (self.w, self.door_width, self.corridor_width) {
            (Some(w), _, _) => RoomWidth::Fixed { w },
            (None, Some(door_width), Some(corridor_width)) => RoomWidth::Strategy { door_width, corridor_width },
            _ => unreachable!("clap enforces the argument groups"),
        }
    }
}

/// Parameters echoed into every artifact.
#[derive(Debug, Serialize)]
struct RunConfig {
    input: PathBuf,
    resolution: f64,
    preprocess: PreprocessParams,
    prune: PruneParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    room: Option<RoomWidth>,
}

struct Loaded {
    map: GridMap,
    bytes: Vec<u8>,
    config: RunConfig,
}

impl MapArgs {
    fn load(&self) -> Result<Loaded> {
        let preprocess = PreprocessParams { noise_percent: self.noise_percent, robot_width: self.robot_width };
        let defaults = PruneParams::for_robot(self.robot_width);
        let prune = PruneParams {
            min_clearance: self.min_clearance.unwrap_or(defaults.min_clearance),
            deadend_min_length: self.deadend_min_length.unwrap_or(defaults.deadend_min_length),
            vertex_merge_dist: self.vertex_merge_dist.unwrap_or(defaults.vertex_merge_dist),
            deadend_passes: defaults.deadend_passes,
        };
        preprocess.validate()?;
        prune.validate()?;
        let map = load_map(&self.map, self.resolution)?;
        let bytes = std::fs::read(&self.map).map_err(|source| Error::Io { path: self.map.display().to_string(), source })?;
        let config = RunConfig { input: self.map.clone(), resolution: map.resolution(), preprocess, prune, room: None };
        Ok(Loaded { map, bytes, config })
    }
}

impl Loaded {
    fn prepare(&self) -> Result<Prepared> {
        prepare(&self.map, &self.config.preprocess, &self.config.prune)
    }

    fn provenance(&self) -> Value {
        Provenance::new(&self.config.input, &self.bytes).to_json()
    }

    fn params(&self) -> Value {
        serde_json::to_value(&self.config).expect("config serializes")
    }
}

fn parse_rgb(s: &str) -> std::result::Result<[u8; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected R,G,B, got {s:?}"));
    }
    let mut rgb = [0u8; 3];
    for (c, p) in rgb.iter_mut().zip(parts) {
        *c = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(rgb)
}

/// Prints to stdout, ignoring a closed pipe.
fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })
}

/// Process exit code for a pipeline error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. }
        | Error::Image { .. }
        | Error::InvalidInput(_)
        | Error::MissingResolution
        | Error::ShapeMismatch(..) => 2,
        Error::EmptyObstacleSet => 3,
        Error::NoTraversableSpace => 4,
        Error::Degenerate(_) | Error::AlphaTooSmall | Error::Geometry(_) => 5,
    }
}

fn segment(map: &MapArgs, room: &RoomArgs, out_dir: &Path) -> Result<()> {
    let mut run = map.load()?;
    let room = room.room_width();
    run.config.room = Some(room);
    PipelineParams { preprocess: run.config.preprocess, prune: run.config.prune, room }.validate()?;
    let w = room.width()?;
    let prepared = run.prepare()?;
    let seg = prepared.segment(w)?;
    let labels = seg.labels(&run.map);
    ensure_dir(out_dir)?;
    let doc = area_graph_json(&seg, run.map.resolution(), &run.params(), &run.provenance());
    write_json(&out_dir.join("area_graph.json"), &doc)?;
    write_png(&out_dir.join("labels.png"), &label_image(&labels)?)?;
    write_png(&out_dir.join("areas.png"), &color_image(&labels, &run.map).into())?;
    write_png(&out_dir.join("topology.png"), &topology_overlay(&run.map, &seg.topology, Some(&seg)).into())?;
    write_atomic(&out_dir.join("topology.txt"), seg.topology.to_text(run.map.resolution()).as_bytes())?;
    println!(
        "W = {w:.3} m: {} rooms, {} areas, {} passages",
        seg.rooms.len(),
        seg.graph.areas.len(),
        seg.graph.passages.len()
    );
    Ok(())
}

fn eval(seg: &Path, gt: &Path, background: [u8; 3], out: Option<&Path>) -> Result<()> {
    let seg = load_labels(seg, background)?;
    let gt = load_labels(gt, background)?;
    let report = score_segmentation(&seg, &gt)?;
    let doc = serde_json::to_value(&report).expect("report serializes");
    if let Some(out) = out {
        write_json(out, &doc)?;
    }
    print_json(&doc);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    map: &MapArgs,
    gt: &Path,
    background: [u8; 3],
    range: (f64, f64, f64),
    markers: (Option<f64>, Option<f64>),
    out_dir: &Path,
) -> Result<()> {
    let run = map.load()?;
    let ws = w_grid(range.0, range.1, range.2)?;
    let gt = load_labels(gt, background)?;
    let prepared = run.prepare()?;
    let result = sweep_w(&prepared, &run.map, &gt, &ws, markers)?;
    ensure_dir(out_dir)?;
    write_atomic(&out_dir.join("sweep.txt"), result.to_text().as_bytes())?;
    write_png(&out_dir.join("sweep.png"), &sweep_curve(&result).into())?;
    let best = result.best().cloned();
    let doc = json!({
        "provenance": run.provenance(),
        "params": run.params(),
        "range": { "from": range.0, "to": range.1, "step": range.2 },
        "best": best,
        "series": result,
    });
    write_json(&out_dir.join("sweep.json"), &doc)?;
    match best {
        Some(b) => println!("best W = {:.3} m (MCC {:.4}) over {} samples", b.w, b.mcc.unwrap_or(0.0), ws.len()),
        None => println!("no W produced a segmentation"),
    }
    Ok(())
}

fn inspect(map: &MapArgs, out_dir: Option<&Path>) -> Result<()> {
    let run = map.load()?;
    let prepared = run.prepare()?;
    let g = &prepared.topology;
    let res = run.map.resolution();
    let count = |k: VertexKind| (0..g.vertices.len()).filter(|&v| g.vertex_kind(v) == k).count();
    let stats = json!({
        "size_px": [run.map.width(), run.map.height()],
        "resolution": res,
        "obstacle_points": prepared.points.len(),
        "vertices": g.vertices.len(),
        "dead_ends": count(VertexKind::DeadEnd),
        "junctions": count(VertexKind::Junction),
        "edges": g.edges.len(),
        "length_m": g.total_length_px() * res,
        "area_m2": g.total_area() * res * res,
    });
    print_json(&stats);
    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        write_atomic(&dir.join("topology.txt"), g.to_text(res).as_bytes())?;
        write_png(&dir.join("topology.png"), &topology_overlay(&run.map, g, None).into())?;
    }
    Ok(())
}

/// Parses arguments, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).init();
    let outcome = match &cli.command {
        Command::Segment { map, room, out_dir } => segment(map, room, out_dir),
        Command::Eval { segmentation, ground_truth, background, out } => {
            eval(segmentation, ground_truth, *background, out.as_deref())
        }
        Command::Sweep { map, gt, background, from, to, step, door_width, corridor_width, out_dir } => {
            sweep(map, gt, *background, (*from, *to, *step), (*door_width, *corridor_width), out_dir)
        }
        Command::Inspect { map, out_dir } => inspect(map, out_dir.as_deref()),
    };
    match outcome {
        Ok(()) => {
            info!("done");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("areagraph: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
