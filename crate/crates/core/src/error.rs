use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode image {path}: {message}")]
    Image { path: String, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing resolution: provide a sidecar yaml or --resolution")]
    MissingResolution,

    #[error("empty obstacle set")]
    EmptyObstacleSet,

    #[error("no traversable space")]
    NoTraversableSpace,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("alpha too small: no closed alpha shape")]
    AlphaTooSmall,

    #[error("raster shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("geometry failure: {0}")]
    Geometry(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
