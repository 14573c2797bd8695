//! Natural movement scales in geotagged traces.
//!
//! The crate turns a set of geotagged observations into a sequence of
//! distance-percentile movement graphs, clusters every graph by modularity
//! maximisation, smooths the clusters over a Voronoi tessellation of the
//! seed locations and then looks for abrupt changes in the resulting
//! sequence of partitions. Intervals of percentiles with mutually similar
//! partitions are reported as natural scales, together with multi-scale
//! boundaries that can be rendered by any GeoJSON-aware tool.
//!
//! The stages are exposed individually:
//!
//! * [`ingest`]: event and seed loading, nearest-seed assignment, the
//!   co-location graph and the low-activity filter.
//! * [`graph`]: percentile thresholds, percentile graphs and modularity.
//! * [`community`]: Louvain, best-of-N selection and forced bipartitions.
//! * [`geometry`]: Voronoi cells, majority smoothing and boundaries.
//! * [`scalespace`]: partition similarity, breakpoints, prototypes and
//!   per-user scale profiles.
//! * [`pipeline`] and [`synth`]: orchestration, exports and synthetic data.

pub mod community;
pub mod error;
pub mod export;
pub mod geo;
pub mod geometry;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod scalespace;
pub mod seed;
pub mod synth;

pub use community::{best_louvain, force_bipartition, louvain, Partition};
pub use error::{Error, ErrorKind, Result};
pub use geo::{haversine_km, GeoPoint, EARTH_RADIUS_KM};
pub use geometry::{build_voronoi, extract_boundaries, smooth, smooth_multiscale, VoronoiDiagram};
pub use graph::{
    modularity, percentile_graph, percentile_table, Edge, PercentileMode, PercentileTable,
    ScaleIndex, WeightedGraph,
};
pub use ingest::{
    assign_events, build_graph, filter_min_degree, load_events, Assignment, EventFormat,
    LocationRegistry, MovementEvent,
};
pub use pipeline::{run_pipeline, RunConfig, RunManifest};
pub use scalespace::{
    detect_breakpoints, interval_separation, prototypical_scale, rand_similarity,
    similarity_matrix, BreakpointSet, NaturalScale, SimilarityMatrix,
};
pub use synth::{generate_synthetic, make_grid, SyntheticSpec};
