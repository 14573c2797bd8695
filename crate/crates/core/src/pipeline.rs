//! End-to-end run: ingestion, percentile graphs, clustering, smoothing,
//! breakpoint detection and exports, driven by one [`RunConfig`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::community::{best_louvain, force_bipartition, Partition, MAX_BIPARTITION_COMMUNITIES};
use crate::error::{Error, Result};
use crate::export::{boundaries_geojson, cells_geojson, float_value, to_json_string};
use crate::geo::GeoPoint;
use crate::geometry::{
    build_voronoi, extract_boundaries, partition_boundaries, smooth, smooth_multiscale, ScaleTuple,
    DEFAULT_BBOX_MARGIN, DEFAULT_MAX_SMOOTH_ITERS,
};
use crate::graph::{percentile_graph, percentile_table, PercentileMode, ScaleIndex, SCALES};
use crate::ingest::{
    assign_events, build_graph, filter_min_degree, load_events, ActivityMeasure, EventFormat,
    LocationRegistry,
};
use crate::scalespace::{
    detect_breakpoints, natural_scales, similarity_matrix, user_movements, user_profiles,
    CutConvention, NaturalScale, SeparationOptions, WithinAggregate, DEFAULT_MIN_INTERVAL,
};
use crate::seed::{content_hash, derive_seed};
use crate::synth::{make_grid, GeoBox};

/// Regular seed grid used when no locations file is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min_lat: f64,
    pub min_lon: f64,
    pub max_lat: f64,
    pub max_lon: f64,
    pub spacing_km: f64,
}

impl GridSpec {
    pub fn bbox(&self) -> GeoBox {
        GeoBox {
            min: GeoPoint::new(self.min_lat, self.min_lon),
            max: GeoPoint::new(self.max_lat, self.max_lon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub events_path: Option<PathBuf>,
    /// Inferred from the file extension when absent.
    pub events_format: Option<EventFormat>,
    pub locations_path: Option<PathBuf>,
    pub grid: Option<GridSpec>,
    pub min_users: usize,
    pub activity: ActivityMeasure,
    pub runs: usize,
    pub percentile_mode: PercentileMode,
    pub min_interval: usize,
    pub max_smooth_iters: usize,
    pub rng_seed: Option<u64>,
    pub cut_convention: CutConvention,
    pub within_aggregate: WithinAggregate,
    pub bbox_margin: f64,
    /// Merge every per-scale partition into its best two-group split.
    pub bipartition: bool,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            events_path: None,
            events_format: None,
            locations_path: None,
            grid: None,
            min_users: 5,
            activity: ActivityMeasure::default(),
            runs: 100,
            percentile_mode: PercentileMode::default(),
            min_interval: DEFAULT_MIN_INTERVAL,
            max_smooth_iters: DEFAULT_MAX_SMOOTH_ITERS,
            rng_seed: None,
            cut_convention: CutConvention::default(),
            within_aggregate: WithinAggregate::default(),
            bbox_margin: DEFAULT_BBOX_MARGIN,
            bipartition: false,
            output_dir: PathBuf::from("natscale-out"),
        }
    }
}

impl RunConfig {
    /// Reads a TOML or JSON file, chosen by extension (TOML otherwise).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.events_path.is_none() {
            return bad("events_path is required");
        }
        if self.locations_path.is_some() == self.grid.is_some() {
            return bad("exactly one of locations_path and grid is required");
        }
        if self.rng_seed.is_none() {
            return bad("rng_seed is required");
        }
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.min_interval == 0 || 2 * self.min_interval > SCALES {
            return bad("min_interval must lie in 1..=50");
        }
        if self.max_smooth_iters == 0 {
            return bad("max_smooth_iters must be at least 1");
        }
        if !(0.0..=10.0).contains(&self.bbox_margin) {
            return bad("bbox_margin must lie in [0, 10]");
        }
        if self.events_format.is_none() && EventFormat::from_path(self.events_path.as_deref().unwrap()).is_none() {
            return bad("events_format is required when the extension is not .csv or .jsonl");
        }
        Ok(())
    }

    /// Stable identifier derived from the configuration.
    pub fn run_id(&self) -> String {
        let mut echo = self.clone();
        echo.output_dir = PathBuf::new();
        content_hash(serde_json::to_string(&echo).unwrap_or_default().as_bytes())[..12].to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub run_id: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub rng_seed: Option<u64>,
    pub config: RunConfig,
    pub timings_ms: BTreeMap<String, u128>,
    pub warnings: Vec<String>,
    pub summary: BTreeMap<String, Value>,
    /// Output path relative to the output directory, and its SHA-256.
    pub outputs: BTreeMap<String, String>,
}

pub const MANIFEST: &str = "manifest.json";

/// Everything a successful run computes, kept in memory.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub registry: LocationRegistry,
    pub natural_scales: Vec<NaturalScale>,
    pub breakpoints: Vec<usize>,
    pub smoothed: Vec<Partition>,
    pub tuples: Vec<ScaleTuple>,
    pub profiles: crate::scalespace::ProfileReport,
}

struct Run<'a> {
    config: &'a RunConfig,
    manifest: RunManifest,
    files: Vec<(String, Vec<u8>)>,
}

impl Run<'_> {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self).map_err(|e| e.in_stage(name));
        let ms = start.elapsed().as_millis();
        log::info!("{name}: {ms} ms");
        self.manifest.timings_ms.insert(name.to_string(), ms);
        out
    }

    fn output(&mut self, name: impl Into<String>, body: impl Into<Vec<u8>>) {
        self.files.push((name.into(), body.into()));
    }
}

/// Runs the whole pipeline and writes all outputs plus `manifest.json`
/// into the output directory. On failure the manifest records the failed
/// stage and no other outputs are written.
pub fn run_pipeline(config: &RunConfig) -> Result<RunManifest> {
    run_with_result(config).map(|(m, _)| m)
}

pub fn run_with_result(config: &RunConfig) -> Result<(RunManifest, RunResult)> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    remove_previous_outputs(dir)?;

    let mut run = Run {
        config,
        manifest: RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            run_id: config.run_id(),
            status: "running".into(),
            failed_stage: None,
            error: None,
            rng_seed: config.rng_seed,
            config: config.clone(),
            timings_ms: BTreeMap::new(),
            warnings: Vec::new(),
            summary: BTreeMap::new(),
            outputs: BTreeMap::new(),
        },
        files: Vec::new(),
    };

    match execute(&mut run) {
        Ok(result) => {
            for (name, body) in &run.files {
                let path = dir.join(name);
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                }
                std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                run.manifest.outputs.insert(name.clone(), content_hash(body));
            }
            run.manifest.status = "complete".into();
            write_manifest(dir, &run.manifest)?;
            Ok((run.manifest, result))
        }
        Err(err) => {
            run.manifest.status = "failed".into();
            run.manifest.failed_stage = err.stage().map(str::to_string);
            run.manifest.error = Some(err.to_string());
            write_manifest(dir, &run.manifest)?;
            Err(err)
        }
    }
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let path = dir.join(MANIFEST);
    let body = serde_json::to_value(manifest).map_err(|e| Error::Input(e.to_string()))?;
    std::fs::write(&path, to_json_string(&body)).map_err(|e| Error::io(&path, e))
}

/// Deletes the files listed by a manifest from an earlier run.
fn remove_previous_outputs(dir: &Path) -> Result<()> {
    let path = dir.join(MANIFEST);
    let Ok(text) = std::fs::read_to_string(&path) else {
        return Ok(());
    };
    if let Ok(old) = serde_json::from_str::<RunManifest>(&text) {
        for name in old.outputs.keys() {
            let file = dir.join(name);
            if file.starts_with(dir) && file.is_file() {
                std::fs::remove_file(&file).map_err(|e| Error::io(&file, e))?;
                // drop subdirectories left empty; fails harmlessly otherwise
                if let Some(parent) = file.parent().filter(|p| *p != dir) {
                    let _ = std::fs::remove_dir(parent);
                }
            }
        }
    }
    std::fs::remove_file(&path).map_err(|e| Error::io(&path, e))
}

fn execute(run: &mut Run) -> Result<RunResult> {
    let cfg = run.config;
    let seed = cfg.rng_seed.expect("validated");

    let loaded = run.stage("load_events", |_| {
        let path = cfg.events_path.as_deref().expect("validated");
        let format = cfg
            .events_format
            .or_else(|| EventFormat::from_path(path))
            .expect("validated");
        load_events(path, format)
    })?;
    if loaded.rejections.rejected > 0 {
        run.manifest
            .warnings
            .push(format!("{} malformed event rows skipped", loaded.rejections.rejected));
    }
    let rejections = serde_json::to_value(&loaded.rejections).expect("plain struct");
    run.output("rejections.json", to_json_string(&rejections));

    let registry = run.stage("load_locations", |_| match (&cfg.locations_path, &cfg.grid) {
        (Some(path), _) => LocationRegistry::load(path),
        (None, Some(grid)) => make_grid(grid.bbox(), grid.spacing_km),
        (None, None) => unreachable!("validated"),
    })?;
    let assignments = run.stage("assign_events", |_| assign_events(&loaded.events, &registry))?;
    let graph = run.stage("build_graph", |_| build_graph(&assignments, &registry))?;
    let filtered = run.stage("filter_min_degree", |_| {
        filter_min_degree(&graph, &registry, &assignments, cfg.min_users, cfg.activity)
    })?;
    let assignments = filtered.remap(&assignments);
    let (graph, registry) = (filtered.graph, filtered.registry);
    run.manifest.summary.insert("events".into(), json!(loaded.events.len()));
    run.manifest.summary.insert("locations".into(), json!(filtered.index_map.len()));
    run.manifest.summary.insert("surviving_locations".into(), json!(registry.len()));
    run.manifest.summary.insert("edges".into(), json!(graph.edges().len()));

    let table = run.stage("percentile_table", |_| percentile_table(&graph, cfg.percentile_mode))?;
    run.output("percentiles.csv", table.to_csv());

    let raw: Vec<Partition> = run.stage("louvain", |run| {
        let results: Vec<Result<(Partition, Option<String>)>> = ScaleIndex::all()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|s| {
                let g = percentile_graph(&graph, &table, s);
                let p = best_louvain(&g, cfg.runs, derive_seed(seed, "louvain", s.get() as u64))?;
                if !cfg.bipartition || p.n_communities() < 2 {
                    return Ok((p.with_scale(s), None));
                }
                if p.n_communities() > MAX_BIPARTITION_COMMUNITIES {
                    let w = format!("scale {}: {} communities, bipartition skipped", s.get(), p.n_communities());
                    return Ok((p.with_scale(s), Some(w)));
                }
                Ok((force_bipartition(&g, &p)?.with_scale(s), None))
            })
            .collect();
        let mut out = Vec::with_capacity(SCALES);
        for r in results {
            let (p, warning) = r?;
            run.manifest.warnings.extend(warning);
            out.push(p);
        }
        Ok(out)
    })?;

    let diagram = run.stage("voronoi", |_| build_voronoi(&registry, cfg.bbox_margin))?;

    let smoothed: Vec<Partition> = run.stage("smooth", |run| {
        let results: Vec<_> = raw
            .par_iter()
            .map(|p| smooth(p, &diagram, cfg.max_smooth_iters))
            .collect();
        let mut out = Vec::with_capacity(results.len());
        for (s, r) in results.into_iter().enumerate() {
            if !r.converged {
                run.manifest
                    .warnings
                    .push(format!("scale {}: smoothing did not converge in {} passes", s + 1, r.passes));
            }
            let mut p = r.partition;
            p.source_scale = raw[s].source_scale;
            out.push(p);
        }
        Ok(out)
    })?;
    for (s, p) in smoothed.iter().enumerate() {
        run.output(
            format!("partitions/scale_{:03}.csv", s + 1),
            p.to_csv(|i| registry.get(i).source_id),
        );
    }

    let mut matrix = run.stage("similarity", |_| similarity_matrix(&smoothed))?;
    matrix.weighting = Some(cfg.percentile_mode);
    run.output("similarity.csv", matrix.to_csv());
    run.output("dissimilarity_normalized.csv", matrix.normalized_dissimilarity_csv());

    let opts = SeparationOptions {
        convention: cfg.cut_convention,
        within: cfg.within_aggregate,
    };
    let (breakpoints, scales) = run.stage("breakpoints", |_| {
        let b = detect_breakpoints(&matrix, cfg.min_interval, opts)?;
        let scales = natural_scales(&matrix, &b, &table)?;
        Ok((b, scales))
    })?;
    let sep = breakpoints.separation;
    let natural = json!({
        "breakpoints": breakpoints.breakpoints(),
        "intervals": scales,
        "separation": sep.map_or(Value::Null, |s| float_value(s.value)),
        "convention": opts.convention,
        "within_aggregate": opts.within,
        "weighting": cfg.percentile_mode,
        "search": breakpoints.trace.iter().map(|(b, s)| json!({
            "breakpoints": b,
            "separation": float_value(s.value),
        })).collect::<Vec<_>>(),
    });
    run.output("natural_scales.json", to_json_string(&natural));
    run.manifest.summary.insert("natural_scales".into(), json!(scales.len()));

    let multiscale = run.stage("multiscale", |_| {
        let prototypes: Vec<Partition> = scales.iter().map(|k| raw[k.prototype - 1].clone()).collect();
        Ok(smooth_multiscale(&prototypes, &diagram, cfg.max_smooth_iters))
    })?;
    if !multiscale.converged {
        run.manifest.warnings.push(format!(
            "multiscale smoothing did not converge in {} passes",
            multiscale.passes
        ));
    }

    run.stage("boundaries", |run| {
        let run_id = run.manifest.run_id.clone();
        for (k, scale) in scales.iter().enumerate() {
            let mut segments = partition_boundaries(&smoothed[scale.prototype - 1], &diagram);
            for seg in &mut segments {
                seg.scales = vec![k + 1];
            }
            run.output(
                format!("boundaries_scale_{}.geojson", k + 1),
                to_json_string(&boundaries_geojson(&segments, &run_id)),
            );
        }
        let segments = extract_boundaries(&multiscale.tuples, &diagram);
        run.output(
            "boundaries_multiscale.geojson",
            to_json_string(&boundaries_geojson(&segments, &run_id)),
        );
        let per_scale: Vec<(usize, &Partition)> = scales
            .iter()
            .enumerate()
            .map(|(k, s)| (k + 1, &smoothed[s.prototype - 1]))
            .collect();
        run.output(
            "cells.geojson",
            to_json_string(&cells_geojson(&diagram, &registry, &per_scale, &multiscale.tuples)),
        );
        Ok(())
    })?;

    let profiles = run.stage("user_profiles", |run| {
        let movements = user_movements(&assignments, &registry);
        let report = user_profiles(&movements, &scales)?;
        run.output("user_profiles.csv", report.users_csv()?);
        run.output("user_profile_classes.csv", report.classes_csv()?);
        Ok(report)
    })?;

    Ok(RunResult {
        registry,
        breakpoints: breakpoints.breakpoints().to_vec(),
        natural_scales: scales,
        smoothed,
        tuples: multiscale.tuples,
        profiles,
    })
}
