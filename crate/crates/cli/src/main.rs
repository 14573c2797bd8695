use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use natscale::ingest::{ActivityMeasure, EventFormat};
use natscale::pipeline::GridSpec;
use natscale::scalespace::{CutConvention, WithinAggregate};
use natscale::synth::{GeoBox, Level};
use natscale::{generate_synthetic, make_grid, run_pipeline, Error, ErrorKind, GeoPoint, PercentileMode};
use natscale::{RunConfig, SyntheticSpec};

#[derive(Debug, Parser)]
#[command(name = "natscale", version, about = "Natural movement scales from geotagged traces")]
struct Cli {
    /// Log stage progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline and write all outputs.
    Run(RunArgs),
    /// Generate a synthetic data set with planted scales.
    Synth(SynthArgs),
    /// Write a regular grid of seed locations.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML or JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long, value_parser = parse_event_format)]
    events_format: Option<EventFormat>,
    #[arg(long, conflicts_with = "grid")]
    locations: Option<PathBuf>,
    /// `min_lat,min_lon,max_lat,max_lon,spacing_km`
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    #[arg(long)]
    min_users: Option<usize>,
    #[arg(long, value_parser = parse_activity)]
    activity: Option<ActivityMeasure>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_parser = parse_percentile_mode)]
    percentile_mode: Option<PercentileMode>,
    #[arg(long)]
    min_interval: Option<usize>,
    #[arg(long)]
    max_smooth_iters: Option<usize>,
    #[arg(long, value_parser = parse_convention)]
    cut_convention: Option<CutConvention>,
    #[arg(long, value_parser = parse_within)]
    within_aggregate: Option<WithinAggregate>,
    #[arg(long)]
    bbox_margin: Option<f64>,
    #[arg(long)]
    bipartition: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// TOML or JSON synthetic specification.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    /// `radius_km:clusters`, smallest radius first; repeat per level.
    #[arg(long = "level", value_parser = parse_level)]
    levels: Vec<Level>,
    /// Comma-separated probabilities, one per level.
    #[arg(long, value_delimiter = ',')]
    mixing: Vec<f64>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    movements_per_user: Option<usize>,
    #[arg(long)]
    locations: Option<usize>,
    /// `lat,lon`
    #[arg(long, value_parser = parse_point)]
    center: Option<GeoPoint>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// TOML or JSON file with a grid specification.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `min_lat,min_lon,max_lat,max_lon,spacing_km`
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    #[arg(long, short)]
    output: PathBuf,
}

fn floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers"));
    }
    Ok(v)
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let v = floats(s, 5)?;
    Ok(GridSpec {
        min_lat: v[0],
        min_lon: v[1],
        max_lat: v[2],
        max_lon: v[3],
        spacing_km: v[4],
    })
}

fn parse_point(s: &str) -> Result<GeoPoint, String> {
    let v = floats(s, 2)?;
    Ok(GeoPoint::new(v[0], v[1]))
}

fn parse_level(s: &str) -> Result<Level, String> {
    let (r, c) = s.split_once(':').ok_or("expected radius_km:clusters")?;
    Ok(Level {
        radius_km: r.parse().map_err(|e| format!("radius: {e}"))?,
        clusters: c.parse().map_err(|e| format!("clusters: {e}"))?,
    })
}

fn parse_event_format(s: &str) -> Result<EventFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_percentile_mode(s: &str) -> Result<PercentileMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_activity(s: &str) -> Result<ActivityMeasure, String> {
    match s {
        "distinct_users" => Ok(ActivityMeasure::DistinctUsers),
        "graph_degree" => Ok(ActivityMeasure::GraphDegree),
        _ => Err("expected distinct_users or graph_degree".into()),
    }
}

fn parse_convention(s: &str) -> Result<CutConvention, String> {
    match s {
        "cross_cut" => Ok(CutConvention::CrossCut),
        "literal" => Ok(CutConvention::Literal),
        _ => Err("expected cross_cut or literal".into()),
    }
}

fn parse_within(s: &str) -> Result<WithinAggregate, String> {
    match s {
        "mean" => Ok(WithinAggregate::Mean),
        "sum" => Ok(WithinAggregate::Sum),
        _ => Err("expected mean or sum".into()),
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> natscale::Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run(args: RunArgs) -> natscale::Result<()> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    cfg.rng_seed = Some(args.seed);
    if let Some(v) = args.events {
        cfg.events_path = Some(v);
    }
    if let Some(v) = args.events_format {
        cfg.events_format = Some(v);
    }
    if let Some(v) = args.locations {
        cfg.locations_path = Some(v);
        cfg.grid = None;
    }
    if let Some(v) = args.grid {
        cfg.grid = Some(v);
        cfg.locations_path = None;
    }
    if let Some(v) = args.min_users {
        cfg.min_users = v;
    }
    if let Some(v) = args.activity {
        cfg.activity = v;
    }
    if let Some(v) = args.runs {
        cfg.runs = v;
    }
    if let Some(v) = args.percentile_mode {
        cfg.percentile_mode = v;
    }
    if let Some(v) = args.min_interval {
        cfg.min_interval = v;
    }
    if let Some(v) = args.max_smooth_iters {
        cfg.max_smooth_iters = v;
    }
    if let Some(v) = args.cut_convention {
        cfg.cut_convention = v;
    }
    if let Some(v) = args.within_aggregate {
        cfg.within_aggregate = v;
    }
    if let Some(v) = args.bbox_margin {
        cfg.bbox_margin = v;
    }
    if args.bipartition {
        cfg.bipartition = true;
    }
    if let Some(v) = args.output {
        cfg.output_dir = v;
    }

    let manifest = run_pipeline(&cfg)?;
    for w in &manifest.warnings {
        log::warn!("{w}");
    }
    let scales = manifest.summary.get("natural_scales").cloned().unwrap_or_default();
    println!(
        "{} natural scales; outputs in {}",
        scales,
        cfg.output_dir.display()
    );
    Ok(())
}

fn synth(args: SynthArgs) -> natscale::Result<()> {
    let mut spec = match &args.config {
        Some(path) => read_config::<SyntheticSpec>(path)?,
        None => SyntheticSpec {
            levels: Vec::new(),
            users: 500,
            movements_per_user: 10,
            mixing: Vec::new(),
            locations: 200,
            center: GeoPoint::new(50.5, 4.5),
            rng_seed: args.seed,
        },
    };
    spec.rng_seed = args.seed;
    if !args.levels.is_empty() {
        spec.levels = args.levels;
    }
    if !args.mixing.is_empty() {
        spec.mixing = args.mixing;
    }
    if let Some(v) = args.users {
        spec.users = v;
    }
    if let Some(v) = args.movements_per_user {
        spec.movements_per_user = v;
    }
    if let Some(v) = args.locations {
        spec.locations = v;
    }
    if let Some(v) = args.center {
        spec.center = v;
    }
    let data = generate_synthetic(&spec)?;
    data.write(&args.output)?;
    println!(
        "{} events, {} locations written to {}",
        data.events.len(),
        data.registry.len(),
        args.output.display()
    );
    Ok(())
}

fn grid(args: GridArgs) -> natscale::Result<()> {
    let spec = match (args.grid, &args.config) {
        (Some(g), _) => g,
        (None, Some(path)) => read_config::<GridSpec>(path)?,
        (None, None) => return Err(Error::Config("either --grid or --config is required".into())),
    };
    let bbox = GeoBox {
        min: GeoPoint::new(spec.min_lat, spec.min_lon),
        max: GeoPoint::new(spec.max_lat, spec.max_lon),
    };
    let registry = make_grid(bbox, spec.spacing_km)?;
    std::fs::write(&args.output, registry.to_csv())
        .map_err(|e| Error::Input(format!("{}: {e}", args.output.display())))?;
    println!("{} seeds written to {}", registry.len(), args.output.display());
    Ok(())
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Input => 3,
        ErrorKind::Pipeline => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Synth(a) => synth(a),
        Command::Grid(a) => grid(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
