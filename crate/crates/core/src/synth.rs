//! Synthetic traces with planted movement scales, and regular seed grids.
//!
//! Clusters are nested: every level-`l` cluster is a disk that lies inside
//! its parent at level `l + 1`. Each user has a home leaf cluster. A user's
//! first photo is taken at home; every further photo is a movement whose
//! level is drawn from the mixing probabilities and whose destination is a
//! random leaf below the home's ancestor at that level.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, EARTH_RADIUS_KM};
use crate::ingest::{events_to_csv, LocationRegistry, MovementEvent};
use crate::seed::derive_seed;

pub const MAX_GRID_SEEDS: usize = 1_000_000;
const PLACEMENT_ATTEMPTS: usize = 10_000;
const BASE_TIMESTAMP: u64 = 1_500_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub radius_km: f64,
    /// Clusters per parent cluster; for the top level, clusters in total.
    pub clusters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Ordered from the smallest radius to the largest.
    pub levels: Vec<Level>,
    pub users: usize,
    /// Mean number of movements per user; individual counts are uniform
    /// in `0..=2 * movements_per_user`.
    pub movements_per_user: usize,
    /// Probability of a movement at each level.
    pub mixing: Vec<f64>,
    /// Seed locations, spread evenly over the leaf clusters.
    pub locations: usize,
    #[serde(default = "default_center")]
    pub center: GeoPoint,
    pub rng_seed: u64,
}

fn default_center() -> GeoPoint {
    GeoPoint::new(50.5, 4.5)
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("synthetic spec: {m}")));
        if self.levels.is_empty() {
            return bad("at least one level is required");
        }
        if self.levels.iter().any(|l| l.radius_km.is_nan() || l.radius_km <= 0.0 || l.clusters == 0) {
            return bad("radii must be positive and cluster counts at least 1");
        }
        if self.levels.windows(2).any(|w| w[1].radius_km <= w[0].radius_km) {
            return bad("radii must be strictly increasing");
        }
        if self.mixing.len() != self.levels.len() {
            return bad("one mixing probability per level is required");
        }
        if self.mixing.iter().any(|&p| !(0.0..=1.0).contains(&p))
            || (self.mixing.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad("mixing probabilities must lie in [0, 1] and sum to 1");
        }
        if self.users == 0 || self.locations == 0 {
            return bad("users and locations must be positive");
        }
        if !self.center.is_valid() {
            return bad("center is not a valid coordinate");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: GeoPoint,
    pub radius_km: f64,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTruth {
    pub user_id: String,
    pub home_leaf: usize,
    /// 1-based levels at which the user moved.
    pub levels: Vec<usize>,
    pub photos: usize,
}

/// Planted structure of a synthetic data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub radii_km: Vec<f64>,
    /// `clusters[l]` lists the clusters of level `l + 1`.
    pub clusters: Vec<Vec<Cluster>>,
    /// Leaf cluster of every seed location.
    pub location_leaf: Vec<usize>,
    pub users: Vec<UserTruth>,
}

impl GroundTruth {
    /// Ancestor of `leaf` at 0-based `level`.
    pub fn ancestor(&self, leaf: usize, level: usize) -> usize {
        let mut c = leaf;
        for l in 0..level {
            c = self.clusters[l][c].parent.expect("non-top clusters have parents");
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub events: Vec<MovementEvent>,
    pub registry: LocationRegistry,
    pub truth: GroundTruth,
}

impl SyntheticData {
    /// Writes `events.csv`, `locations.csv` and `truth.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: String| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))
        };
        write("events.csv", events_to_csv(&self.events)?)?;
        write("locations.csv", self.registry.to_csv())?;
        let mut truth = serde_json::to_string_pretty(&self.truth).map_err(|e| Error::Input(e.to_string()))?;
        truth.push('\n');
        write("truth.json", truth)
    }
}

/// Uniform point in the geodesic disk around `center`.
fn in_disk(rng: &mut ChaCha8Rng, center: GeoPoint, radius: f64) -> GeoPoint {
    let r = radius * rng.random::<f64>().sqrt();
    center.destination(TAU * rng.random::<f64>(), r)
}

/// Places `count` disks of `radius` uniformly inside `area` (center,
/// radius) with pairwise gaps of at least `2 * radius` between their rims.
fn scatter(
    rng: &mut ChaCha8Rng,
    area: (GeoPoint, f64),
    radius: f64,
    count: usize,
    parent: Option<usize>,
    out: &mut Vec<Cluster>,
) -> Result<()> {
    let first = out.len();
    for _ in 0..count {
        let mut placed = false;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let center = in_disk(rng, area.0, (area.1 - radius).max(0.0));
            if out[first..].iter().all(|c| c.center.distance_km(&center) >= 4.0 * radius) {
                out.push(Cluster {
                    center,
                    radius_km: radius,
                    parent,
                });
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Config(format!(
                "cannot fit {count} clusters of radius {radius} km apart from each other"
            )));
        }
    }
    Ok(())
}

/// Places `count` children at the vertices of a randomly rotated regular
/// polygon centred in `parent`, so that siblings are equally far from the
/// parent center and, for up to three children, from each other.
fn ring(rng: &mut ChaCha8Rng, parent: &Cluster, index: usize, radius: f64, count: usize, out: &mut Vec<Cluster>) -> Result<()> {
    let rho = (parent.radius_km - 2.0 * radius) / 2.0;
    let side = if count > 1 { 2.0 * rho * (std::f64::consts::PI / count as f64).sin() } else { f64::INFINITY };
    if rho < 0.0 || side < 4.0 * radius {
        return Err(Error::Config(format!(
            "cannot fit {count} clusters of radius {radius} km inside a cluster of radius {} km",
            parent.radius_km
        )));
    }
    let turn = TAU * rng.random::<f64>();
    for i in 0..count {
        let center = if count == 1 {
            parent.center
        } else {
            parent.center.destination(turn + TAU * i as f64 / count as f64, rho)
        };
        out.push(Cluster {
            center,
            radius_km: radius,
            parent: Some(index),
        });
    }
    Ok(())
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.rng_seed, "synth", 0));
    let depth = spec.levels.len();

    // Top-down placement; `clusters[l]` holds the clusters of level l.
    let mut clusters: Vec<Vec<Cluster>> = (0..depth).map(|_| Vec::new()).collect();
    let top = spec.levels[depth - 1];
    let region = 3.0 * top.radius_km * (top.clusters as f64).sqrt() + top.radius_km;
    scatter(&mut rng, (spec.center, region), top.radius_km, top.clusters, None, &mut clusters[depth - 1])?;
    for l in (0..depth - 1).rev() {
        let level = spec.levels[l];
        let (lower, upper) = clusters.split_at_mut(l + 1);
        for (p, parent) in upper[0].iter().enumerate() {
            ring(&mut rng, parent, p, level.radius_km, level.clusters, &mut lower[l])?;
        }
    }
    let children: Vec<Vec<Vec<usize>>> = (0..depth)
        .map(|l| {
            let mut ch = vec![Vec::new(); clusters[l].len()];
            if l > 0 {
                for (i, c) in clusters[l - 1].iter().enumerate() {
                    ch[c.parent.unwrap()].push(i);
                }
            }
            ch
        })
        .collect();
    let leaves = clusters[0].len();

    let mut seeds = Vec::with_capacity(spec.locations);
    let mut location_leaf = Vec::with_capacity(spec.locations);
    for i in 0..spec.locations {
        let leaf = i % leaves;
        seeds.push((in_disk(&mut rng, clusters[0][leaf].center, clusters[0][leaf].radius_km), None));
        location_leaf.push(leaf);
    }
    let registry = LocationRegistry::new(seeds)?;

    let ancestor = |leaf: usize, level: usize| {
        let mut c = leaf;
        for level_clusters in &clusters[..level] {
            c = level_clusters[c].parent.unwrap();
        }
        c
    };
    let mut events = Vec::new();
    let mut users = Vec::with_capacity(spec.users);
    let width = spec.users.to_string().len();
    for u in 0..spec.users {
        let user_id = format!("u{u:0width$}");
        let home = rng.random_range(0..leaves);
        let moves = rng.random_range(0..=2 * spec.movements_per_user);
        let photo = |p: GeoPoint, k: usize| MovementEvent {
            user_id: user_id.clone(),
            lat: p.lat,
            lon: p.lon,
            timestamp: BASE_TIMESTAMP + (u as u64) * 100_000 + k as u64,
        };
        events.push(photo(in_disk(&mut rng, clusters[0][home].center, clusters[0][home].radius_km), 0));
        let mut levels = std::collections::BTreeSet::new();
        for k in 1..=moves {
            let x: f64 = rng.random();
            let mut acc = 0.0;
            let mut level = depth - 1;
            for (l, &p) in spec.mixing.iter().enumerate() {
                acc += p;
                if x < acc {
                    level = l;
                    break;
                }
            }
            levels.insert(level + 1);
            let mut c = ancestor(home, level);
            for l in (1..=level).rev() {
                let ch = &children[l][c];
                c = ch[rng.random_range(0..ch.len())];
            }
            events.push(photo(in_disk(&mut rng, clusters[0][c].center, clusters[0][c].radius_km), k));
        }
        users.push(UserTruth {
            user_id,
            home_leaf: home,
            levels: levels.into_iter().collect(),
            photos: moves + 1,
        });
    }

    Ok(SyntheticData {
        events,
        registry,
        truth: GroundTruth {
            radii_km: spec.levels.iter().map(|l| l.radius_km).collect(),
            clusters,
            location_leaf,
            users,
        },
    })
}

/// Latitude/longitude rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoBox {
    pub min: GeoPoint,
    pub max: GeoPoint,
}

/// Regular grid covering `bbox`, aligned to its corners. Each axis gets
/// `ceil(extent / spacing) + 1` evenly spaced seeds, so the actual spacing
/// never exceeds `spacing_km` and every axis has at least two seeds.
pub fn make_grid(bbox: GeoBox, spacing_km: f64) -> Result<LocationRegistry> {
    if !spacing_km.is_finite() || spacing_km <= 0.0 {
        return Err(Error::Config("grid spacing must be positive".into()));
    }
    if !bbox.min.is_valid() || !bbox.max.is_valid() || bbox.min.lat >= bbox.max.lat || bbox.min.lon >= bbox.max.lon {
        return Err(Error::Config("grid box is degenerate or invalid".into()));
    }
    let mid_lat = (bbox.min.lat + bbox.max.lat) / 2.0;
    let height = EARTH_RADIUS_KM * (bbox.max.lat - bbox.min.lat).to_radians();
    let width = EARTH_RADIUS_KM * (bbox.max.lon - bbox.min.lon).to_radians() * mid_lat.to_radians().cos();
    let steps = |extent: f64| (extent / spacing_km - 1e-9).ceil().max(1.0);
    let (ny, nx) = (steps(height), steps(width));
    if (ny + 1.0) * (nx + 1.0) > MAX_GRID_SEEDS as f64 {
        return Err(Error::Config(format!(
            "grid of {} x {} seeds exceeds {MAX_GRID_SEEDS}",
            nx + 1.0,
            ny + 1.0
        )));
    }
    let (ny, nx) = (ny as usize, nx as usize);
    let lerp = |a: f64, b: f64, i: usize, n: usize| a + (b - a) * i as f64 / n as f64;
    let points = (0..=ny).flat_map(|i| {
        (0..=nx).map(move |j| {
            let p = GeoPoint::new(lerp(bbox.min.lat, bbox.max.lat, i, ny), lerp(bbox.min.lon, bbox.max.lon, j, nx));
            (p, None)
        })
    });
    LocationRegistry::new(points.collect::<Vec<_>>())
}
