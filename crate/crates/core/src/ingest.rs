//! Event and seed ingestion, nearest-seed assignment, the co-location graph
//! and the low-activity filter.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, EARTH_RADIUS_KM};
use crate::graph::{Edge, WeightedGraph};

/// Number of offending line numbers kept in a [`RejectionReport`].
pub const REJECTION_SAMPLE: usize = 10;

/// One geotagged observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovementEvent {
    pub user_id: String,
    pub lat: f64,
    pub lon: f64,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventFormat {
    Csv,
    Jsonl,
}

impl EventFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "jsonl" | "ndjson" => Some(Self::Jsonl),
            _ => None,
        }
    }
}

impl std::str::FromStr for EventFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(Error::Input(format!("unknown event format `{other}`"))),
        }
    }
}

/// Malformed input rows: total count and the first few line numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub rejected: usize,
    pub sample_lines: Vec<usize>,
}

impl RejectionReport {
    fn reject(&mut self, line: usize) {
        self.rejected += 1;
        if self.sample_lines.len() < REJECTION_SAMPLE {
            self.sample_lines.push(line);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedEvents {
    pub events: Vec<MovementEvent>,
    pub rejections: RejectionReport,
}

pub fn load_events(path: &Path, format: EventFormat) -> Result<LoadedEvents> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_events(BufReader::new(file), format)
}

/// Parses events from any reader. Rows that fail to parse or violate the
/// coordinate bounds are reported, not returned; more than half of the rows
/// failing is treated as a format mismatch.
pub fn read_events<R: Read>(reader: R, format: EventFormat) -> Result<LoadedEvents> {
    let mut events = Vec::new();
    let mut rejections = RejectionReport::default();
    match format {
        EventFormat::Csv => read_csv_events(reader, &mut events, &mut rejections)?,
        EventFormat::Jsonl => read_jsonl_events(reader, &mut events, &mut rejections)?,
    }
    let total = events.len() + rejections.rejected;
    if rejections.rejected * 2 > total {
        return Err(Error::FormatMismatch {
            rejected: rejections.rejected,
            total,
            sample_lines: rejections.sample_lines,
        });
    }
    Ok(LoadedEvents { events, rejections })
}

fn checked_event(user_id: &str, lat: f64, lon: f64, timestamp: u64) -> Option<MovementEvent> {
    let user_id = user_id.trim();
    let p = GeoPoint::new(lat, lon);
    (!user_id.is_empty() && p.is_valid()).then(|| MovementEvent {
        user_id: user_id.to_string(),
        lat,
        lon,
        timestamp,
    })
}

fn read_csv_events<R: Read>(
    reader: R,
    events: &mut Vec<MovementEvent>,
    rejections: &mut RejectionReport,
) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input(format!("events header: {e}")))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Input(format!("events header lacks column `{name}`")))
    };
    let (cu, clat, clon, cts) = (column("user_id")?, column("lat")?, column("lon")?, column("timestamp")?);

    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() as usize;
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(line, |p| p.line() as usize);
                let parsed = (|| {
                    let lat = record.get(clat)?.trim().parse::<f64>().ok()?;
                    let lon = record.get(clon)?.trim().parse::<f64>().ok()?;
                    let ts = record.get(cts)?.trim().parse::<u64>().ok()?;
                    checked_event(record.get(cu)?, lat, lon, ts)
                })();
                match parsed {
                    Some(ev) => events.push(ev),
                    None => rejections.reject(line),
                }
            }
            Err(e) if e.is_io_error() => return Err(Error::Input(format!("reading events: {e}"))),
            Err(e) => {
                let line = e.position().map_or(line, |p| p.line() as usize);
                rejections.reject(line);
            }
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum UserToken {
    Text(String),
    Number(u64),
}

#[derive(Deserialize)]
struct JsonEvent {
    user_id: UserToken,
    lat: f64,
    lon: f64,
    timestamp: u64,
}

fn read_jsonl_events<R: Read>(
    reader: R,
    events: &mut Vec<MovementEvent>,
    rejections: &mut RejectionReport,
) -> Result<()> {
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Input(format!("reading events: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<JsonEvent>(&line).ok().and_then(|j| {
            let user = match j.user_id {
                UserToken::Text(s) => s,
                UserToken::Number(n) => n.to_string(),
            };
            checked_event(&user, j.lat, j.lon, j.timestamp)
        });
        match parsed {
            Some(ev) => events.push(ev),
            None => rejections.reject(i + 1),
        }
    }
    Ok(())
}

/// Writes events as `user_id,lat,lon,timestamp` CSV.
pub fn events_to_csv(events: &[MovementEvent]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["user_id", "lat", "lon", "timestamp"])
        .and_then(|_| {
            events.iter().try_for_each(|e| {
                w.write_record([
                    e.user_id.clone(),
                    e.lat.to_string(),
                    e.lon.to_string(),
                    e.timestamp.to_string(),
                ])
            })
        })
        .map_err(|e| Error::Input(format!("writing events: {e}")))?;
    let bytes = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A seed location. `id` is the dense index inside its registry; `source_id`
/// is the identifier it had in the file it was loaded from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub id: usize,
    pub source_id: u64,
    pub point: GeoPoint,
    pub name: Option<String>,
}

/// The fixed set of seed locations.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationRegistry {
    locations: Vec<Location>,
}

impl LocationRegistry {
    /// Registry from points in id order. Rejects out-of-range and duplicate
    /// coordinates.
    pub fn new(points: impl IntoIterator<Item = (GeoPoint, Option<String>)>) -> Result<Self> {
        let locations = points
            .into_iter()
            .enumerate()
            .map(|(i, (point, name))| Location {
                id: i,
                source_id: i as u64,
                point,
                name,
            })
            .collect();
        Self::from_locations(locations)
    }

    fn from_locations(locations: Vec<Location>) -> Result<Self> {
        let mut seen = HashSet::new();
        for l in &locations {
            if !l.point.is_valid() {
                return Err(Error::Input(format!(
                    "location {} has out-of-range coordinates ({}, {})",
                    l.source_id, l.point.lat, l.point.lon
                )));
            }
            if !seen.insert((l.point.lat.to_bits(), l.point.lon.to_bits())) {
                return Err(Error::Input(format!(
                    "location {} duplicates the coordinates of another location",
                    l.source_id
                )));
            }
        }
        Ok(Self { locations })
    }

    /// Reads `location_id,lat,lon,name`. Ids must be exactly `0..n` in any
    /// order; `name` may be empty or absent.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file)
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Input(format!("locations header: {e}")))?
            .clone();
        let column = |name: &str| headers.iter().position(|h| h.trim() == name);
        let (Some(cid), Some(clat), Some(clon)) = (column("location_id"), column("lat"), column("lon")) else {
            return Err(Error::Input("locations header must contain location_id,lat,lon".into()));
        };
        let cname = column("name");
        let mut rows: Vec<Location> = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Input(format!("locations: {e}")))?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = || Error::Input(format!("locations line {line}: malformed row"));
            let id: u64 = record.get(cid).and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let lat: f64 = record.get(clat).and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let lon: f64 = record.get(clon).and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let name = cname
                .and_then(|c| record.get(c))
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from);
            rows.push(Location {
                id: 0,
                source_id: id,
                point: GeoPoint::new(lat, lon),
                name,
            });
        }
        rows.sort_by_key(|l| l.source_id);
        let n = rows.len();
        for (i, l) in rows.iter_mut().enumerate() {
            if l.source_id != i as u64 {
                return Err(Error::Input(format!(
                    "location ids must be exactly 0..{n}; id {i} is missing or duplicated"
                )));
            }
            l.id = i;
        }
        Self::from_locations(rows)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["location_id", "lat", "lon", "name"])
            .expect("writing to memory");
        for l in &self.locations {
            w.write_record([
                l.source_id.to_string(),
                l.point.lat.to_string(),
                l.point.lon.to_string(),
                l.name.clone().unwrap_or_default(),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn get(&self, id: usize) -> &Location {
        &self.locations[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Location> {
        self.locations.iter()
    }

    pub fn points(&self) -> impl Iterator<Item = GeoPoint> + '_ {
        self.locations.iter().map(|l| l.point)
    }

    pub fn distance_km(&self, a: usize, b: usize) -> f64 {
        self.locations[a].point.distance_km(&self.locations[b].point)
    }

    /// Nearest location to `p` by great-circle distance; ties go to the
    /// lowest id. `None` for an empty registry.
    pub fn nearest(&self, p: GeoPoint) -> Option<usize> {
        NearestSeed::new(self).nearest(p)
    }

    /// Keeps the locations with `keep[id]`, re-indexed densely. Returns the
    /// restricted registry and the old-to-new index map.
    pub fn restrict(&self, keep: &[bool]) -> (Self, Vec<Option<usize>>) {
        let mut map = vec![None; self.locations.len()];
        let mut locations = Vec::new();
        for (l, &k) in self.locations.iter().zip(keep) {
            if k {
                map[l.id] = Some(locations.len());
                let mut l = l.clone();
                l.id = locations.len();
                locations.push(l);
            }
        }
        (Self { locations }, map)
    }
}

/// Exact nearest-seed search. Seeds are sorted by latitude; the great-circle
/// distance is bounded below by `R * |dlat|`, which prunes the scan.
struct NearestSeed<'a> {
    registry: &'a LocationRegistry,
    by_lat: Vec<(f64, usize)>,
}

impl<'a> NearestSeed<'a> {
    fn new(registry: &'a LocationRegistry) -> Self {
        let mut by_lat: Vec<(f64, usize)> = registry.iter().map(|l| (l.point.lat, l.id)).collect();
        by_lat.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Self { registry, by_lat }
    }

    fn nearest(&self, p: GeoPoint) -> Option<usize> {
        if self.by_lat.is_empty() {
            return None;
        }
        let start = self.by_lat.partition_point(|&(lat, _)| lat < p.lat);
        let mut best: Option<(f64, usize)> = None;
        let lower_bound = |lat: f64| EARTH_RADIUS_KM * (lat - p.lat).abs().to_radians();
        let consider = |id: usize, best: &mut Option<(f64, usize)>| {
            let d = p.distance_km(&self.registry.get(id).point);
            if best.is_none_or(|(bd, bid)| d < bd || (d == bd && id < bid)) {
                *best = Some((d, id));
            }
        };
        let (mut up, mut down) = (start, start);
        loop {
            let bound = best.map_or(f64::INFINITY, |(d, _)| d);
            let next_up = (up < self.by_lat.len()).then(|| lower_bound(self.by_lat[up].0));
            let next_down = (down > 0).then(|| lower_bound(self.by_lat[down - 1].0));
            let up_ok = next_up.is_some_and(|b| b <= bound);
            let down_ok = next_down.is_some_and(|b| b <= bound);
            if !up_ok && !down_ok {
                break;
            }
            if up_ok && (!down_ok || next_up <= next_down) {
                consider(self.by_lat[up].1, &mut best);
                up += 1;
            } else {
                consider(self.by_lat[down - 1].1, &mut best);
                down -= 1;
            }
        }
        best.map(|(_, id)| id)
    }
}

/// An event discretised to its nearest seed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub user_id: String,
    pub location: usize,
    pub timestamp: u64,
}

/// Maps every event to its nearest seed and drops repeated
/// `(user, location, timestamp)` triples, keeping first occurrences in order.
pub fn assign_events(events: &[MovementEvent], registry: &LocationRegistry) -> Result<Vec<Assignment>> {
    if registry.is_empty() {
        return Err(Error::EmptyRegistry);
    }
    let index = NearestSeed::new(registry);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(events.len());
    for e in events {
        let location = index
            .nearest(GeoPoint::new(e.lat, e.lon))
            .expect("registry is non-empty");
        let a = Assignment {
            user_id: e.user_id.clone(),
            location,
            timestamp: e.timestamp,
        };
        if seen.insert(a.clone()) {
            out.push(a);
        }
    }
    Ok(out)
}

/// Distinct locations visited by every user, users in lexicographic order.
pub fn visited_locations(assignments: &[Assignment]) -> BTreeMap<&str, BTreeSet<usize>> {
    let mut visited: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for a in assignments {
        visited.entry(a.user_id.as_str()).or_default().insert(a.location);
    }
    visited
}

/// Co-location graph: the weight of `{u, v}` is the number of distinct users
/// seen at both `u` and `v`.
pub fn build_graph(assignments: &[Assignment], registry: &LocationRegistry) -> Result<WeightedGraph> {
    if assignments.is_empty() {
        return Err(Error::NoAssignments);
    }
    let mut weights: HashMap<(usize, usize), u64> = HashMap::new();
    for locations in visited_locations(assignments).values() {
        let locs: Vec<usize> = locations.iter().copied().collect();
        for (i, &u) in locs.iter().enumerate() {
            for &v in &locs[i + 1..] {
                *weights.entry((u, v)).or_insert(0) += 1;
            }
        }
    }
    WeightedGraph::new(
        registry.len(),
        weights.into_iter().map(|((u, v), weight)| Edge {
            u,
            v,
            weight,
            distance_km: registry.distance_km(u, v),
        }),
    )
}

/// What counts as a location's activity in [`filter_min_degree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityMeasure {
    /// Number of distinct users assigned to the location.
    #[default]
    DistinctUsers,
    /// Number of incident edges in the co-location graph.
    GraphDegree,
}

#[derive(Debug, Clone)]
pub struct Filtered {
    pub graph: WeightedGraph,
    pub registry: LocationRegistry,
    /// Old location index to new index, `None` when removed.
    pub index_map: Vec<Option<usize>>,
}

impl Filtered {
    /// Re-indexes assignments, dropping the ones at removed locations.
    pub fn remap(&self, assignments: &[Assignment]) -> Vec<Assignment> {
        assignments
            .iter()
            .filter_map(|a| {
                self.index_map[a.location].map(|location| Assignment {
                    location,
                    ..a.clone()
                })
            })
            .collect()
    }
}

/// Distinct users per location.
pub fn users_per_location(assignments: &[Assignment], n: usize) -> Vec<usize> {
    let mut users: Vec<HashSet<&str>> = vec![HashSet::new(); n];
    for a in assignments {
        users[a.location].insert(&a.user_id);
    }
    users.iter().map(HashSet::len).collect()
}

/// Removes locations whose activity is below `min_users` together with their
/// edges. Applied once; the survivors are re-indexed.
pub fn filter_min_degree(
    graph: &WeightedGraph,
    registry: &LocationRegistry,
    assignments: &[Assignment],
    min_users: usize,
    measure: ActivityMeasure,
) -> Result<Filtered> {
    let activity = match measure {
        ActivityMeasure::DistinctUsers => users_per_location(assignments, registry.len()),
        ActivityMeasure::GraphDegree => graph.degrees(),
    };
    let keep: Vec<bool> = activity.iter().map(|&a| a >= min_users).collect();
    let (restricted, index_map) = registry.restrict(&keep);
    if restricted.len() < 3 {
        return Err(Error::TooFewLocations(restricted.len()));
    }
    let edges = graph.edges().iter().filter_map(|e| {
        Some(Edge {
            u: index_map[e.u]?,
            v: index_map[e.v]?,
            ..*e
        })
    });
    Ok(Filtered {
        graph: WeightedGraph::new(restricted.len(), edges)?,
        registry: restricted,
        index_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry(points: &[(f64, f64)]) -> LocationRegistry {
        LocationRegistry::new(points.iter().map(|&(lat, lon)| (GeoPoint::new(lat, lon), None))).unwrap()
    }

    fn assign(user: &str, location: usize) -> Assignment {
        Assignment {
            user_id: user.into(),
            location,
            timestamp: 0,
        }
    }

    #[test]
    fn csv_valid_rows() {
        let data = "user_id,lat,lon,timestamp\nu1,50.0,4.0,10\nu2,51.0,4.5,11\nu1,50.5,3.0,12\n";
        let loaded = read_events(data.as_bytes(), EventFormat::Csv).unwrap();
        assert_eq!(loaded.events.len(), 3);
        assert_eq!(loaded.rejections, RejectionReport::default());
        assert_eq!(loaded.events[2].user_id, "u1");
    }

    #[test]
    fn csv_bound_violation_is_reported() {
        let data = "user_id,lat,lon,timestamp\nu1,91.0,4.0,10\nu2,51.0,4.5,11\nu3,1,1,1\n";
        let loaded = read_events(data.as_bytes(), EventFormat::Csv).unwrap();
        assert_eq!(loaded.events.len(), 2);
        assert_eq!(loaded.rejections.rejected, 1);
        assert_eq!(loaded.rejections.sample_lines, vec![2]);
    }

    #[test]
    fn csv_column_order_is_free() {
        let data = "timestamp,lon,lat,user_id\n5,4.0,50.0,a\n";
        let loaded = read_events(data.as_bytes(), EventFormat::Csv).unwrap();
        assert_eq!(loaded.events[0].lat, 50.0);
        assert_eq!(loaded.events[0].timestamp, 5);
    }

    #[test]
    fn mostly_garbage_is_a_format_mismatch() {
        let data = "user_id,lat,lon,timestamp\nu,x,1,1\nu,1,x,1\nu,1,1,1\n";
        assert!(matches!(
            read_events(data.as_bytes(), EventFormat::Csv),
            Err(Error::FormatMismatch { rejected: 2, total: 3, .. })
        ));
        assert!(read_events("a,b\n1,2\n".as_bytes(), EventFormat::Csv).is_err());
    }

    #[test]
    fn jsonl_rows() {
        let data = "{\"user_id\":\"a\",\"lat\":1.0,\"lon\":2.0,\"timestamp\":3}\n\n{\"user_id\":7,\"lat\":1.5,\"lon\":2.0,\"timestamp\":4}\n{\"user_id\":\"b\",\"lat\":-91,\"lon\":0,\"timestamp\":1}\n";
        let loaded = read_events(data.as_bytes(), EventFormat::Jsonl).unwrap();
        assert_eq!(loaded.events.len(), 2);
        assert_eq!(loaded.events[1].user_id, "7");
        assert_eq!(loaded.rejections.sample_lines, vec![4]);
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_events(Path::new("/nonexistent/events.csv"), EventFormat::Csv),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn registry_rules() {
        assert!(LocationRegistry::new([(GeoPoint::new(1.0, 1.0), None), (GeoPoint::new(1.0, 1.0), None)]).is_err());
        let reg = LocationRegistry::read("location_id,lat,lon,name\n1,2.0,3.0,b\n0,1.0,1.0,\n".as_bytes()).unwrap();
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.get(0).point, GeoPoint::new(1.0, 1.0));
        assert_eq!(reg.get(1).name.as_deref(), Some("b"));
        assert!(LocationRegistry::read("location_id,lat,lon\n0,1,1\n2,2,2\n".as_bytes()).is_err());
    }

    #[test]
    fn nearest_seed_rules() {
        let reg = registry(&[(0.0, 0.0), (0.0, 1.0)]);
        let ev = |lat, lon| MovementEvent { user_id: "u".into(), lat, lon, timestamp: 0 };
        let a = assign_events(&[ev(0.0, 0.4), ev(0.0, 1.0), ev(0.0, 0.6)], &reg).unwrap();
        assert_eq!(a.iter().map(|a| a.location).collect::<Vec<_>>(), vec![0, 1]);
        // equidistant event goes to the lower id
        assert_eq!(reg.nearest(GeoPoint::new(0.0, 0.5)), Some(0));
        assert!(matches!(assign_events(&[], &registry(&[])), Err(Error::EmptyRegistry)));
    }

    #[test]
    fn duplicates_collapse() {
        let reg = registry(&[(0.0, 0.0), (0.0, 1.0)]);
        let ev = MovementEvent { user_id: "u".into(), lat: 0.0, lon: 0.0, timestamp: 5 };
        let mut other = ev.clone();
        other.timestamp = 6;
        let a = assign_events(&[ev.clone(), ev.clone(), other], &reg).unwrap();
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn single_user_clique() {
        let reg = registry(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        let g = build_graph(&[assign("u", 0), assign("u", 1), assign("u", 2)], &reg).unwrap();
        assert_eq!(g.edges().len(), 3);
        assert!(g.edges().iter().all(|e| e.weight == 1));
        assert_eq!(g.edges()[0].distance_km, reg.distance_km(0, 1));
    }

    #[test]
    fn distinct_user_weights() {
        let reg = registry(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        let a = [
            assign("U1", 0), assign("U1", 1), assign("U1", 1),
            assign("U2", 0), assign("U2", 1),
            assign("U3", 1), assign("U3", 2),
            assign("U4", 0),
        ];
        let g = build_graph(&a, &reg).unwrap();
        assert_eq!(g.weight(0, 1), 2);
        assert_eq!(g.weight(1, 2), 1);
        assert_eq!(g.weight(0, 2), 0);
        assert_eq!(g.edges().len(), 2);
        assert!(matches!(build_graph(&[], &reg), Err(Error::NoAssignments)));
    }

    #[test]
    fn filter_thresholds() {
        let reg = registry(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        let mut a = Vec::new();
        for u in 0..5 {
            let user = format!("u{u}");
            a.push(assign(&user, 0));
            a.push(assign(&user, 1));
            a.push(assign(&user, 2));
            if u < 4 {
                a.push(assign(&user, 3));
            }
        }
        let g = build_graph(&a, &reg).unwrap();
        let none = filter_min_degree(&g, &reg, &a, 0, ActivityMeasure::DistinctUsers).unwrap();
        assert_eq!(none.graph, g);
        let f = filter_min_degree(&g, &reg, &a, 5, ActivityMeasure::DistinctUsers).unwrap();
        assert_eq!(f.registry.len(), 3);
        assert_eq!(f.index_map, vec![Some(0), Some(1), Some(2), None]);
        assert_eq!(f.graph.edges().len(), 3);
        assert_eq!(f.remap(&a).len(), 15);
        assert!(matches!(
            filter_min_degree(&g, &reg, &a, 6, ActivityMeasure::DistinctUsers),
            Err(Error::TooFewLocations(0))
        ));
        let by_degree = filter_min_degree(&g, &reg, &a, 3, ActivityMeasure::GraphDegree).unwrap();
        assert_eq!(by_degree.registry.len(), 4);
    }
}
