//! GeoJSON and JSON writers shared by the pipeline.

use serde_json::{json, Map, Value};

use crate::community::Partition;
use crate::geo::GeoPoint;
use crate::geometry::{BoundarySegment, ScaleTuple, VoronoiDiagram};
use crate::ingest::LocationRegistry;

pub const COORD_DECIMALS: i32 = 7;

/// Rounds to 7 decimals; `-0.0` is written as `0.0`.
pub fn round_coord(x: f64) -> f64 {
    let scale = 10f64.powi(COORD_DECIMALS);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn position(p: &GeoPoint) -> Value {
    json!([round_coord(p.lon), round_coord(p.lat)])
}

fn collection(features: Vec<Value>) -> Value {
    json!({ "type": "FeatureCollection", "features": features })
}

/// Boundary segments as LineString features with `{scales, run_id}`.
pub fn boundaries_geojson(segments: &[BoundarySegment], run_id: &str) -> Value {
    let features = segments
        .iter()
        .map(|seg| {
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [position(&seg.line[0]), position(&seg.line[1])],
                },
                "properties": { "scales": seg.scales, "run_id": run_id },
            })
        })
        .collect();
    collection(features)
}

/// Voronoi cells as Polygon features. `scales` pairs each natural-scale
/// number with its smoothed partition; `tuples` are the multiscale labels.
pub fn cells_geojson(
    diagram: &VoronoiDiagram,
    registry: &LocationRegistry,
    scales: &[(usize, &Partition)],
    tuples: &[ScaleTuple],
) -> Value {
    let features = (0..diagram.len())
        .map(|i| {
            let mut props = Map::new();
            props.insert("location_id".into(), json!(registry.get(i).source_id));
            for &(k, p) in scales {
                props.insert(format!("community_at_scale_{k}"), json!(p.label(i)));
            }
            if let Some(t) = tuples.get(i) {
                props.insert("tuple".into(), json!(t.0));
            }
            let ring: Vec<Value> = diagram.cell_ring(i).iter().map(position).collect();
            json!({
                "type": "Feature",
                "geometry": { "type": "Polygon", "coordinates": [ring] },
                "properties": props,
            })
        })
        .collect();
    collection(features)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialise");
    s.push('\n');
    s
}

/// Finite numbers as JSON numbers, infinities as the strings `"inf"` and
/// `"-inf"`.
pub fn float_value(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        Value::Null
    }
}
