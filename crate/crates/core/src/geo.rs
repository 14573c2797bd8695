//! Great-circle distances and the local planar projection used for the
//! Voronoi construction.

use serde::{Deserialize, Serialize};

/// Mean Earth radius (IUGG), kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }

    pub fn distance_km(&self, other: &GeoPoint) -> f64 {
        haversine_km(self.lat, self.lon, other.lat, other.lon)
    }

    /// Point reached by travelling `distance_km` along a great circle with
    /// initial `bearing` (radians clockwise from north).
    pub fn destination(&self, bearing: f64, distance_km: f64) -> GeoPoint {
        let (phi1, lambda1) = (self.lat.to_radians(), self.lon.to_radians());
        let delta = distance_km / EARTH_RADIUS_KM;
        let phi2 = (phi1.sin() * delta.cos() + phi1.cos() * delta.sin() * bearing.cos()).asin();
        let lambda2 = lambda1
            + (bearing.sin() * delta.sin() * phi1.cos()).atan2(delta.cos() - phi1.sin() * phi2.sin());
        let lon = (lambda2.to_degrees() + 540.0).rem_euclid(360.0) - 180.0;
        GeoPoint::new(phi2.to_degrees(), lon)
    }
}

/// Haversine distance between two lat/lon pairs given in degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
}

/// Equirectangular projection centred on a reference point. Plane units
/// are kilometres; longitude is scaled by the cosine of the reference
/// latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equirectangular {
    pub origin: GeoPoint,
    cos_lat0: f64,
}

impl Equirectangular {
    pub fn new(origin: GeoPoint) -> Self {
        Self {
            origin,
            cos_lat0: origin.lat.to_radians().cos(),
        }
    }

    /// Projection centred on the centroid of `points` (arithmetic mean of
    /// the coordinates).
    pub fn centred_on(points: impl IntoIterator<Item = GeoPoint>) -> Self {
        let (mut lat, mut lon, mut n) = (0.0, 0.0, 0usize);
        for p in points {
            lat += p.lat;
            lon += p.lon;
            n += 1;
        }
        let n = n.max(1) as f64;
        Self::new(GeoPoint::new(lat / n, lon / n))
    }

    pub fn forward(&self, p: GeoPoint) -> [f64; 2] {
        [
            EARTH_RADIUS_KM * (p.lon - self.origin.lon).to_radians() * self.cos_lat0,
            EARTH_RADIUS_KM * (p.lat - self.origin.lat).to_radians(),
        ]
    }

    pub fn inverse(&self, xy: [f64; 2]) -> GeoPoint {
        GeoPoint {
            lat: self.origin.lat + (xy[1] / EARTH_RADIUS_KM).to_degrees(),
            lon: self.origin.lon + (xy[0] / (EARTH_RADIUS_KM * self.cos_lat0)).to_degrees(),
        }
    }
}
