use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::NaturalScale;
use crate::error::{Error, Result};
use crate::ingest::{visited_locations, Assignment, LocationRegistry};

/// Distances between every pair of distinct locations a user visited.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserMovements {
    pub user_id: String,
    pub visited_locations: usize,
    pub distances_km: Vec<f64>,
}

pub fn user_movements(assignments: &[Assignment], registry: &LocationRegistry) -> Vec<UserMovements> {
    visited_locations(assignments)
        .into_iter()
        .map(|(user, locs)| {
            let locs: Vec<usize> = locs.into_iter().collect();
            let mut distances_km = Vec::with_capacity(locs.len() * locs.len().saturating_sub(1) / 2);
            for (i, &a) in locs.iter().enumerate() {
                for &b in &locs[i + 1..] {
                    distances_km.push(registry.distance_km(a, b));
                }
            }
            UserMovements {
                user_id: user.to_string(),
                visited_locations: locs.len(),
                distances_km,
            }
        })
        .collect()
}

/// Natural scales a user's movements fall into.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserScaleProfile {
    pub user_id: String,
    /// 1-based indices into the natural scales.
    pub scales: BTreeSet<usize>,
    pub visited_locations: usize,
    pub movements: usize,
}

impl UserScaleProfile {
    pub fn class_label(&self) -> String {
        class_label(&self.scales)
    }
}

/// `"12"` for scales {1, 2}; indices are joined with `+` once any of them
/// has more than one digit.
pub fn class_label(scales: &BTreeSet<usize>) -> String {
    if scales.iter().all(|&k| k < 10) {
        scales.iter().map(|k| k.to_string()).collect()
    } else {
        scales.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("+")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileClass {
    pub scales: BTreeSet<usize>,
    pub label: String,
    pub users: usize,
    pub mean_visited_locations: f64,
    pub mean_movements: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub users: Vec<UserScaleProfile>,
    /// Users without movements are not counted in any class.
    pub classes: Vec<ProfileClass>,
}

impl ProfileReport {
    pub fn users_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["user_id", "scale_classes", "visited_locations", "movements"])
            .map_err(csv_err)?;
        for u in &self.users {
            w.write_record([
                u.user_id.clone(),
                u.class_label(),
                u.visited_locations.to_string(),
                u.movements.to_string(),
            ])
            .map_err(csv_err)?;
        }
        finish(w)
    }

    pub fn classes_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scale_class", "users", "mean_visited_locations", "mean_movements"])
            .map_err(csv_err)?;
        for c in &self.classes {
            w.write_record([
                c.label.clone(),
                c.users.to_string(),
                c.mean_visited_locations.to_string(),
                c.mean_movements.to_string(),
            ])
            .map_err(csv_err)?;
        }
        finish(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(e.to_string()))
}

/// Assigns each movement to the natural scale whose distance range
/// `(previous threshold, threshold]` contains it; movements longer than
/// the last threshold go to the last scale.
pub fn user_profiles(users: &[UserMovements], scales: &[NaturalScale]) -> Result<ProfileReport> {
    check_coverage(scales)?;
    let bounds: Vec<f64> = scales.iter().map(|s| s.threshold_km).collect();
    let scale_of = |d: f64| bounds.iter().position(|&t| d <= t).unwrap_or(bounds.len() - 1) + 1;

    let users: Vec<UserScaleProfile> = users
        .iter()
        .map(|u| UserScaleProfile {
            user_id: u.user_id.clone(),
            scales: u.distances_km.iter().map(|&d| scale_of(d)).collect(),
            visited_locations: u.visited_locations,
            movements: u.distances_km.len(),
        })
        .collect();

    let mut groups: BTreeMap<&BTreeSet<usize>, (usize, usize, usize)> = BTreeMap::new();
    for u in users.iter().filter(|u| u.movements > 0) {
        let g = groups.entry(&u.scales).or_default();
        g.0 += 1;
        g.1 += u.visited_locations;
        g.2 += u.movements;
    }
    let classes = groups
        .into_iter()
        .map(|(scales, (n, visited, moves))| ProfileClass {
            scales: scales.clone(),
            label: class_label(scales),
            users: n,
            mean_visited_locations: visited as f64 / n as f64,
            mean_movements: moves as f64 / n as f64,
        })
        .collect();
    Ok(ProfileReport { users, classes })
}

fn check_coverage(scales: &[NaturalScale]) -> Result<()> {
    let mut next = 1;
    for s in scales {
        if s.lo != next || s.hi < s.lo {
            return Err(Error::Input("natural scales must be contiguous from scale 1".into()));
        }
        next = s.hi + 1;
    }
    if scales.is_empty() {
        return Err(Error::Input("no natural scales".into()));
    }
    Ok(())
}
