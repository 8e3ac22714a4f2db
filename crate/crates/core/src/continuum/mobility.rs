use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{Position, EARTH_MU, EARTH_RADIUS_M};

/// Geodetic point on the spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_m: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64, alt_m: f64) -> Self {
        Self {
            lat_deg,
            lon_deg,
            alt_m,
        }
    }

    pub fn to_cartesian(self) -> Position {
        let r = EARTH_RADIUS_M + self.alt_m;
        let (lat, lon) = (self.lat_deg.to_radians(), self.lon_deg.to_radians());
        Position::new(r * lat.cos() * lon.cos(), r * lat.cos() * lon.sin(), r * lat.sin())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MobilityModel {
    Static(GeoPoint),
    /// Circular orbit with its ascending node on the +x axis; `phase_deg` is
    /// the argument of latitude at t = 0.
    CircularOrbit {
        altitude_m: f64,
        inclination_deg: f64,
        phase_deg: f64,
    },
    /// Closed polyline through the waypoints (last joins back to first),
    /// traversed by straight Cartesian chords at constant speed.
    WaypointLoop {
        waypoints: Vec<GeoPoint>,
        speed_mps: f64,
    },
}

/// Keplerian period of a circular orbit at `altitude_m`, seconds.
pub fn orbital_period(altitude_m: f64) -> f64 {
    let a = EARTH_RADIUS_M + altitude_m;
    TAU * (a.powi(3) / EARTH_MU).sqrt()
}

impl MobilityModel {
    pub fn is_orbit(&self) -> bool {
        matches!(self, MobilityModel::CircularOrbit { .. })
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            MobilityModel::CircularOrbit { altitude_m, .. } => Some(orbital_period(*altitude_m)),
            _ => None,
        }
    }

    pub fn position_at(&self, t: f64) -> Position {
        match self {
            MobilityModel::Static(p) => p.to_cartesian(),
            MobilityModel::CircularOrbit {
                altitude_m,
                inclination_deg,
                phase_deg,
            } => {
                let r = EARTH_RADIUS_M + altitude_m;
                let omega = TAU / orbital_period(*altitude_m);
                let u = phase_deg.to_radians() + omega * t;
                let inc = inclination_deg.to_radians();
                Position::new(r * u.cos(), r * u.sin() * inc.cos(), r * u.sin() * inc.sin())
            }
            MobilityModel::WaypointLoop { waypoints, speed_mps } => waypoint_position(waypoints, *speed_mps, t),
        }
    }
}

fn waypoint_position(waypoints: &[GeoPoint], speed: f64, t: f64) -> Position {
    let points: Vec<Position> = waypoints.iter().map(|w| w.to_cartesian()).collect();
    let Some(&first) = points.first() else {
        return Position::zeros();
    };
    let n = points.len();
    let segments: Vec<(Position, Position, f64)> = (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            (a, b, (b - a).norm())
        })
        .collect();
    let loop_length: f64 = segments.iter().map(|s| s.2).sum();
    if loop_length == 0.0 || speed <= 0.0 {
        return first;
    }
    let mut along = (speed * t).rem_euclid(loop_length);
    for (a, b, len) in &segments {
        if along <= *len {
            if *len == 0.0 {
                return *a;
            }
            return a + (b - a) * (along / len);
        }
        along -= len;
    }
    first
}
