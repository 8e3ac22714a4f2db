//! The terrestrial/aerial/satellite continuum: node kinds, mobility,
//! line-of-sight visibility and time-varying link latency.
//!
//! Geometry uses a spherical, non-rotating Earth in an Earth-centred
//! Cartesian frame (metres). Orbits are circular.

mod mobility;
mod network;
mod topology;

pub use mobility::{orbital_period, GeoPoint, MobilityModel};
pub use network::{validate_network, visible, Domain, LinkRule, LinkRules, NodeSpec};
pub use topology::{
    link_latency, next_topology_change, snapshot, visibility_set, Link, TopologyError, TopologySnapshot,
};

/// Mean Earth radius, metres.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Standard gravitational parameter of the Earth, m³/s².
pub const EARTH_MU: f64 = 3.986004418e14;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Position = nalgebra::Vector3<f64>;
