//! Competitive online exploration of polygons with colored holes.

pub mod coverage;
pub mod geodesic;
pub mod geometry;
pub mod harness;
pub mod scenarios;
pub mod search;
pub mod strategies;
pub mod visibility;
