//! Planar geometry: exact predicates and Delaunay triangulations.

pub mod derived;
pub mod exact;
pub mod interval;
mod point;
pub mod predicates;
pub mod triangulation;
pub mod voronoi;

pub use point::Point2;
