pub mod generators;
pub mod planar_stats;
pub mod geom;
pub mod planar;
pub mod rng;
