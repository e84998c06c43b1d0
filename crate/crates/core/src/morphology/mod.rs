//! Binary morphology on 3-D grids and the grid-based clustering built on it.

mod cluster;
mod components;
mod volume;

pub use cluster::{morph_cluster, rasterize, AssignSpace, MorphClustering, MorphParams};
pub use components::{label_components, Components, Connectivity};
pub use volume::{dilate, erode, BinaryVolume, SphericalKernel};
