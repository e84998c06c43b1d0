//! Lane-change decision style recognition.
//!
//! Decision points are summarized by three relative kinematic features
//! (Δd, Δv, Δa). Unlabeled samples are grouped into styles with grid
//! morphology ([`morphology::morph_cluster`]), and new samples are recognized
//! with KNN ([`knn::KnnModel`]) or with KNN restricted to the nearest k-means
//! sub-cluster of every style ([`kmcknn::KmcKnnModel`]).

pub mod ahc;
pub mod cli;
pub mod config;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod kmcknn;
pub mod kmeans;
pub mod knn;
mod metric;
pub mod morphology;

pub use error::{Error, Result};
pub use features::{Dataset, Extrema, FeatureVector, ScenarioFrame, StyleLabel};
pub use kmcknn::{KmcKnnModel, KmcKnnOptions};
pub use knn::{KnnModel, Recognition, VoteRule};
pub use morphology::{morph_cluster, MorphClustering, MorphParams};
