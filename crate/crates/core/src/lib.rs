//! Working-memory EEG functional connectivity.
//!
//! The pipeline runs bandpass filtering, average re-referencing and epoching
//! ([`preprocess`], [`signal_io`]), optional spherical/head harmonic
//! projection ([`harmonics`]), pairwise PLI or cross-plot transition entropy
//! per sliding window ([`connectivity`]), Min-Max normalization, threshold
//! binarization and node metrics ([`network`]), and random-forest
//! classification with stratified cross-validation ([`classify`]).
//! [`synth`] produces seeded coupled-oscillator cohorts and [`pipeline`]
//! orchestrates threshold × metric × stage sweeps.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod classify;
pub mod connectivity;
pub mod error;
pub mod harmonics;
pub mod matrix;
pub mod network;
pub mod pipeline;
pub mod preprocess;
mod scalar;
mod seed;
pub mod signal_io;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Real;
pub use signal_io::{GroupLabel, StageTag};

pub type Recording64 = signal_io::Recording<f64>;
pub type Recording32 = signal_io::Recording<f32>;
pub type Epoch64 = signal_io::Epoch<f64>;
pub type Epoch32 = signal_io::Epoch<f32>;
pub type Window64 = preprocess::Window<f64>;
pub type Window32 = preprocess::Window<f32>;
pub type HarmonicBasis64 = harmonics::HarmonicBasis<f64>;
pub type HarmonicBasis32 = harmonics::HarmonicBasis<f32>;
pub type CoefficientSeries64 = harmonics::CoefficientSeries<f64>;
pub type CoefficientSeries32 = harmonics::CoefficientSeries<f32>;
pub type ConnectivityMatrix64 = connectivity::ConnectivityMatrix<f64>;
pub type ConnectivityMatrix32 = connectivity::ConnectivityMatrix<f32>;
pub type Nom64 = network::Nom<f64>;
pub type Nom32 = network::Nom<f32>;
pub type NodeMetrics64 = network::NodeMetrics<f64>;
pub type NodeMetrics32 = network::NodeMetrics<f32>;
pub type FeatureTable64 = classify::FeatureTable<f64>;
pub type FeatureTable32 = classify::FeatureTable<f32>;
pub type TrainedForest64 = classify::TrainedForest<f64>;
pub type TrainedForest32 = classify::TrainedForest<f32>;
