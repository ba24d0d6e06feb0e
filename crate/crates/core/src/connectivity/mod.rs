//! Pairwise synchronization between channel (or coefficient) rows: phase lag
//! index over Hilbert phases, and cross-plot transition entropy over polar
//! grid states.

mod cpte;
mod matrix;
mod phase;

pub use cpte::{cpte, crossplot_states, transition_distribution, CrossPlotGrid, StateSequence, TransitionDistribution};
pub use matrix::{connectivity_matrix, windowed_connectivity, ConnectivityMatrix, Method, Provenance};
pub use phase::{analytic_phase, lag_sign, pli, PhaseExtractor, PhaseSeries};
