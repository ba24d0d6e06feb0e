//! Bandpass filtering, average re-referencing and sliding-window segmentation.

mod filter;
mod reference;
mod window;

pub use filter::{apply_zero_phase, design_bandpass, filter_recording, BandpassSpec, FilterSections, Section};
pub use reference::average_reference;
pub use window::{slide_windows, window_offsets, Window, WindowPlan};
