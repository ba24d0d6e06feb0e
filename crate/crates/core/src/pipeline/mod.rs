//! Configuration-driven sweeps over stage × threshold × metric, group mean
//! NOMs and heatmap rendering.

mod config;
mod nom_io;
mod render;
mod run;
mod source;

pub use config::{parse_threshold_sweep, FeatureKind, PipelineConfig, Precision};
pub use nom_io::{aggregate_group_nom, nom_from_csv, nom_to_csv, NomAccumulator};
pub use render::{heatmap_pgm, heatmap_svg, parse_pgm, render_heatmap};
pub use run::{run_pipeline, run_with_source, PipelineOutput, SweepResult, SweepRow};
pub use source::{ManifestSource, Subject, SubjectSource, SyntheticSource};
