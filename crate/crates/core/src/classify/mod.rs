//! Feature tables, random-forest classification, stratified
//! cross-validation and two-way ANOVA.

mod anova;
mod cv;
mod features;
mod forest;

pub use anova::{anova_two_way, f_survival, AnovaReport};
pub use cv::{cross_validate, stratified_folds, subject_folds, CvReport};
pub use features::{assemble_features, FeatureTable, WindowMetrics};
pub use forest::{train_forest, ForestConfig, TrainedForest, Tree};
