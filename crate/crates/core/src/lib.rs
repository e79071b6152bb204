//! Engine for visual parameter space analysis: run-table ingestion, the fixed
//! visualization design space, small-multiples layout, task-oriented
//! recommendations, crossfilter statistics and the dashboard document model.

mod names;

pub mod analytics;
pub mod dashboard;
pub mod data_model;
pub mod design_space;
pub mod exec;
pub mod fixture;
pub mod layout;
pub mod visrec;

pub use names::UnknownName;
