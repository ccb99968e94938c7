//! Dataset ingestion, run reports and plot-data files.

mod dataset;
mod plot;
mod report;

pub use dataset::{load_dataset, parse_dataset};
pub use plot::{emit_plot, plot_text};
pub use report::{Outcome, RunReport, StageTiming};
