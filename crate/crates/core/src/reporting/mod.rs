//! Result tables, comparisons and chart-ready data series.

mod charts;
mod compare;
mod table;

use thiserror::Error;

pub use charts::{available_series, chart_series, Series, SeriesPoint};
pub use compare::{compare_results, CellDiff, CompareReport, DEFAULT_TOLERANCE};
pub use table::{
    delay_csv, format_cell, mean_decimals, occupancy_csv, Cell, ResultsTable, TableFormat,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("table has no rows or no columns")]
    EmptyTable,
    #[error("table is not rectangular")]
    NotRectangular,
    #[error("tables differ in shape: {0}")]
    ShapeMismatch(String),
    #[error("unknown series {0:?}")]
    UnknownSeries(String),
    #[error("could not parse results: {0}")]
    Parse(String),
}

impl From<csv::Error> for ReportError {
    fn from(e: csv::Error) -> Self {
        ReportError::Parse(e.to_string())
    }
}

impl From<std::io::Error> for ReportError {
    fn from(e: std::io::Error) -> Self {
        ReportError::Parse(e.to_string())
    }
}
