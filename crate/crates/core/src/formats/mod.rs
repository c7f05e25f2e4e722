//! On-disk formats: manifest JSONL, response CSV, analysis CSVs, fit JSON.

mod manifest;
mod responses;
mod tables;

pub use manifest::{DatasetManifest, ManifestRow, Split};
pub use responses::{Response, ResponseFile, ResponseRecord};
pub use tables::{
    cells_csv, dprime_csv, dprime_rows, read_cells, read_cells_csv, read_dprime, read_dprime_csv,
    slopes_csv, DPrimeRow, FitReport, SlopeRow, CELLS_HEADER, DPRIME_HEADER, SLOPES_HEADER,
};
