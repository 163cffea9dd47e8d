//! Configuration files, diagnostics series and field snapshots.

mod config;
mod series;
mod snapshot;

pub use config::{
    load_config, parse_config, parse_number, InitialData, OutputConfig, Perturbation, RunConfig,
};
pub use series::{format_series, parse_series, read_series, write_series, SERIES_HEADER};
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot};
