//! Run configuration, experiment drivers and output files.
//!
//! Every driver writes CSV data plus a JSON sidecar that echoes the full
//! configuration, so any output can be regenerated from its sidecar alone.

mod config;
mod output;
mod runs;

pub use config::{
    parse_config, parse_config_with_overrides, BosonPreparation, Reduction, RunConfig, SweepConfig, SweepParam, KEYS,
};
pub use output::{fmt_float, write_atomic, CsvTable, CODE_VERSION};
pub use runs::{
    compute_max_scan, default_spectrum_grid, run_evolution, run_max_scan, run_spectrum_scan, run_trace_sweep, simulate,
    simulate_with, spectrum_csv, EvolutionTrace, MaxScan, MaxScanRow, SweepPoint, TraceRecord, TraceSummary,
    DOMINANCE_TOL,
};
