//! Configuration, experiment orchestration and report files for the
//! `sgslab` binary.

mod config;
mod output;
mod run;

pub use config::{
    parse_config, parse_str, validate, validate_row, BlochSpec, Check, CriteriaOptions, DislocationSpec,
    ExperimentSpec, GridSpec, Kind, ParamsSpec, ScaleSpec, SweepSpec,
};
pub use output::emit_report;
pub use run::{error_kind, run_experiment, BandRow, ProfilePoint, Provenance, Report, RowError, RowReport, SolveSummary};
