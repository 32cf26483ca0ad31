//! Experiment harness: JSON configuration, seeded Monte-Carlo sweeps over
//! random channels, aggregation and CSV output.

mod config;
mod output;
mod sweep;

pub use config::{dbm_to_watts, parse_eh_model, ExperimentConfig, InfeasiblePolicy, Scheme};
pub use output::{
    emit_csv, emit_summary_csv, parse_csv, sci, summarize, write_records, write_summary, SummaryRow, RECORD_HEADER,
    SUMMARY_HEADER,
};
pub use sweep::{run_sweep, worker_count, TradeoffRecord, MODE_FAILED, MODE_INAPPLICABLE, THREADS_ENV};
