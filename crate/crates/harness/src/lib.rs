//! Experiment drivers, edge-list ingestion and result persistence for the
//! `nbloc` command-line tool.

pub mod config;
pub mod error;
pub mod experiments;
pub mod ingest;
pub mod output;
pub mod pipeline;

pub use config::{sample_seed, ConfigPatch, ExperimentConfig, ExperimentId, GridPoint};
pub use error::{HarnessError, Result};
pub use experiments::{
    run, run_fig3, run_fig4, run_real_ipr, run_rewire_scan, solve_params, worker_pool,
};
pub use ingest::{ingest_edge_list, parse_edge_list, write_edge_list, EdgeList, IngestOptions};
pub use output::{emit, ExperimentOutput, ResultRecord};
