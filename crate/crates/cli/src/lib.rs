//! File formats, reports and the end-to-end driver around `divsel-core`.

pub mod config;
pub mod formats;
pub mod report;
pub mod synth;
pub mod workflow;

pub use config::RunConfig;
pub use workflow::{cmd_run, compare_corpus, compare_matrices, execute_run};
