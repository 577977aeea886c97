//! Experiment driver for `reachlab-core`: JSON configs, CSV/JSON outputs
//! with provenance headers, and a rayon-backed executor whose results do
//! not depend on the thread count.

pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod grid;
pub mod output;

use std::collections::HashSet;

pub use commands::Outcome;
pub use config::{Command, ExperimentConfig, ShapeSpec};
pub use error::CliError;
pub use exec::Pool;

/// Runs `cfg` on a pool of `threads` workers (see [`exec::resolve_threads`])
/// and writes the declared outputs atomically. On any error no file is
/// written.
pub fn execute(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Outcome, CliError> {
    let pool = Pool::new(exec::resolve_threads(threads.or(cfg.threads)));
    let outcome = commands::run(cfg, &pool)?;
    let mut seen = HashSet::new();
    for o in &outcome.outputs {
        if !seen.insert(o.path.clone()) {
            return Err(CliError::Validation(format!("output {} declared twice", o.path.display())));
        }
    }
    for o in &outcome.outputs {
        output::write_atomic(&o.path, &o.bytes)?;
    }
    Ok(outcome)
}
