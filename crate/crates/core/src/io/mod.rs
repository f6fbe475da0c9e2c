//! Configuration, initial data, diagnostics output and checkpoints.

pub mod checkpoint;
pub mod config;
pub mod initial;
pub mod output;

pub use checkpoint::{checkpoint_read, checkpoint_resume, checkpoint_write};
pub use config::SolverConfig;
pub use initial::{make_initial_data, FieldKind, InitialData};
pub use output::{format_real, read_diagnostics, write_diagnostics, JsonLine};
