//! Library side of the `bgm` command: argument types, config assembly, the
//! batch runner and the subcommand implementations. `main.rs` only parses
//! arguments and maps results to exit codes.

pub mod batch;
pub mod commands;
pub mod hash;

pub use batch::{run_augment, AugmentJob, AugmentSummary};
pub use commands::{cmd_augment, cmd_preview, cmd_verify, load_config, Cli, Command};
pub use hash::hash_tree;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Oracle divergence in `verify`, or an unexpected runtime failure.
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DATASET: i32 = 3;
    /// Some images could not be decoded and `--strict` was given.
    pub const STRICT: i32 = 4;
}
