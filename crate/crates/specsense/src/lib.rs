//! Reproducible experiment runner over the spectrum-sensing crates.
//!
//! Every command is driven by a TOML configuration (or a named preset),
//! a master seed, and an output directory; repeated runs with identical
//! inputs produce byte-identical output files. Each run emits its
//! effective configuration, the declared CSV/binary outputs, and a
//! manifest with content digests.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod error;
pub mod manifest;
pub mod presets;

pub use config::{load_config, CommandConfig, CommandKind};
pub use error::CliError;
pub use manifest::RunManifest;

pub type Result<T> = std::result::Result<T, CliError>;
