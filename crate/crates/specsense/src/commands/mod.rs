//! Command dispatch.

use std::path::Path;

use crate::config::CommandConfig;
use crate::manifest::{ManifestBuilder, RunManifest};
use crate::Result;

mod bandit_sim;
mod cost;
mod gen_data;
mod nas_search;
mod pd_curve;
mod roc;
mod selfcheck;
mod train;

/// Runs a loaded configuration, writing outputs plus a manifest into
/// `out_dir`. The effective configuration is itself an output, so a run
/// can be reproduced from its directory alone.
pub fn run(config: &CommandConfig, out_dir: &Path) -> Result<RunManifest> {
    let (name, seed) = (command_name(config), config.seed());
    let mut manifest = ManifestBuilder::new(name, seed, config, out_dir)?;
    let cfg_path = manifest.declare("effective-config.toml");
    std::fs::write(&cfg_path, config.to_toml()?)?;

    match config {
        CommandConfig::GenData(c) => gen_data::run(c, &mut manifest)?,
        CommandConfig::Train(c) => train::run(c, &mut manifest)?,
        CommandConfig::NasSearch(c) => nas_search::run(c, &mut manifest)?,
        CommandConfig::BanditSim(c) => bandit_sim::run(c, &mut manifest)?,
        CommandConfig::Roc(c) => roc::run(c, &mut manifest)?,
        CommandConfig::PdCurve(c) => pd_curve::run(c, &mut manifest)?,
        CommandConfig::Cost(c) => cost::run(c, &mut manifest)?,
        CommandConfig::Selfcheck(c) => selfcheck::run(c, &mut manifest)?,
    }
    manifest.finish()
}

fn command_name(config: &CommandConfig) -> &'static str {
    match config {
        CommandConfig::GenData(_) => "gen-data",
        CommandConfig::Train(_) => "train",
        CommandConfig::NasSearch(_) => "nas-search",
        CommandConfig::BanditSim(_) => "bandit-sim",
        CommandConfig::Roc(_) => "roc",
        CommandConfig::PdCurve(_) => "pd-curve",
        CommandConfig::Cost(_) => "cost",
        CommandConfig::Selfcheck(_) => "selfcheck",
    }
}
