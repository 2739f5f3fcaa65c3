//! Shared fixtures for the `counting` benchmarks.

use std::path::PathBuf;

use nivat_core::verifier::load_config;
use nivat_core::Configuration;

/// Loads `corpus/<name>` from the workspace root.
pub fn corpus(name: &str) -> Configuration {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
