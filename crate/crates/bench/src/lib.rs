//! Shared helpers for the benchmark targets.

use mopbd::GridMap;
use std::path::PathBuf;

/// Load a fixture map from the workspace `maps/` directory.
pub fn fixture(name: &str) -> GridMap {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../maps")
        .join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    GridMap::parse(&text).expect("fixture parses")
}
