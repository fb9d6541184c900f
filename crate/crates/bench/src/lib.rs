//! Benchmark fixtures for the checker.

use dynscope_core::{load, TypedModel};
use std::path::PathBuf;

pub const ASSERTION: &str = "removeLastCorrect";

/// Loads a model from the workspace `models/` directory.
pub fn model(name: &str) -> TypedModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name);
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    load(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
