//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod brute;
pub mod gen;
pub mod interp;

use std::path::PathBuf;

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn read_model(name: &str) -> String {
    let p = models_dir().join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}
