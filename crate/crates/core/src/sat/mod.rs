//! CNF conversion, solving, and decoding of models into instances.

pub mod cdcl;
pub mod cnf;
pub mod decode;
pub mod dimacs;

pub use cdcl::{solve, SolveResult};
pub use cnf::{to_cnf, Cnf};
pub use decode::{decode, leaf_values, InconsistentModel};
pub use dimacs::{solve_external, ExternalSolverError};

use std::path::PathBuf;

/// Which solver to run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Embedded,
    /// An executable taking a DIMACS file path and printing competition output.
    Dimacs(PathBuf),
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "embedded" => Ok(Backend::Embedded),
            _ => match s.strip_prefix("dimacs:") {
                Some(exe) if !exe.is_empty() => Ok(Backend::Dimacs(PathBuf::from(exe))),
                _ => Err(format!("unknown solver `{s}`; expected `embedded` or `dimacs:<exe>`")),
            },
        }
    }
}

pub fn solve_with(cnf: &Cnf, backend: &Backend) -> Result<SolveResult, ExternalSolverError> {
    match backend {
        Backend::Embedded => Ok(solve(cnf)),
        Backend::Dimacs(exe) => solve_external(cnf, exe),
    }
}
