//! Translation of an assertion into one boolean circuit over per-state
//! relation variables.
//!
//! The circuit is `pre(s0) && wf(s0) && run(s0 .. sN) && !post(sN)`, so a
//! satisfying assignment is a counterexample. Every state a program can
//! pass through gets its own copy of every mutable symbol; the number of
//! states is fixed up front from the program shape and the unroll bound.

pub mod circuit;
pub mod encode;
pub mod layout;
pub mod source_map;

pub use circuit::{Circuit, Gate, Node};
pub use encode::{Ctx, Encoder};
pub use layout::{Matrix, StateLayout, Symbol};
pub use source_map::{Detail, Entry, SourceMap, StarBlock, Tag};

use crate::lang::typed::{TAssertion, TypedModel};
use crate::relational::Universe;
use std::collections::BTreeMap;
use thiserror::Error;

/// User-chosen analysis bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Atoms per ordinary signature.
    pub scope: usize,
    /// Iterations per `*`.
    pub unroll: usize,
    pub bitwidth: u32,
    /// Per-signature scope overrides.
    pub scope_for: BTreeMap<String, usize>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            scope: 3,
            unroll: 3,
            bitwidth: 4,
            scope_for: BTreeMap::new(),
        }
    }
}

impl Bounds {
    pub fn new(scope: usize, unroll: usize, bitwidth: u32) -> Self {
        Bounds {
            scope,
            unroll,
            bitwidth,
            scope_for: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), TranslateError> {
        if self.scope < 1 {
            return Err(TranslateError::Config("scope must be at least 1".into()));
        }
        if self.unroll < 1 {
            return Err(TranslateError::Config("unroll must be at least 1".into()));
        }
        if !(1..=16).contains(&self.bitwidth) {
            return Err(TranslateError::Config("bitwidth must be between 1 and 16".into()));
        }
        if let Some((sig, _)) = self.scope_for.iter().find(|(_, &n)| n < 1) {
            return Err(TranslateError::Config(format!("scope for `{sig}` must be at least 1")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("no assertion named `{0}`")]
    UnknownAssertion(String),
    #[error("program `{0}` invokes itself; recursion is not supported")]
    Recursion(String),
    #[error("{0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemMeta {
    pub assertion: String,
    pub scope: usize,
    pub unroll: usize,
    pub bitwidth: u32,
}

/// A translated assertion, ready for CNF conversion.
#[derive(Clone, Debug)]
pub struct SatProblem {
    pub meta: ProblemMeta,
    pub universe: Universe,
    pub circuit: Circuit,
    pub root: Gate,
    pub layout: StateLayout,
    pub map: SourceMap,
    pub ctxs: Vec<Ctx>,
    /// Source-map entry of the assertion's program.
    pub program_entry: usize,
}

impl SatProblem {
    pub fn final_state(&self) -> usize {
        self.layout.states - 1
    }

    pub fn dump_circuit(&self) -> String {
        self.circuit.to_sexpr(self.root)
    }

    pub fn dump_map(&self) -> String {
        self.map.to_json()
    }
}

fn assertion<'m>(model: &'m TypedModel, name: &str) -> Result<&'m TAssertion, TranslateError> {
    model
        .assertion(name)
        .ok_or_else(|| TranslateError::UnknownAssertion(name.to_string()))
}

/// Builds the counterexample circuit for one assertion.
pub fn translate_assertion(model: &TypedModel, name: &str, bounds: &Bounds) -> Result<SatProblem, TranslateError> {
    let a = assertion(model, name)?;
    let mut enc = Encoder::new(model, a, bounds)?;
    let last = enc.layout.states - 1;
    let pre = enc.state_formula(&a.pre, 0);
    let wf = enc.well_formed_state(0);
    let (run, program_entry) = enc.program(&a.program, 0, 0);
    let post = enc.state_formula(&a.post, last);
    let not_post = enc.c.not(post);
    let root = enc.c.and([pre, wf, run, not_post]);
    Ok(SatProblem {
        meta: ProblemMeta {
            assertion: a.name.clone(),
            scope: bounds.scope,
            unroll: bounds.unroll,
            bitwidth: bounds.bitwidth,
        },
        universe: enc.universe,
        circuit: enc.c,
        root,
        layout: enc.layout,
        map: enc.map,
        ctxs: enc.ctxs,
        program_entry,
    })
}

/// Circuit satisfiable iff some execution from a state satisfying the
/// precondition runs some loop for the full unroll bound and could still
/// enter its body again.
pub fn translate_unroll_probe(
    model: &TypedModel,
    name: &str,
    bounds: &Bounds,
) -> Result<(Circuit, Gate), TranslateError> {
    let a = assertion(model, name)?;
    let mut enc = Encoder::new(model, a, bounds)?;
    let pre = enc.state_formula(&a.pre, 0);
    let wf = enc.well_formed_state(0);
    let reach = enc.reach(&a.program, 0, 0);
    let root = enc.c.and([pre, wf, reach]);
    Ok((enc.c, root))
}
