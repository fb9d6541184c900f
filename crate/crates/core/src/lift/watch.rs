//! Watch expressions evaluated against one snapshot of a trace.

use super::Counterexample;
use crate::lang::parser::parse_watch;
use crate::lang::resolve::resolve_watch;
use crate::lang::typed::{TypedModel, VarDecl};
use crate::lang::{ResolveError, SyntaxError};
use crate::relational::{Env, EvalError, ValueJson};
use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WatchError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("step out of range: {step} (the trace has {len} snapshots)")]
    StepOutOfRange { step: usize, len: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WatchResult {
    pub value: ValueJson,
    /// Locals the expression mentions that the program has not yet written
    /// at this step; their values are arbitrary.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub uninitialized: Vec<String>,
}

/// Evaluates `text` in snapshot `step`. Names are snapshot symbol names;
/// atoms can be written by name (`Node0`).
pub fn evaluate_watch(
    model: &TypedModel,
    cx: &Counterexample,
    step: usize,
    text: &str,
) -> Result<WatchResult, WatchError> {
    let state = cx.states.get(step).ok_or(WatchError::StepOutOfRange {
        step,
        len: cx.states.len(),
    })?;
    let term = parse_watch(text)?;
    let vars: Vec<VarDecl> = cx
        .symbols
        .iter()
        .map(|s| VarDecl {
            name: s.name.clone(),
            ..s.decl.clone()
        })
        .collect();
    let resolved = resolve_watch(model, &vars, &term)?;
    let value = Env::new(&cx.universe, state)
        .eval_value(&resolved)?
        .to_json(&cx.universe);
    let written = cx.first_write(model);
    let idents: Vec<&str> = text
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '$'))
        .collect();
    let mut uninitialized: Vec<String> = cx
        .local_names()
        .filter(|l| idents.contains(l) && written.get(*l).is_none_or(|&w| w > step))
        .map(str::to_string)
        .collect();
    uninitialized.dedup();
    Ok(WatchResult { value, uninitialized })
}
