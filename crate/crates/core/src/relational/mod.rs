//! Finite universes, tuple sets, and a direct evaluator.

pub mod eval;
pub mod tuples;
pub mod universe;

pub use eval::{instance_json, Env, EvalError, Instance, Value, ValueJson};
pub use tuples::{Tuple, TupleSet};
pub use universe::{build_universe, AtomId, Universe};
