//! Bounded verification of relational programs.
//!
//! A model declares signatures, atomic actions given by pre/post
//! conditions, composite programs, and partial-correctness assertions.
//! [`check`] translates one assertion into a boolean circuit over a finite
//! universe and a fixed number of loop iterations, solves it, and lifts any
//! satisfying assignment back into a [`TraceJson`] tree of source-level
//! steps with a snapshot of every state.
//!
//! ```
//! let src = "sig A {}
//!     action flip[x: A, y: A] { pre { true } post { x' = y and y' = x } }
//!     assertCorrectness swaps[x: A, y: A] {
//!         pre { x != y } program { flip[x, y] } post { x != y } }";
//! let model = dynscope_core::load(src).unwrap();
//! let report = dynscope_core::check(&model, "swaps", &Default::default(), &Default::default()).unwrap();
//! assert!(report.verdict.is_valid());
//! ```

pub mod analysis;
pub mod lang;
pub mod lift;
pub mod relational;
pub mod sat;
pub mod translate;

pub use analysis::{
    check, check_problem, check_unroll_sufficiency, AnalysisError, CheckOptions, CheckStats, Report, Verdict,
};
pub use lang::typed::TypedModel;
pub use lang::{load, ModelError, ResolveError, SyntaxError};
pub use lift::{
    check_soundness, evaluate_watch, Counterexample, StepKind, TraceJson, TraceNode, WatchError, WatchResult,
};
pub use relational::{Value, ValueJson};
pub use sat::Backend;
pub use translate::{translate_assertion, Bounds, SatProblem, TranslateError};
