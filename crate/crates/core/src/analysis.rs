//! The end-to-end pipeline: translate, solve, lift, re-check.

use crate::lang::typed::TypedModel;
use crate::lift::{check_soundness, lift, Counterexample, LiftError, Violation};
use crate::sat::cdcl::{SolveResult, Solver};
use crate::sat::{leaf_values, solve_with, to_cnf, Backend, Cnf, ExternalSolverError};
use crate::translate::{translate_assertion, translate_unroll_probe, Bounds, SatProblem, TranslateError};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Solver(#[from] ExternalSolverError),
    #[error("could not lift the counterexample: {0}")]
    Lift(#[from] LiftError),
    #[error("lifted trace fails its own re-check: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Unsound(Vec<Violation>),
    #[error("analysis interrupted")]
    Interrupted,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub states: usize,
    pub gates: usize,
    pub primary_vars: u32,
    pub cnf_vars: u32,
    pub clauses: usize,
    /// Translation, CNF conversion, and lifting.
    pub translate: Duration,
    pub solve: Duration,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Valid,
    Counterexample(Box<Counterexample>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Counterexample(c) => Some(c),
            Verdict::Valid => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verdict: Verdict,
    pub stats: CheckStats,
}

/// Options beyond the bounds. `interrupt` only affects the embedded solver.
#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub backend: Backend,
    pub interrupt: Option<Arc<AtomicBool>>,
}

impl CheckOptions {
    pub fn with_backend(backend: Backend) -> Self {
        CheckOptions {
            backend,
            interrupt: None,
        }
    }
}

fn run(cnf: &Cnf, opts: &CheckOptions) -> Result<Option<Vec<bool>>, AnalysisError> {
    let result = match (&opts.backend, &opts.interrupt) {
        (Backend::Embedded, Some(flag)) => {
            let mut s = Solver::new(cnf);
            s.set_interrupt(flag.clone());
            let r = s.solve();
            if let SolveResult::Sat(m) = &r {
                assert!(cnf.satisfied_by(m), "solver produced a model that violates its clauses");
            }
            r
        }
        (backend, _) => solve_with(cnf, backend)?,
    };
    match result {
        SolveResult::Sat(m) => Ok(Some(m)),
        SolveResult::Unsat => Ok(None),
        SolveResult::Interrupted => Err(AnalysisError::Interrupted),
    }
}

/// Checks one assertion. A counterexample is lifted and re-checked
/// against the model before it is returned.
pub fn check(
    model: &TypedModel,
    assertion: &str,
    bounds: &Bounds,
    opts: &CheckOptions,
) -> Result<Report, AnalysisError> {
    let t0 = Instant::now();
    let problem = translate_assertion(model, assertion, bounds)?;
    let mut report = check_problem(model, &problem, opts)?;
    report.stats.translate = t0.elapsed().saturating_sub(report.stats.solve);
    Ok(report)
}

/// Solves an already translated assertion.
pub fn check_problem(model: &TypedModel, problem: &SatProblem, opts: &CheckOptions) -> Result<Report, AnalysisError> {
    let t0 = Instant::now();
    let cnf = to_cnf(&problem.circuit, problem.root);
    let translate = t0.elapsed();
    let t1 = Instant::now();
    let solved = run(&cnf, opts)?;
    let solve = t1.elapsed();
    let stats = CheckStats {
        states: problem.layout.states,
        gates: problem.circuit.len(),
        primary_vars: problem.circuit.var_count(),
        cnf_vars: cnf.num_vars,
        clauses: cnf.clauses.len(),
        translate,
        solve,
    };
    let verdict = match solved {
        None => Verdict::Valid,
        Some(m) => Verdict::Counterexample(Box::new(lift_checked(model, problem, &m)?)),
    };
    Ok(Report { verdict, stats })
}

fn lift_checked(model: &TypedModel, problem: &SatProblem, cnf_model: &[bool]) -> Result<Counterexample, AnalysisError> {
    let cx = lift(model, problem, &leaf_values(problem, cnf_model))?;
    let violations = check_soundness(model, &cx);
    if !violations.is_empty() {
        return Err(AnalysisError::Unsound(violations));
    }
    Ok(cx)
}

/// True when the unroll bound may be insufficient: some execution from the
/// precondition runs a loop for the full bound and could still take another
/// iteration. A `Valid` verdict then says nothing about longer runs.
pub fn check_unroll_sufficiency(
    model: &TypedModel,
    assertion: &str,
    bounds: &Bounds,
    opts: &CheckOptions,
) -> Result<bool, AnalysisError> {
    let (c, root) = translate_unroll_probe(model, assertion, bounds)?;
    Ok(run(&to_cnf(&c, root), opts)?.is_some())
}
