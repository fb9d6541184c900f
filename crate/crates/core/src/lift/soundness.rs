//! Independent re-check of a lifted trace against the model semantics.

use super::{Counterexample, StepKind, TraceNode};
use crate::lang::typed::{TAtomic, TProgKind, TypedModel};
use crate::relational::{Env, EvalError};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index into [`Counterexample::steps`], if the problem is with one step.
    pub step: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every way the trace fails to be an execution of the assertion's program
/// that starts in the precondition and ends outside the postcondition.
/// An empty result means the trace is sound.
pub fn check_soundness(model: &TypedModel, cx: &Counterexample) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut fail = |step: Option<usize>, message: String| out.push(Violation { step, message });
    let Some(a) = model.assertion(&cx.trace.assertion) else {
        fail(None, format!("unknown assertion `{}`", cx.trace.assertion));
        return out;
    };
    let u = &cx.universe;
    let last = cx.states.len().saturating_sub(1);
    if cx.states.is_empty() || cx.trace.snapshots.len() != cx.states.len() {
        fail(None, "snapshot count does not match state count".into());
        return out;
    }
    let root = cx.ctxs[0].frame.clone();
    match Env::new(u, &cx.states[0])
        .with_bindings(root.clone())
        .eval_formula(&a.pre)
    {
        Ok(true) => {}
        other => fail(None, format!("precondition does not hold initially ({other:?})")),
    }
    match Env::new(u, &cx.states[last]).with_bindings(root).eval_formula(&a.post) {
        Ok(false) => {}
        other => fail(None, format!("postcondition is not violated finally ({other:?})")),
    }

    let mut at = 0;
    let nodes = model.nodes();
    for (i, st) in cx.steps.iter().enumerate() {
        if st.pre != at {
            fail(
                Some(i),
                format!("starts in state {} but the previous step ended in {at}", st.pre),
            );
        }
        at = st.post;
        let kind = st.node.and_then(|n| nodes.get(&n)).map(|p| &p.kind);
        let frame = &cx.ctxs[st.ctx];
        match (st.kind, kind) {
            (StepKind::Stutter, _) => {
                if (st.pre..=st.post).any(|s| cx.states[s] != cx.states[st.pre]) {
                    fail(Some(i), "state changes during a stutter".into());
                }
            }
            (StepKind::Atomic, Some(TProgKind::Atomic(atomic))) => {
                if st.post != st.pre + 1 {
                    fail(Some(i), "atomic step does not advance exactly one state".into());
                    continue;
                }
                check_atomic(cx, atomic, st.ctx, st.pre, &mut |m| fail(Some(i), m));
            }
            (StepKind::Test | StepKind::LoopExit, Some(TProgKind::Test(f))) => {
                if st.post != st.pre {
                    fail(Some(i), "test changes the state".into());
                }
                let env = Env::new(u, &cx.states[st.pre]).with_bindings(frame.frame.clone());
                match eval(env, f) {
                    Ok(true) => {}
                    other => fail(Some(i), format!("test does not hold ({other:?})")),
                }
            }
            (k, _) => fail(Some(i), format!("{k:?} step does not match its program node")),
        }
    }
    if at != last {
        fail(
            None,
            format!("steps end in state {at}, the trace has {} states", cx.states.len()),
        );
    }
    check_tree(&cx.trace.tree, &mut fail);
    out
}

fn eval(mut env: Env<'_>, f: &crate::lang::typed::TFormula) -> Result<bool, EvalError> {
    env.eval_formula(f)
}

fn check_atomic(cx: &Counterexample, at: &TAtomic, ctx: usize, s: usize, fail: &mut impl FnMut(String)) {
    let frame = &cx.ctxs[ctx];
    let bindings: Vec<(String, String)> = if at.renaming.is_empty() {
        frame.frame.clone()
    } else {
        at.renaming
            .iter()
            .filter_map(|(p, a)| frame.symbol(a).map(|sym| (p.clone(), sym.to_string())))
            .collect()
    };
    let (pre, post) = (&cx.states[s], &cx.states[s + 1]);
    match eval(Env::new(&cx.universe, pre).with_bindings(bindings.clone()), &at.pre) {
        Ok(true) => {}
        other => fail(format!("precondition of the step does not hold ({other:?})")),
    }
    match eval(
        Env::new(&cx.universe, pre).with_post(post).with_bindings(bindings),
        &at.post,
    ) {
        Ok(true) => {}
        other => fail(format!("postcondition of the step does not hold ({other:?})")),
    }
    let modified: Vec<&str> = at.modifies.iter().filter_map(|m| frame.symbol(m)).collect();
    for sym in &cx.symbols {
        if !modified.contains(&sym.name.as_str()) && pre.get(&sym.name) != post.get(&sym.name) {
            fail(format!("`{}` changes but the step does not modify it", sym.name));
        }
    }
}

/// Interior nodes span exactly their children.
fn check_tree(n: &TraceNode, fail: &mut impl FnMut(Option<usize>, String)) {
    if n.pre > n.post {
        fail(None, format!("`{}` ends before it starts", n.label));
    }
    if let (Some(first), Some(last)) = (n.children.first(), n.children.last()) {
        if first.pre != n.pre || last.post != n.post {
            fail(
                None,
                format!(
                    "`{}` covers states {}..{} but its children cover {}..{}",
                    n.label, n.pre, n.post, first.pre, last.post
                ),
            );
        }
        for w in n.children.windows(2) {
            if w[0].post != w[1].pre {
                fail(None, format!("gap between children of `{}`", n.label));
            }
        }
    }
    for c in &n.children {
        check_tree(c, fail);
    }
}
