//! Counterexample lifting: from a satisfying assignment back to a tree of
//! source-level steps over decoded states.

mod soundness;
mod watch;

pub use soundness::{check_soundness, Violation};
pub use watch::{evaluate_watch, WatchError, WatchResult};

use crate::lang::ast::Span;
use crate::lang::typed::{NodeId, Role, TProgKind, TypedModel};
use crate::relational::{instance_json, Instance, Universe};
use crate::sat::decode::{decode, InconsistentModel};
use crate::translate::{Ctx, Detail, SatProblem, Symbol, Tag};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Atomic,
    Test,
    Call,
    CallReturn,
    LoopIteration,
    LoopExit,
    /// States carried over unchanged: padding after a shorter branch, or
    /// the tail of a loop that stopped before its bound.
    Stutter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub kind: StepKind,
    pub label: String,
    pub span: [usize; 2],
    pub pre: usize,
    pub post: usize,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    fn leaf(kind: StepKind, label: impl Into<String>, span: Span, pre: usize, post: usize) -> Self {
        TraceNode {
            kind,
            label: label.into(),
            span: [span.start, span.end],
            pre,
            post,
            children: Vec::new(),
        }
    }

    /// Pre-order walk.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a TraceNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn leaves(&self) -> Vec<&TraceNode> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if n.children.is_empty() {
                out.push(n);
            }
        });
        out
    }
}

pub type Snapshot = BTreeMap<String, Vec<Vec<String>>>;

/// The serialized form of a counterexample. Field order is the JSON key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub assertion: String,
    pub scope: usize,
    pub unroll: usize,
    pub bitwidth: u32,
    pub snapshots: Vec<Snapshot>,
    pub tree: TraceNode,
}

impl TraceJson {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A step of the trace that re-checks against the model: which node, in
/// which call context, between which states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRef {
    pub kind: StepKind,
    pub node: Option<NodeId>,
    pub ctx: usize,
    pub pre: usize,
    pub post: usize,
}

/// A lifted counterexample with everything needed to re-check it and to
/// evaluate watches against it.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub trace: TraceJson,
    pub states: Vec<Instance>,
    pub universe: Universe,
    pub symbols: Vec<Symbol>,
    pub ctxs: Vec<Ctx>,
    /// Leaf steps in trace order.
    pub steps: Vec<StepRef>,
}

impl Counterexample {
    /// First state in which each local symbol holds a value written by the
    /// program. Before that its value is whatever the solver picked.
    pub fn first_write(&self, model: &TypedModel) -> HashMap<String, usize> {
        let nodes = model.nodes();
        let mut out = HashMap::new();
        for st in &self.steps {
            let Some(TProgKind::Atomic(at)) = st.node.and_then(|n| nodes.get(&n)).map(|p| &p.kind) else {
                continue;
            };
            for m in &at.modifies {
                if let Some(sym) = self.ctxs[st.ctx].symbol(m) {
                    out.entry(sym.to_string()).or_insert(st.post);
                }
            }
        }
        out
    }

    pub fn local_names(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().filter(|s| s.local).map(|s| s.name.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error(transparent)]
    Inconsistent(#[from] InconsistentModel),
    #[error("no branch of `{label}` holds in the model")]
    NoPath { label: String },
}

struct Lifter<'a> {
    problem: &'a SatProblem,
    values: Vec<bool>,
    nodes: HashMap<NodeId, &'a crate::lang::typed::TProg>,
    steps: Vec<StepRef>,
}

/// Lifts a satisfying leaf assignment of `problem` into a trace.
pub fn lift(model: &TypedModel, problem: &SatProblem, leaves: &[bool]) -> Result<Counterexample, LiftError> {
    let states = decode(problem, leaves)?;
    let mut l = Lifter {
        problem,
        values: problem.circuit.evaluate(leaves),
        nodes: model.nodes(),
        steps: Vec::new(),
    };
    let entry = &problem.map.entries[problem.program_entry];
    let a = model
        .assertion(&problem.meta.assertion)
        .expect("problem assertion exists");
    let tree = if entry.tag == Tag::Invoke {
        let mut out = Vec::new();
        l.walk(problem.program_entry, &mut out)?;
        out.pop().expect("invoke yields one node")
    } else {
        let mut children = Vec::new();
        l.walk(problem.program_entry, &mut children)?;
        let last = problem.final_state();
        children.push(TraceNode::leaf(
            StepKind::CallReturn,
            "return",
            a.program.span,
            last,
            last,
        ));
        TraceNode {
            kind: StepKind::Call,
            label: a.name.clone(),
            span: [a.program.span.start, a.program.span.end],
            pre: 0,
            post: last,
            children,
        }
    };
    let snapshots = states.iter().map(|s| instance_json(s, &problem.universe)).collect();
    Ok(Counterexample {
        trace: TraceJson {
            assertion: problem.meta.assertion.clone(),
            scope: problem.meta.scope,
            unroll: problem.meta.unroll,
            bitwidth: problem.meta.bitwidth,
            snapshots,
            tree,
        },
        states,
        universe: problem.universe.clone(),
        symbols: problem.layout.symbols.clone(),
        ctxs: problem.ctxs.clone(),
        steps: l.steps,
    })
}

impl Lifter<'_> {
    fn holds(&self, g: crate::translate::Gate) -> bool {
        self.values[g.index()]
    }

    fn label(&self, node: NodeId) -> &str {
        self.nodes.get(&node).map_or("", |p| p.label.as_str())
    }

    fn stutter(&mut self, out: &mut Vec<TraceNode>, span: Span, ctx: usize, pre: usize, post: usize) {
        if pre < post {
            out.push(TraceNode::leaf(StepKind::Stutter, "no change", span, pre, post));
            self.steps.push(StepRef {
                kind: StepKind::Stutter,
                node: None,
                ctx,
                pre,
                post,
            });
        }
    }

    fn walk(&mut self, i: usize, out: &mut Vec<TraceNode>) -> Result<(), LiftError> {
        let e = &self.problem.map.entries[i];
        let label = self.label(e.node).to_string();
        match (&e.tag, &e.detail) {
            (Tag::Atomic | Tag::Test, _) => {
                let kind = match (e.tag, self.nodes.get(&e.node).map(|p| p.role)) {
                    (Tag::Atomic, _) => StepKind::Atomic,
                    (_, Some(Role::LoopExit)) => StepKind::LoopExit,
                    _ => StepKind::Test,
                };
                out.push(TraceNode::leaf(kind, label, e.span, e.pre, e.post));
                self.steps.push(StepRef {
                    kind,
                    node: Some(e.node),
                    ctx: e.ctx,
                    pre: e.pre,
                    post: e.post,
                });
            }
            (Tag::Seq, _) => {
                let (a, b) = (e.children[0], e.children[1]);
                self.walk(a, out)?;
                self.walk(b, out)?;
            }
            (Tag::Choice, Detail::Choice { left, right, .. }) => {
                let child = if self.holds(*left) {
                    e.children[0]
                } else if self.holds(*right) {
                    e.children[1]
                } else {
                    return Err(LiftError::NoPath { label });
                };
                self.walk(child, out)?;
                let end = self.problem.map.entries[child].post;
                self.stutter(out, e.span, e.ctx, end, e.post);
            }
            (Tag::Star, Detail::Star { width, blocks }) => {
                for b in blocks {
                    if self.holds(b.exit) {
                        self.stutter(out, e.span, e.ctx, b.state, e.post);
                        return Ok(());
                    }
                    match (b.iterate, b.body) {
                        (Some(it), Some(body)) if self.holds(it) => {
                            let mut children = Vec::new();
                            self.walk(body, &mut children)?;
                            out.push(TraceNode {
                                kind: StepKind::LoopIteration,
                                label: label.clone(),
                                span: [e.span.start, e.span.end],
                                pre: b.state,
                                post: b.state + width,
                                children,
                            });
                        }
                        _ => return Err(LiftError::NoPath { label }),
                    }
                }
                return Err(LiftError::NoPath { label });
            }
            (Tag::Invoke, _) => {
                let mut children = Vec::new();
                self.walk(e.children[0], &mut children)?;
                children.push(TraceNode::leaf(StepKind::CallReturn, "return", e.span, e.post, e.post));
                out.push(TraceNode {
                    kind: StepKind::Call,
                    label,
                    span: [e.span.start, e.span.end],
                    pre: e.pre,
                    post: e.post,
                    children,
                });
            }
            (tag, detail) => unreachable!("source map entry {tag:?} with detail {detail:?}"),
        }
        Ok(())
    }
}
