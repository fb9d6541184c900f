//! Plain-text rendering of a counterexample.

use dynscope_core::lift::Snapshot;
use dynscope_core::{Counterexample, StepKind, TraceNode};
use std::collections::BTreeSet;
use std::io::{self, Write};

pub struct Painter {
    pub color: bool,
}

impl Painter {
    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn good(&self, s: &str) -> String {
        self.paint("1;32", s)
    }

    pub fn bad(&self, s: &str) -> String {
        self.paint("1;31", s)
    }

    pub fn warn(&self, s: &str) -> String {
        self.paint("1;33", s)
    }

    fn dim(&self, s: &str) -> String {
        self.paint("2", s)
    }
}

pub fn value(tuples: &[Vec<String>]) -> String {
    let items: Vec<String> = tuples.iter().map(|t| t.join("->")).collect();
    match items.as_slice() {
        [one] if tuples[0].len() == 1 => one.clone(),
        _ => format!("{{{}}}", items.join(", ")),
    }
}

fn changed(a: &Snapshot, b: &Snapshot) -> Vec<String> {
    b.iter()
        .filter(|(k, v)| a.get(*k) != Some(*v))
        .map(|(k, v)| format!("{k} = {}", value(v)))
        .collect()
}

pub fn trace(out: &mut dyn Write, cx: &Counterexample, p: &Painter) -> io::Result<()> {
    let t = &cx.trace;
    let locals: BTreeSet<&str> = cx.local_names().collect();
    writeln!(out, "counterexample to {}:", t.assertion)?;
    writeln!(out, "  initial state")?;
    for (k, v) in t.snapshots[0].iter().filter(|(k, _)| !locals.contains(k.as_str())) {
        writeln!(out, "    {k} = {}", value(v))?;
    }
    node(out, &t.tree, &t.snapshots, 1, p)?;
    let last = t.snapshots.len() - 1;
    writeln!(out, "  final state (s{last})")?;
    for (k, v) in t.snapshots[last].iter() {
        writeln!(out, "    {k} = {}", value(v))?;
    }
    Ok(())
}

fn node(out: &mut dyn Write, n: &TraceNode, snaps: &[Snapshot], depth: usize, p: &Painter) -> io::Result<()> {
    let pad = "  ".repeat(depth);
    let states = if n.pre == n.post {
        format!("s{}", n.pre)
    } else {
        format!("s{}..s{}", n.pre, n.post)
    };
    match n.kind {
        StepKind::Call | StepKind::LoopIteration => {
            let kind = if n.kind == StepKind::Call { "call" } else { "iteration" };
            writeln!(out, "{pad}{kind} {}  {}", n.label, p.dim(&states))?;
            for c in &n.children {
                node(out, c, snaps, depth + 1, p)?;
            }
        }
        StepKind::CallReturn => writeln!(out, "{pad}return  {}", p.dim(&states))?,
        StepKind::Atomic => {
            let diff = changed(&snaps[n.pre], &snaps[n.post]);
            let effect = if diff.is_empty() {
                "no change".to_string()
            } else {
                diff.join(", ")
            };
            writeln!(out, "{pad}{}  {}  {}", n.label, p.dim(&states), effect)?;
        }
        StepKind::Test | StepKind::LoopExit => writeln!(out, "{pad}{}  {}", n.label, p.dim(&states))?,
        StepKind::Stutter => writeln!(out, "{pad}{}", p.dim(&format!("(unchanged {states})")))?,
    }
    Ok(())
}
