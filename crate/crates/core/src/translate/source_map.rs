//! Correspondence between circuit gates and program nodes.

use super::circuit::Gate;
use crate::lang::ast::Span;
use crate::lang::typed::NodeId;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Atomic,
    Test,
    Seq,
    Choice,
    Star,
    Invoke,
}

/// One iteration block of an unrolled `*`: either stop here (all remaining
/// states equal) or run the body once and continue with the next block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarBlock {
    /// State the block starts in.
    pub state: usize,
    /// The block's own disjunction (`exit` or `iterate`).
    pub gate: Gate,
    pub exit: Gate,
    /// `None` for the final block, which can only exit.
    pub iterate: Option<Gate>,
    /// Entry of the body encoded for this block.
    pub body: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Detail {
    None,
    /// `left`/`right` are the padded branch gates; `gate` of the entry is their disjunction.
    Choice {
        left: Gate,
        right: Gate,
        left_width: usize,
        right_width: usize,
    },
    Star {
        width: usize,
        blocks: Vec<StarBlock>,
    },
    Invoke {
        callee_ctx: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub node: NodeId,
    pub ctx: usize,
    pub span: Span,
    pub pre: usize,
    pub post: usize,
    pub gate: Gate,
    pub tag: Tag,
    pub children: Vec<usize>,
    pub detail: Detail,
}

#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    pub entries: Vec<Entry>,
    by_gate: HashMap<Gate, Vec<usize>>,
    by_node: HashMap<(NodeId, usize, usize), Vec<usize>>,
}

impl SourceMap {
    pub fn push(&mut self, e: Entry) -> usize {
        let i = self.entries.len();
        self.by_node.entry((e.node, e.ctx, e.pre)).or_default().push(i);
        self.entries.push(e);
        i
    }

    /// Fills in the gate of an entry reserved before its children were encoded.
    pub fn finish(&mut self, i: usize, gate: Gate, children: Vec<usize>, detail: Detail) {
        let e = &mut self.entries[i];
        e.gate = gate;
        e.children = children;
        e.detail = detail;
        self.by_gate.entry(gate).or_default().push(i);
    }

    /// Program entries whose gate is `g`.
    pub fn by_gate(&self, g: Gate) -> &[usize] {
        self.by_gate.get(&g).map_or(&[], |v| v.as_slice())
    }

    /// Entries for a program node in a context, starting at a state.
    pub fn by_node(&self, node: NodeId, ctx: usize, pre: usize) -> &[usize] {
        self.by_node.get(&(node, ctx, pre)).map_or(&[], |v| v.as_slice())
    }

    /// Whether `g` is a disjunction introduced for a choice or a loop block,
    /// rather than one coming from a formula.
    pub fn is_program_or(&self, g: Gate) -> bool {
        self.entries.iter().any(|e| match &e.detail {
            Detail::Choice { .. } => e.gate == g,
            Detail::Star { blocks, .. } => blocks.iter().any(|b| b.iterate.is_some() && b.gate == g),
            _ => false,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("source map serializes")
    }
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}
