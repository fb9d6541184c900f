//! Hash-consed boolean circuits.
//!
//! Gates are numbered densely in creation order, and a gate's inputs always
//! have smaller numbers, so the node table is already topologically sorted.

use std::collections::HashMap;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gate(pub u32);

impl Gate {
    pub const FALSE: Gate = Gate(0);
    pub const TRUE: Gate = Gate(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(bool),
    /// Leaf variable, numbered from 0 in allocation order.
    Var(u32),
    Not(Gate),
    And(Vec<Gate>),
    Or(Vec<Gate>),
}

#[derive(Clone, Debug)]
pub struct Circuit {
    nodes: Vec<Node>,
    table: HashMap<Node, Gate>,
    vars: u32,
}

impl Default for Circuit {
    fn default() -> Self {
        Self::new()
    }
}

impl Circuit {
    pub fn new() -> Self {
        let mut c = Circuit {
            nodes: Vec::new(),
            table: HashMap::new(),
            vars: 0,
        };
        c.intern(Node::Const(false));
        c.intern(Node::Const(true));
        c
    }

    fn intern(&mut self, n: Node) -> Gate {
        if let Some(&g) = self.table.get(&n) {
            return g;
        }
        let g = Gate(self.nodes.len() as u32);
        self.nodes.push(n.clone());
        self.table.insert(n, g);
        g
    }

    pub fn node(&self, g: Gate) -> &Node {
        &self.nodes[g.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn var_count(&self) -> u32 {
        self.vars
    }

    pub fn constant(&self, b: bool) -> Gate {
        if b {
            Gate::TRUE
        } else {
            Gate::FALSE
        }
    }

    pub fn new_var(&mut self) -> Gate {
        let v = self.vars;
        self.vars += 1;
        self.intern(Node::Var(v))
    }

    pub fn not(&mut self, a: Gate) -> Gate {
        match self.node(a) {
            Node::Const(b) => self.constant(!b),
            Node::Not(inner) => *inner,
            _ => self.intern(Node::Not(a)),
        }
    }

    pub fn and(&mut self, inputs: impl IntoIterator<Item = Gate>) -> Gate {
        self.nary(inputs, true)
    }

    pub fn or(&mut self, inputs: impl IntoIterator<Item = Gate>) -> Gate {
        self.nary(inputs, false)
    }

    pub fn and2(&mut self, a: Gate, b: Gate) -> Gate {
        self.and([a, b])
    }

    pub fn or2(&mut self, a: Gate, b: Gate) -> Gate {
        self.or([a, b])
    }

    pub fn implies(&mut self, a: Gate, b: Gate) -> Gate {
        let na = self.not(a);
        self.or2(na, b)
    }

    pub fn iff(&mut self, a: Gate, b: Gate) -> Gate {
        if a == b {
            return Gate::TRUE;
        }
        let x = self.xor(a, b);
        self.not(x)
    }

    pub fn xor(&mut self, a: Gate, b: Gate) -> Gate {
        let (na, nb) = (self.not(a), self.not(b));
        let l = self.and2(a, nb);
        let r = self.and2(na, b);
        self.or2(l, r)
    }

    pub fn ite(&mut self, c: Gate, t: Gate, e: Gate) -> Gate {
        let nc = self.not(c);
        let l = self.and2(c, t);
        let r = self.and2(nc, e);
        self.or2(l, r)
    }

    /// `and` when `is_and`, else `or`; flattens nested gates of the same
    /// kind, drops identities, and short-circuits on absorbing constants or
    /// complementary inputs.
    fn nary(&mut self, inputs: impl IntoIterator<Item = Gate>, is_and: bool) -> Gate {
        let (unit, zero) = if is_and {
            (Gate::TRUE, Gate::FALSE)
        } else {
            (Gate::FALSE, Gate::TRUE)
        };
        let mut flat: Vec<Gate> = Vec::new();
        for g in inputs {
            if g == unit {
                continue;
            }
            if g == zero {
                return zero;
            }
            match (&self.nodes[g.index()], is_and) {
                (Node::And(xs), true) | (Node::Or(xs), false) => flat.extend(xs.iter().copied()),
                _ => flat.push(g),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        for &g in &flat {
            if let Node::Not(inner) = self.nodes[g.index()] {
                if flat.binary_search(&inner).is_ok() {
                    return zero;
                }
            }
        }
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ if is_and => self.intern(Node::And(flat)),
            _ => self.intern(Node::Or(flat)),
        }
    }

    /// A fresh binary disjunction that is never folded or shared, so a
    /// program-level choice always owns exactly one gate.
    pub fn choice_or(&mut self, a: Gate, b: Gate) -> Gate {
        let g = Gate(self.nodes.len() as u32);
        self.nodes.push(Node::Or(vec![a, b]));
        g
    }

    /// Values of every gate under the given leaf assignment.
    pub fn evaluate(&self, leaves: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            v[i] = match n {
                Node::Const(b) => *b,
                Node::Var(x) => leaves[*x as usize],
                Node::Not(a) => !v[a.index()],
                Node::And(xs) => xs.iter().all(|g| v[g.index()]),
                Node::Or(xs) => xs.iter().any(|g| v[g.index()]),
            };
        }
        v
    }

    /// Gates reachable from `root`, in increasing order.
    pub fn cone(&self, root: Gate) -> Vec<Gate> {
        let mut seen = vec![false; self.nodes.len()];
        seen[root.index()] = true;
        for i in (0..=root.index()).rev() {
            if !seen[i] {
                continue;
            }
            match &self.nodes[i] {
                Node::Not(a) => seen[a.index()] = true,
                Node::And(xs) | Node::Or(xs) => xs.iter().for_each(|g| seen[g.index()] = true),
                _ => {}
            }
        }
        (0..self.nodes.len())
            .filter(|&i| seen[i])
            .map(|i| Gate(i as u32))
            .collect()
    }

    /// Stable s-expression listing of the cone of `root`, one gate per line.
    pub fn to_sexpr(&self, root: Gate) -> String {
        let mut out = String::new();
        for g in self.cone(root) {
            let _ = write!(out, "(g{} ", g.0);
            match &self.nodes[g.index()] {
                Node::Const(b) => out.push_str(if *b { "true" } else { "false" }),
                Node::Var(x) => {
                    let _ = write!(out, "(var {x})");
                }
                Node::Not(a) => {
                    let _ = write!(out, "(not g{})", a.0);
                }
                Node::And(xs) | Node::Or(xs) => {
                    let op = if matches!(self.nodes[g.index()], Node::And(_)) {
                        "and"
                    } else {
                        "or"
                    };
                    out.push('(');
                    out.push_str(op);
                    for x in xs {
                        let _ = write!(out, " g{}", x.0);
                    }
                    out.push(')');
                }
            }
            out.push_str(")\n");
        }
        let _ = writeln!(out, "(root g{})", root.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_consing_shares_structure() {
        let mut c = Circuit::new();
        let (x, y) = (c.new_var(), c.new_var());
        assert_eq!(c.and2(x, y), c.and2(y, x));
        let nx = c.not(x);
        assert_eq!(c.and2(x, nx), Gate::FALSE);
        assert_eq!(c.or2(x, nx), Gate::TRUE);
        assert_eq!(c.not(nx), x);
    }

    #[test]
    fn choice_gates_are_never_shared() {
        let mut c = Circuit::new();
        let a = c.choice_or(Gate::TRUE, Gate::TRUE);
        let b = c.choice_or(Gate::TRUE, Gate::TRUE);
        assert_ne!(a, b);
        assert!(c.evaluate(&[])[a.index()]);
    }

    #[test]
    fn evaluation_follows_the_gates() {
        let mut c = Circuit::new();
        let (x, y) = (c.new_var(), c.new_var());
        let g = c.xor(x, y);
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(c.evaluate(&[a, b])[g.index()], a != b);
        }
    }
}
