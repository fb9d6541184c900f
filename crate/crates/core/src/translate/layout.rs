//! One matrix of leaf variables per (symbol, state).

use super::circuit::{Circuit, Gate};
use crate::lang::typed::{VarDecl, VarMult};
use crate::relational::{AtomId, Tuple, Universe};
use std::collections::BTreeMap;

/// Sparse boolean relation: absent tuples are false.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matrix {
    pub arity: usize,
    pub entries: BTreeMap<Tuple, Gate>,
}

impl Matrix {
    pub fn empty(arity: usize) -> Self {
        Matrix {
            arity,
            entries: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, tuples: impl IntoIterator<Item = Tuple>) -> Self {
        Matrix {
            arity,
            entries: tuples.into_iter().map(|t| (t, Gate::TRUE)).collect(),
        }
    }

    pub fn get(&self, t: &[AtomId]) -> Gate {
        self.entries.get(t).copied().unwrap_or(Gate::FALSE)
    }
}

/// A mutable relation tracked across states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    /// Name in the snapshot; unique across the layout.
    pub name: String,
    pub decl: VarDecl,
    /// Context the symbol was introduced in (0 for assertion parameters).
    pub ctx: usize,
    pub local: bool,
}

#[derive(Clone, Debug)]
pub struct StateLayout {
    pub symbols: Vec<Symbol>,
    pub states: usize,
    /// `vars[state][symbol]`
    vars: Vec<Vec<Matrix>>,
    /// Leaf variable number -> (symbol, state, tuple).
    leaves: Vec<(usize, usize, Tuple)>,
}

/// Every tuple a symbol of this declaration can hold.
pub fn candidate_tuples(u: &Universe, decl: &VarDecl) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = vec![Vec::new()];
    for col in &decl.cols {
        let atoms = u.col_atoms(col);
        out = out
            .iter()
            .flat_map(|p| atoms.iter().map(move |&a| [p.as_slice(), &[a]].concat()))
            .collect();
    }
    out
}

impl StateLayout {
    pub fn empty() -> Self {
        StateLayout {
            symbols: Vec::new(),
            states: 0,
            vars: Vec::new(),
            leaves: Vec::new(),
        }
    }

    /// Allocates leaf variables state by state, symbol by symbol, tuple by tuple.
    pub fn new(c: &mut Circuit, u: &Universe, symbols: Vec<Symbol>, states: usize) -> Self {
        assert_eq!(c.var_count(), 0, "layout must own the first leaf variables");
        let mut vars = Vec::with_capacity(states);
        let mut leaves = Vec::new();
        for s in 0..states {
            let mut row = Vec::with_capacity(symbols.len());
            for (i, sym) in symbols.iter().enumerate() {
                let mut m = Matrix::empty(sym.decl.arity());
                for t in candidate_tuples(u, &sym.decl) {
                    let g = c.new_var();
                    leaves.push((i, s, t.clone()));
                    m.entries.insert(t, g);
                }
                row.push(m);
            }
            vars.push(row);
        }
        StateLayout {
            symbols,
            states,
            vars,
            leaves,
        }
    }

    pub fn matrix(&self, symbol: usize, state: usize) -> &Matrix {
        &self.vars[state][symbol]
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn leaf(&self, var: u32) -> &(usize, usize, Tuple) {
        &self.leaves[var as usize]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Leaf variables of one state, in allocation order.
    pub fn state_leaves(&self, state: usize) -> impl Iterator<Item = (u32, &(usize, usize, Tuple))> {
        self.leaves
            .iter()
            .enumerate()
            .filter(move |(_, l)| l.1 == state)
            .map(|(i, l)| (i as u32, l))
    }

    pub fn mult(&self, symbol: usize) -> VarMult {
        self.symbols[symbol].decl.mult
    }
}
