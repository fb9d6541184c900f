//! Tseitin conversion of a circuit cone into CNF.

use crate::translate::{Circuit, Gate, Node};
use std::fmt::Write;

/// Clauses over variables `1..=num_vars`, DIMACS-style signed literals.
/// Variables `1..=leaf_vars` are the circuit's leaf variables in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub leaf_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Self {
        Cnf {
            num_vars,
            leaf_vars: num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn add(&mut self, clause: Vec<i32>) {
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(clause);
    }

    /// Whether `model` (indexed by variable - 1) satisfies every clause.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Equisatisfiable CNF for `root`: one auxiliary variable per `and`/`or`
/// gate in the cone, defined by a full biconditional, plus a unit clause
/// asserting the root.
pub fn to_cnf(c: &Circuit, root: Gate) -> Cnf {
    let mut cnf = Cnf::new(c.var_count());
    if root == Gate::TRUE {
        return cnf;
    }
    if root == Gate::FALSE {
        cnf.clauses.push(Vec::new());
        return cnf;
    }
    let mut lit = vec![0i32; c.len()];
    let mut true_var = 0;
    for g in c.cone(root) {
        lit[g.index()] = match c.node(g) {
            Node::Const(b) => {
                if true_var == 0 {
                    cnf.num_vars += 1;
                    true_var = cnf.num_vars as i32;
                    cnf.add(vec![true_var]);
                }
                if *b {
                    true_var
                } else {
                    -true_var
                }
            }
            Node::Var(x) => *x as i32 + 1,
            Node::Not(a) => -lit[a.index()],
            Node::And(xs) => {
                cnf.num_vars += 1;
                let v = cnf.num_vars as i32;
                let mut long = vec![v];
                for x in xs {
                    cnf.add(vec![-v, lit[x.index()]]);
                    long.push(-lit[x.index()]);
                }
                cnf.add(long);
                v
            }
            Node::Or(xs) => {
                cnf.num_vars += 1;
                let v = cnf.num_vars as i32;
                let mut long = vec![-v];
                for x in xs {
                    cnf.add(vec![v, -lit[x.index()]]);
                    long.push(lit[x.index()]);
                }
                cnf.add(long);
                v
            }
        };
    }
    cnf.add(vec![lit[root.index()]]);
    cnf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_is_one_unit_clause() {
        let mut c = Circuit::new();
        let x = c.new_var();
        let cnf = to_cnf(&c, x);
        assert_eq!(cnf.clauses, vec![vec![1]]);
    }

    #[test]
    fn contradiction_folds_to_the_empty_clause() {
        let mut c = Circuit::new();
        let x = c.new_var();
        let nx = c.not(x);
        let g = c.and2(x, nx);
        assert_eq!(to_cnf(&c, g).clauses, vec![Vec::<i32>::new()]);
    }

    #[test]
    fn auxiliaries_sit_above_the_leaves() {
        let mut c = Circuit::new();
        let (x, y, z) = (c.new_var(), c.new_var(), c.new_var());
        let a = c.and2(x, y);
        let g = c.or2(a, z);
        let cnf = to_cnf(&c, g);
        assert_eq!(cnf.leaf_vars, 3);
        assert_eq!(cnf.num_vars, 5);
        assert!(cnf.clauses.iter().flatten().all(|l| l.unsigned_abs() <= 5));
    }
}
