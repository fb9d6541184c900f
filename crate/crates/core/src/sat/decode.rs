use crate::lang::typed::VarMult;
use crate::relational::{Instance, TupleSet};
use crate::translate::SatProblem;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("model violates the multiplicity of `{symbol}` in state {state}: {detail}")]
pub struct InconsistentModel {
    pub symbol: String,
    pub state: usize,
    pub detail: String,
}

/// Leaf values of the circuit from a CNF model (leaf `x` is CNF variable `x + 1`).
pub fn leaf_values(problem: &SatProblem, model: &[bool]) -> Vec<bool> {
    model[..problem.circuit.var_count() as usize].to_vec()
}

/// One instance per state. Fails if a `one` symbol or functional field does
/// not decode to exactly one atom (per domain atom), which would mean the
/// encoding is broken.
pub fn decode(problem: &SatProblem, leaves: &[bool]) -> Result<Vec<Instance>, InconsistentModel> {
    let layout = &problem.layout;
    let mut states = Vec::with_capacity(layout.states);
    for s in 0..layout.states {
        let mut inst = Instance::new();
        for (i, sym) in layout.symbols.iter().enumerate() {
            let m = layout.matrix(i, s);
            let tuples = m.entries.iter().filter(|(_, g)| {
                let crate::translate::Node::Var(x) = problem.circuit.node(**g) else {
                    unreachable!("layout gates are leaves")
                };
                leaves[*x as usize]
            });
            let set = TupleSet::from_tuples(m.arity, tuples.map(|(t, _)| t.clone()));
            check(&problem.universe, sym, s, &set)?;
            inst.insert(sym.name.clone(), set);
        }
        states.push(inst);
    }
    Ok(states)
}

fn check(
    u: &crate::relational::Universe,
    sym: &crate::translate::Symbol,
    state: usize,
    set: &TupleSet,
) -> Result<(), InconsistentModel> {
    let fail = |detail: String| InconsistentModel {
        symbol: sym.name.clone(),
        state,
        detail,
    };
    match sym.decl.mult {
        VarMult::Set => Ok(()),
        VarMult::One if set.len() == 1 => Ok(()),
        VarMult::One => Err(fail(format!("{} atoms instead of one", set.len()))),
        VarMult::Functional => {
            let mut rows: BTreeMap<u32, usize> = u.col_atoms(&sym.decl.cols[0]).into_iter().map(|a| (a, 0)).collect();
            for t in set.iter() {
                *rows.entry(t[0]).or_default() += 1;
            }
            match rows.iter().find(|(_, &n)| n != 1) {
                None => Ok(()),
                Some((a, n)) => Err(fail(format!("{} maps to {n} atoms", u.name(*a)))),
            }
        }
    }
}
