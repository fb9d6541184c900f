//! Direct evaluation of typed expressions and formulas over concrete instances.

use super::tuples::TupleSet;
use super::universe::{AtomId, Universe};
use crate::lang::ast::{BinOp, Mult, Quant};
use crate::lang::typed::{TExpr, TExprKind, TFormula, TInt};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Valuation of relation symbols: one snapshot of the state.
pub type Instance = BTreeMap<String, TupleSet>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("`{0}` is not in scope at this step")]
    UnboundSymbol(String),
    #[error("arity error: {0}")]
    Arity(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Tuples(TupleSet),
    Int(i64),
    Bool(bool),
}

/// JSON rendering of a [`Value`]: tuple lists, integers, and booleans.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ValueJson {
    Tuples(Vec<Vec<String>>),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn to_json(&self, u: &Universe) -> ValueJson {
        match self {
            Value::Tuples(t) => ValueJson::Tuples(t.names(u)),
            Value::Int(i) => ValueJson::Int(*i),
            Value::Bool(b) => ValueJson::Bool(*b),
        }
    }
}

pub fn instance_json(inst: &Instance, u: &Universe) -> BTreeMap<String, Vec<Vec<String>>> {
    inst.iter().map(|(k, v)| (k.clone(), v.names(u))).collect()
}

/// Where names in a formula come from.
///
/// Unprimed names read `pre`, primed names read `post`. `bindings` maps a
/// name as written in the formula to the instance symbol it denotes; names
/// without a binding are looked up as-is.
#[derive(Clone, Debug)]
pub struct Env<'a> {
    pub universe: &'a Universe,
    pub pre: &'a Instance,
    pub post: Option<&'a Instance>,
    pub bindings: Vec<(String, String)>,
    quant: Vec<AtomId>,
}

impl<'a> Env<'a> {
    pub fn new(universe: &'a Universe, pre: &'a Instance) -> Self {
        Env {
            universe,
            pre,
            post: None,
            bindings: Vec::new(),
            quant: Vec::new(),
        }
    }

    pub fn with_post(mut self, post: &'a Instance) -> Self {
        self.post = Some(post);
        self
    }

    pub fn with_bindings(mut self, bindings: Vec<(String, String)>) -> Self {
        self.bindings = bindings;
        self
    }

    fn symbol(&self, name: &str, primed: bool) -> Result<&'a TupleSet, EvalError> {
        let key = self
            .bindings
            .iter()
            .find(|(n, _)| n == name)
            .map_or(name, |(_, s)| s.as_str());
        let inst = if primed {
            self.post.ok_or_else(|| EvalError::UnboundSymbol(format!("{name}'")))?
        } else {
            self.pre
        };
        inst.get(key).ok_or_else(|| EvalError::UnboundSymbol(name.to_string()))
    }

    pub fn eval_expr(&mut self, e: &TExpr) -> Result<TupleSet, EvalError> {
        let u = self.universe;
        Ok(match &e.kind {
            TExprKind::Var { name, primed } => self.symbol(name, *primed)?.clone(),
            TExprKind::Sig(s) => TupleSet::atoms(u.sig_atoms(*s).iter().copied()),
            TExprKind::QVar(level) => {
                let a = *self
                    .quant
                    .get(*level)
                    .ok_or_else(|| EvalError::UnboundSymbol(format!("quantifier #{level}")))?;
                TupleSet::singleton(a)
            }
            TExprKind::None => TupleSet::empty(1),
            TExprKind::Univ => TupleSet::atoms(u.atoms()),
            TExprKind::Iden => TupleSet::identity(u.atoms()),
            TExprKind::Binary(op, a, b) => {
                let a = self.eval_expr(a)?;
                let b = self.eval_expr(b)?;
                match op {
                    BinOp::Join => {
                        if a.arity() + b.arity() < 3 {
                            return Err(EvalError::Arity("join of two unary relations".into()));
                        }
                        a.join(&b)
                    }
                    BinOp::Product => a.product(&b),
                    _ if a.arity() != b.arity() => {
                        return Err(EvalError::Arity(format!(
                            "`{}` on arities {} and {}",
                            op.symbol(),
                            a.arity(),
                            b.arity()
                        )))
                    }
                    BinOp::Union => a.union(&b),
                    BinOp::Diff => a.difference(&b),
                    BinOp::Inter => a.intersection(&b),
                    BinOp::Override => a.override_with(&b),
                }
            }
            TExprKind::Transpose(a) => self.binary(a)?.transpose(),
            TExprKind::Closure(a) => self.binary(a)?.closure(),
            TExprKind::ReflexiveClosure(a) => self.binary(a)?.reflexive_closure(u),
            TExprKind::IntAtom(i) => TupleSet::singleton(u.int_atom(self.eval_int(i)?)),
            TExprKind::Atom(name) => {
                TupleSet::singleton(u.atom(name).ok_or_else(|| EvalError::UnboundSymbol(name.clone()))?)
            }
        })
    }

    fn binary(&mut self, e: &TExpr) -> Result<TupleSet, EvalError> {
        let r = self.eval_expr(e)?;
        if r.arity() != 2 {
            return Err(EvalError::Arity(format!(
                "expected a binary relation, found arity {}",
                r.arity()
            )));
        }
        Ok(r)
    }

    pub fn eval_int(&mut self, i: &TInt) -> Result<i64, EvalError> {
        let u = self.universe;
        Ok(match i {
            TInt::Lit(n) => u.wrap(*n),
            TInt::Card(e) => u.wrap(self.eval_expr(e)?.len() as i64),
            TInt::Add(a, b) => u.wrap(self.eval_int(a)? + self.eval_int(b)?),
            TInt::Sub(a, b) => u.wrap(self.eval_int(a)? - self.eval_int(b)?),
            TInt::Sum(e) => {
                let set = self.eval_expr(e)?;
                u.wrap(set.iter().filter_map(|t| u.int_value(t[0])).sum())
            }
        })
    }

    pub fn eval_formula(&mut self, f: &TFormula) -> Result<bool, EvalError> {
        Ok(match f {
            TFormula::True => true,
            TFormula::False => false,
            TFormula::Not(a) => !self.eval_formula(a)?,
            TFormula::And(fs) => {
                for g in fs {
                    if !self.eval_formula(g)? {
                        return Ok(false);
                    }
                }
                true
            }
            TFormula::Or(fs) => {
                for g in fs {
                    if self.eval_formula(g)? {
                        return Ok(true);
                    }
                }
                false
            }
            TFormula::Implies(a, b) => !self.eval_formula(a)? || self.eval_formula(b)?,
            TFormula::Iff(a, b) => self.eval_formula(a)? == self.eval_formula(b)?,
            TFormula::Eq(a, b) => self.eval_expr(a)? == self.eval_expr(b)?,
            TFormula::In(a, b) => self.eval_expr(a)?.is_subset(&self.eval_expr(b)?),
            TFormula::IntCmp(op, a, b) => op.holds(self.eval_int(a)?, self.eval_int(b)?),
            TFormula::Mult(m, e) => {
                let n = self.eval_expr(e)?.len();
                match m {
                    Mult::No => n == 0,
                    Mult::Some => n > 0,
                    Mult::One => n == 1,
                    Mult::Lone => n <= 1,
                }
            }
            TFormula::Quant {
                quant,
                level,
                bound,
                body,
            } => {
                let atoms: Vec<AtomId> = self.eval_expr(bound)?.iter().map(|t| t[0]).collect();
                self.quant.truncate(*level);
                let mut result = matches!(quant, Quant::All);
                for a in atoms {
                    self.quant.push(a);
                    let v = self.eval_formula(body);
                    self.quant.pop();
                    if v? != result {
                        result = !result;
                        break;
                    }
                }
                result
            }
        })
    }

    /// Evaluates a watch-style term to a [`Value`]. A single integer atom is
    /// shown as the integer itself.
    pub fn eval_value(&mut self, w: &crate::lang::resolve::WatchResolved) -> Result<Value, EvalError> {
        use crate::lang::resolve::WatchResolved as W;
        Ok(match w {
            W::Rel(e) => {
                let set = self.eval_expr(e)?;
                let int_typed = e.ty.len() == 1
                    && e.ty[0].0.iter().all(|&s| {
                        self.universe
                            .sig_atoms(s)
                            .first()
                            .is_some_and(|&a| self.universe.int_value(a).is_some())
                    });
                let single = set.iter().next().filter(|_| int_typed && set.len() == 1).map(|t| t[0]);
                match single.and_then(|a| self.universe.int_value(a)) {
                    Some(v) => Value::Int(v),
                    None => Value::Tuples(set),
                }
            }
            W::Int(i) => Value::Int(self.eval_int(i)?),
            W::Formula(f) => Value::Bool(self.eval_formula(f)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_watch;
    use crate::lang::resolve::resolve_watch;
    use crate::lang::{desugar::desugar, parser::parse_model, resolve::resolve};
    use crate::relational::universe::build_universe;

    const SRC: &str = "one sig null {} sig List {} sig Node {}
        program p[thiz: List, header: List -> one(Node+null), next: Node -> one(Node+null), size: List -> one Int] { skip }";

    fn eval(inst: &Instance, text: &str) -> Value {
        let m = resolve(&desugar(&parse_model(SRC).unwrap())).unwrap();
        let u = build_universe(&m.sigs, 3, &BTreeMap::new(), 4);
        let w = resolve_watch(&m, &m.programs[0].params, &parse_watch(text).unwrap()).unwrap();
        Env::new(&u, inst).eval_value(&w).unwrap()
    }

    // atoms: null=0, List0..2 = 1..3, Node0..2 = 4..6, ints -8..7 = 7..22
    fn buggy_final() -> Instance {
        let two = 7 + 10;
        Instance::from([
            ("thiz".into(), TupleSet::singleton(1)),
            (
                "header".into(),
                TupleSet::from_tuples(2, [vec![1, 0], vec![2, 0], vec![3, 0]]),
            ),
            (
                "next".into(),
                TupleSet::from_tuples(2, [vec![4, 5], vec![5, 6], vec![6, 0]]),
            ),
            (
                "size".into(),
                TupleSet::from_tuples(2, [vec![1, two], vec![2, 7 + 8], vec![3, 7 + 8]]),
            ),
        ])
    }

    #[test]
    fn assertion_fails_on_an_emptied_list() {
        let inst = buggy_final();
        assert_eq!(eval(&inst, "thiz.size"), Value::Int(2));
        assert_eq!(
            eval(&inst, "thiz.header.*next - null"),
            Value::Tuples(TupleSet::empty(1))
        );
        assert_eq!(
            eval(&inst, "thiz.size = #(thiz.header.*next - null)"),
            Value::Bool(false)
        );
    }

    #[test]
    fn reachability_and_constants() {
        let inst = buggy_final();
        assert_eq!(eval(&inst, "Node0.*next"), Value::Tuples(TupleSet::atoms([0, 4, 5, 6])));
        assert_eq!(eval(&inst, "null = null"), Value::Bool(true));
        assert_eq!(eval(&inst, "#none"), Value::Int(0));
        assert_eq!(eval(&inst, "sub[-8, 1]"), Value::Int(7));
        assert_eq!(eval(&inst, "all n: Node | n.next in Node + null"), Value::Bool(true));
        assert_eq!(eval(&inst, "some n: Node | n.next = Node0"), Value::Bool(false));
    }

    #[test]
    fn unbound_symbols_are_errors() {
        let m = resolve(&desugar(&parse_model(SRC).unwrap())).unwrap();
        let u = build_universe(&m.sigs, 1, &BTreeMap::new(), 4);
        let w = resolve_watch(&m, &m.programs[0].params, &parse_watch("thiz").unwrap()).unwrap();
        let err = Env::new(&u, &Instance::new()).eval_value(&w).unwrap_err();
        assert_eq!(err, EvalError::UnboundSymbol("thiz".into()));
    }
}
