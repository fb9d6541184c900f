//! Resolved, typed core IR. This is what the evaluator, translator,
//! interpreter, and lifter consume.

use super::ast::{BinOp, CmpOp, Model, Mult, Quant, Span};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub type SigId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigInfo {
    pub name: String,
    pub one: bool,
    /// The builtin `Int` signature.
    pub int: bool,
}

/// Column type: a union of signatures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColTy(pub BTreeSet<SigId>);

impl ColTy {
    pub fn of(sig: SigId) -> Self {
        ColTy(BTreeSet::from([sig]))
    }

    pub fn union(&self, other: &ColTy) -> ColTy {
        ColTy(self.0.union(&other.0).copied().collect())
    }

    pub fn intersect(&self, other: &ColTy) -> ColTy {
        ColTy(self.0.intersection(&other.0).copied().collect())
    }
}

/// Relation type: one column type per position.
pub type RelTy = Vec<ColTy>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarMult {
    /// Unary, exactly one atom.
    One,
    /// Any set of tuples.
    Set,
    /// Binary `A -> one B`: total function from `A` atoms.
    Functional,
}

/// A mutable relation symbol: program parameter, local, or assertion parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub cols: RelTy,
    pub mult: VarMult,
}

impl VarDecl {
    pub fn arity(&self) -> usize {
        self.cols.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: RelTy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TExprKind {
    Var {
        name: String,
        primed: bool,
    },
    Sig(SigId),
    /// Quantified variable, by binding depth from the outermost quantifier.
    QVar(usize),
    None,
    Univ,
    Iden,
    Binary(BinOp, Box<TExpr>, Box<TExpr>),
    Transpose(Box<TExpr>),
    Closure(Box<TExpr>),
    ReflexiveClosure(Box<TExpr>),
    /// The singleton `Int` atom denoting an integer value.
    IntAtom(Box<TInt>),
    /// A single named atom such as `Node1`; only produced for watch expressions.
    Atom(String),
}

impl TExpr {
    pub fn arity(&self) -> usize {
        self.ty.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TInt {
    Lit(i64),
    Card(Box<TExpr>),
    Add(Box<TInt>, Box<TInt>),
    Sub(Box<TInt>, Box<TInt>),
    /// Sum of the integer atoms in a unary `Int` relation.
    Sum(Box<TExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntCmp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl IntCmp {
    pub fn from_cmp(op: CmpOp) -> Option<IntCmp> {
        Some(match op {
            CmpOp::Eq => IntCmp::Eq,
            CmpOp::Lt => IntCmp::Lt,
            CmpOp::Le => IntCmp::Le,
            CmpOp::Gt => IntCmp::Gt,
            CmpOp::Ge => IntCmp::Ge,
            _ => return None,
        })
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            IntCmp::Eq => a == b,
            IntCmp::Lt => a < b,
            IntCmp::Le => a <= b,
            IntCmp::Gt => a > b,
            IntCmp::Ge => a >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TFormula {
    True,
    False,
    Not(Box<TFormula>),
    And(Vec<TFormula>),
    Or(Vec<TFormula>),
    Implies(Box<TFormula>, Box<TFormula>),
    Iff(Box<TFormula>, Box<TFormula>),
    Eq(TExpr, TExpr),
    In(TExpr, TExpr),
    IntCmp(IntCmp, TInt, TInt),
    Mult(Mult, TExpr),
    Quant {
        quant: Quant,
        level: usize,
        bound: TExpr,
        body: Box<TFormula>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// What surface construct a core node stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Plain,
    Assign,
    IfThen,
    IfElse,
    If,
    LoopGuard,
    LoopExit,
    Loop,
    While,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TAtomic {
    pub pre: TFormula,
    pub post: TFormula,
    /// Maps names used in `pre`/`post` to names in the enclosing frame.
    /// Empty for assignments, whose formulas are already in the enclosing frame.
    pub renaming: Vec<(String, String)>,
    /// Enclosing-frame names this step may change; everything else is framed.
    pub modifies: Vec<String>,
}

impl TAtomic {
    pub fn rename<'a>(&'a self, name: &'a str) -> &'a str {
        if self.renaming.is_empty() {
            return name;
        }
        self.renaming
            .iter()
            .find(|(from, _)| from == name)
            .map_or(name, |(_, to)| to.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TProg {
    pub id: NodeId,
    pub span: Span,
    pub label: String,
    pub role: Role,
    pub kind: TProgKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TProgKind {
    Atomic(TAtomic),
    Test(TFormula),
    Choice(Box<TProg>, Box<TProg>),
    Seq(Box<TProg>, Box<TProg>),
    Star(Box<TProg>),
    /// Index into [`TypedModel::programs`]; arguments are enclosing-frame names.
    Invoke {
        program: usize,
        args: Vec<String>,
    },
}

impl TProg {
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a TProg)) {
        f(self);
        match &self.kind {
            TProgKind::Choice(a, b) | TProgKind::Seq(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            TProgKind::Star(b) => b.walk(f),
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TAction {
    pub name: String,
    pub params: Vec<VarDecl>,
    pub pre: TFormula,
    pub post: TFormula,
    pub modifies: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TProgram {
    pub name: String,
    pub params: Vec<VarDecl>,
    pub locals: Vec<VarDecl>,
    pub body: TProg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TAssertion {
    pub name: String,
    pub params: Vec<VarDecl>,
    pub pre: TFormula,
    pub program: TProg,
    pub post: TFormula,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedModel {
    /// Declared signatures followed by the builtin `Int`.
    pub sigs: Vec<SigInfo>,
    pub actions: Vec<TAction>,
    pub programs: Vec<TProgram>,
    pub assertions: Vec<TAssertion>,
    /// The desugared surface model, kept for resolving watch expressions.
    pub surface: Model,
}

impl TypedModel {
    pub fn int_sig(&self) -> SigId {
        self.sigs.len() - 1
    }

    pub fn sig_id(&self, name: &str) -> Option<SigId> {
        self.sigs.iter().position(|s| s.name == name)
    }

    pub fn assertion(&self, name: &str) -> Option<&TAssertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn col_name(&self, c: &ColTy) -> String {
        c.0.iter()
            .map(|&s| self.sigs[s].name.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn type_name(&self, ty: &RelTy) -> String {
        ty.iter().map(|c| self.col_name(c)).collect::<Vec<_>>().join(" -> ")
    }

    /// Every program node by id, across program bodies and assertions.
    pub fn nodes(&self) -> HashMap<NodeId, &TProg> {
        let mut out = HashMap::new();
        let bodies = self
            .programs
            .iter()
            .map(|p| &p.body)
            .chain(self.assertions.iter().map(|a| &a.program));
        for b in bodies {
            b.walk(&mut |n| {
                out.insert(n.id, n);
            });
        }
        out
    }
}
