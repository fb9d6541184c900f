//! Surface syntax tree for `.dal` models.
//!
//! Every node carries a byte-offset [`Span`] into the source it was parsed
//! from. Structural comparisons that should ignore positions go through
//! [`Model::erase_spans`].

use serde::{Deserialize, Serialize};
use std::fmt;

/// Half-open byte range `[start, end)` into the model source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// 1-based line and column of `start` within `src`.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let upto = &src[..self.start.min(src.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub sigs: Vec<SigDecl>,
    pub preds: Vec<PredDecl>,
    pub actions: Vec<ActionDecl>,
    pub programs: Vec<ProgramDecl>,
    pub assertions: Vec<AssertDecl>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigMult {
    One,
    Default,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigDecl {
    pub name: Ident,
    pub mult: SigMult,
    pub span: Span,
}

/// Multiplicity written in front of a column union in a declaration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColMult {
    /// No keyword: `one` for unary declarations, `set` for the range of a binary one.
    Implicit,
    One,
    Set,
}

/// A union of signature names such as `Node+null`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColType {
    pub sigs: Vec<Ident>,
    pub span: Span,
}

/// Declared type of a parameter or local: `A`, `set A`, `A -> one (B+C)`, `A -> B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelType {
    pub domain_mult: ColMult,
    pub domain: ColType,
    pub range: Option<(ColMult, ColType)>,
    pub span: Span,
}

impl RelType {
    pub fn arity(&self) -> usize {
        if self.range.is_some() {
            2
        } else {
            1
        }
    }

    /// `A -> one B`: a total function from `A` atoms into `B`.
    pub fn is_functional(&self) -> bool {
        matches!(self.range, Some((ColMult::One, _)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: Ident,
    pub ty: RelType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredDecl {
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Formula,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: Ident,
    pub params: Vec<Param>,
    pub pre: Formula,
    pub post: Formula,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramDecl {
    pub name: Ident,
    pub params: Vec<Param>,
    pub locals: Vec<Param>,
    pub body: Program,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertDecl {
    pub name: Ident,
    pub params: Vec<Param>,
    pub pre: Formula,
    pub program: Program,
    pub post: Formula,
    pub span: Span,
}

/// Where a core node produced by desugaring came from; drives trace labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Guard of the `then` branch of `if cond`.
    IfThen(Formula),
    /// Negated guard of the `else` branch of `if cond` (holds the original `cond`).
    IfElse(Formula),
    /// The choice between the two branches of an `if`.
    If(Formula),
    /// Guard tested at the start of each `while cond` iteration.
    LoopGuard(Formula),
    /// Negated guard tested after a `while cond` loop (holds the original `cond`).
    LoopExit(Formula),
    /// The iteration produced by `while cond`.
    Loop(Formula),
    /// The sequencing glue around a desugared `while`.
    While(Formula),
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub kind: ProgramKind,
    pub span: Span,
    pub origin: Option<Origin>,
}

/// An atomic state change: either a declared action or an assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atomic {
    Action { name: Ident, args: Vec<Ident> },
    Assign { target: Ident, value: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProgramKind {
    // core constructs
    Atomic(Atomic),
    Test(Formula),
    Choice(Box<Program>, Box<Program>),
    Seq(Box<Program>, Box<Program>),
    Star(Box<Program>),
    Invoke {
        name: Ident,
        args: Vec<Ident>,
    },
    // produced by the parser, eliminated by desugaring
    Call {
        name: Ident,
        args: Vec<Ident>,
    },
    If {
        cond: Formula,
        then: Box<Program>,
        otherwise: Option<Box<Program>>,
    },
    While {
        cond: Formula,
        body: Box<Program>,
    },
    Assign {
        target: Ident,
        value: Expr,
    },
    Skip,
}

impl Program {
    pub fn new(kind: ProgramKind, span: Span) -> Self {
        Program {
            kind,
            span,
            origin: None,
        }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = Some(origin);
        self
    }

    /// True when the node is one of the six core constructs.
    pub fn is_core(&self) -> bool {
        matches!(
            self.kind,
            ProgramKind::Atomic(_)
                | ProgramKind::Test(_)
                | ProgramKind::Choice(..)
                | ProgramKind::Seq(..)
                | ProgramKind::Star(_)
                | ProgramKind::Invoke { .. }
        )
    }

    /// Pre-order walk over this node and all descendants.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Program)) {
        f(self);
        match &self.kind {
            ProgramKind::Choice(a, b) | ProgramKind::Seq(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            ProgramKind::Star(b) | ProgramKind::While { body: b, .. } => b.walk(f),
            ProgramKind::If { then, otherwise, .. } => {
                then.walk(f);
                if let Some(o) = otherwise {
                    o.walk(f);
                }
            }
            _ => {}
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Neq,
    In,
    NotIn,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "!=",
            CmpOp::In => "in",
            CmpOp::NotIn => "!in",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mult {
    No,
    Some,
    One,
    Lone,
}

impl Mult {
    pub fn keyword(self) -> &'static str {
        match self {
            Mult::No => "no",
            Mult::Some => "some",
            Mult::One => "one",
            Mult::Lone => "lone",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    All,
    Some,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub kind: FormulaKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaKind {
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Cmp(CmpOp, Expr, Expr),
    Mult(Mult, Expr),
    Quant {
        quant: Quant,
        var: Ident,
        bound: Expr,
        body: Box<Formula>,
    },
    PredCall {
        name: Ident,
        args: Vec<Expr>,
    },
}

impl Formula {
    pub fn new(kind: FormulaKind, span: Span) -> Self {
        Formula { kind, span }
    }

    pub fn truth(span: Span) -> Self {
        Formula::new(FormulaKind::True, span)
    }

    pub fn negate(self) -> Self {
        let span = self.span;
        Formula::new(FormulaKind::Not(Box::new(self)), span)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Join,
    Product,
    Union,
    Diff,
    Inter,
    Override,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Join => ".",
            BinOp::Product => "->",
            BinOp::Union => "+",
            BinOp::Diff => "-",
            BinOp::Inter => "&",
            BinOp::Override => "++",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Transpose,
    Closure,
    ReflexiveClosure,
    Card,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Transpose => "~",
            UnOp::Closure => "^",
            UnOp::ReflexiveClosure => "*",
            UnOp::Card => "#",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    /// A variable, field, signature, or quantified name. `primed` marks next-state references.
    Name {
        name: String,
        primed: bool,
    },
    Int(i64),
    None,
    Univ,
    Iden,
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    /// `name[args]`: the builtins `add`/`sub`, resolved later.
    Call {
        name: Ident,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn name(name: impl Into<String>, span: Span) -> Self {
        Expr::new(
            ExprKind::Name {
                name: name.into(),
                primed: false,
            },
            span,
        )
    }
}

// ---------------------------------------------------------------------------
// span erasure

impl Model {
    /// Zeroes every span so two models can be compared structurally.
    pub fn erase_spans(&mut self) {
        for s in &mut self.sigs {
            s.span = Span::default();
            s.name.span = Span::default();
        }
        for p in &mut self.preds {
            p.span = Span::default();
            p.name.span = Span::default();
            p.params.iter_mut().for_each(Param::erase_spans);
            p.body.erase_spans();
        }
        for a in &mut self.actions {
            a.span = Span::default();
            a.name.span = Span::default();
            a.params.iter_mut().for_each(Param::erase_spans);
            a.pre.erase_spans();
            a.post.erase_spans();
        }
        for p in &mut self.programs {
            p.span = Span::default();
            p.name.span = Span::default();
            p.params.iter_mut().for_each(Param::erase_spans);
            p.locals.iter_mut().for_each(Param::erase_spans);
            p.body.erase_spans();
        }
        for a in &mut self.assertions {
            a.span = Span::default();
            a.name.span = Span::default();
            a.params.iter_mut().for_each(Param::erase_spans);
            a.pre.erase_spans();
            a.program.erase_spans();
            a.post.erase_spans();
        }
    }
}

impl Param {
    fn erase_spans(&mut self) {
        self.name.span = Span::default();
        self.ty.span = Span::default();
        self.ty.domain.erase_spans();
        if let Some((_, r)) = &mut self.ty.range {
            r.erase_spans();
        }
    }
}

impl ColType {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        for s in &mut self.sigs {
            s.span = Span::default();
        }
    }
}

impl Program {
    pub fn erase_spans(&mut self) {
        self.span = Span::default();
        if let Some(o) = &mut self.origin {
            match o {
                Origin::IfThen(f)
                | Origin::IfElse(f)
                | Origin::If(f)
                | Origin::LoopGuard(f)
                | Origin::LoopExit(f)
                | Origin::Loop(f)
                | Origin::While(f) => f.erase_spans(),
                Origin::Skip => {}
            }
        }
        match &mut self.kind {
            ProgramKind::Atomic(Atomic::Action { name, args })
            | ProgramKind::Invoke { name, args }
            | ProgramKind::Call { name, args } => {
                name.span = Span::default();
                args.iter_mut().for_each(|a| a.span = Span::default());
            }
            ProgramKind::Atomic(Atomic::Assign { target, value }) | ProgramKind::Assign { target, value } => {
                target.span = Span::default();
                value.erase_spans();
            }
            ProgramKind::Test(f) => f.erase_spans(),
            ProgramKind::Choice(a, b) | ProgramKind::Seq(a, b) => {
                a.erase_spans();
                b.erase_spans();
            }
            ProgramKind::Star(b) => b.erase_spans(),
            ProgramKind::If { cond, then, otherwise } => {
                cond.erase_spans();
                then.erase_spans();
                if let Some(o) = otherwise {
                    o.erase_spans();
                }
            }
            ProgramKind::While { cond, body } => {
                cond.erase_spans();
                body.erase_spans();
            }
            ProgramKind::Skip => {}
        }
    }
}

impl Formula {
    pub fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            FormulaKind::True | FormulaKind::False => {}
            FormulaKind::Not(f) => f.erase_spans(),
            FormulaKind::And(a, b) | FormulaKind::Or(a, b) | FormulaKind::Implies(a, b) | FormulaKind::Iff(a, b) => {
                a.erase_spans();
                b.erase_spans();
            }
            FormulaKind::Cmp(_, a, b) => {
                a.erase_spans();
                b.erase_spans();
            }
            FormulaKind::Mult(_, e) => e.erase_spans(),
            FormulaKind::Quant { var, bound, body, .. } => {
                var.span = Span::default();
                bound.erase_spans();
                body.erase_spans();
            }
            FormulaKind::PredCall { name, args } => {
                name.span = Span::default();
                args.iter_mut().for_each(Expr::erase_spans);
            }
        }
    }
}

impl Expr {
    pub fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Binary(_, a, b) => {
                a.erase_spans();
                b.erase_spans();
            }
            ExprKind::Unary(_, a) => a.erase_spans(),
            ExprKind::Call { name, args } => {
                name.span = Span::default();
                args.iter_mut().for_each(Expr::erase_spans);
            }
            _ => {}
        }
    }
}
