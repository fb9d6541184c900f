//! Name resolution and type checking.
//!
//! Predicates are expanded at their call sites, so the typed IR has no
//! predicate calls left. Integer/relation coercions are made explicit
//! (`IntAtom`, `Sum`).

use super::ast::*;
use super::error::{ResolveError, ResolveErrorKind as K};
use super::pretty;
use super::typed::*;
use std::collections::{BTreeSet, HashMap, HashSet};

type RResult<T> = Result<T, ResolveError>;

/// Resolves a desugared model. All errors found are returned, in source order.
pub fn resolve(m: &Model) -> Result<TypedModel, Vec<ResolveError>> {
    let mut r = Resolver::new(m);
    let typed = r.model();
    if r.errors.is_empty() {
        Ok(typed)
    } else {
        Err(r.errors)
    }
}

/// Either side of the int/relation divide, before coercion.
enum Val {
    Rel(TExpr),
    Int(TInt),
}

#[derive(Clone)]
enum Binding {
    Var(RelTy),
    Subst(TExpr),
    QVar(usize, ColTy),
}

/// Names visible while resolving one formula or expression.
pub struct Scope {
    frames: Vec<(String, Binding)>,
    /// Names that may be referenced primed (action postconditions only).
    primable: Option<HashSet<String>>,
    depth: usize,
    primed_used: BTreeSet<String>,
}

impl Scope {
    pub fn vars(vars: &[VarDecl]) -> Self {
        Scope {
            frames: vars
                .iter()
                .map(|v| (v.name.clone(), Binding::Var(v.cols.clone())))
                .collect(),
            primable: None,
            depth: 0,
            primed_used: BTreeSet::new(),
        }
    }

    fn lookup(&self, name: &str) -> Option<&Binding> {
        self.frames.iter().rev().find(|(n, _)| n == name).map(|(_, b)| b)
    }
}

pub(crate) struct Resolver<'m> {
    model: &'m Model,
    sigs: Vec<SigInfo>,
    preds: HashMap<&'m str, &'m PredDecl>,
    actions: HashMap<&'m str, usize>,
    programs: HashMap<&'m str, usize>,
    pred_stack: Vec<String>,
    next_id: u32,
    pub(crate) errors: Vec<ResolveError>,
    typed_actions: Vec<TAction>,
    program_sigs: Vec<(Vec<VarDecl>, Vec<VarDecl>)>,
    /// Accept atom names like `Node0` for otherwise unknown identifiers.
    atom_names: bool,
}

impl<'m> Resolver<'m> {
    pub(crate) fn new(model: &'m Model) -> Self {
        let mut sigs: Vec<SigInfo> = model
            .sigs
            .iter()
            .map(|s| SigInfo {
                name: s.name.name.clone(),
                one: s.mult == SigMult::One,
                int: false,
            })
            .collect();
        sigs.push(SigInfo {
            name: "Int".into(),
            one: false,
            int: true,
        });
        Resolver {
            model,
            sigs,
            preds: model.preds.iter().map(|p| (p.name.name.as_str(), p)).collect(),
            actions: model
                .actions
                .iter()
                .enumerate()
                .map(|(i, a)| (a.name.name.as_str(), i))
                .collect(),
            programs: model
                .programs
                .iter()
                .enumerate()
                .map(|(i, p)| (p.name.name.as_str(), i))
                .collect(),
            pred_stack: Vec::new(),
            next_id: 0,
            errors: Vec::new(),
            typed_actions: Vec::new(),
            program_sigs: Vec::new(),
            atom_names: false,
        }
    }

    fn report<T>(&mut self, r: RResult<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(e);
                None
            }
        }
    }

    fn int_sig(&self) -> SigId {
        self.sigs.len() - 1
    }

    fn all_sigs(&self) -> ColTy {
        ColTy((0..self.sigs.len()).collect())
    }

    fn model(&mut self) -> TypedModel {
        self.check_duplicates();
        for (i, a) in self.model.actions.iter().enumerate() {
            let params = self.decls(&a.params, &[]);
            let mut scope = Scope::vars(&params);
            let pre = self.formula_or_true(&mut scope, &a.pre);
            scope.primable = Some(params.iter().map(|p| p.name.clone()).collect());
            let post = self.formula_or_true(&mut scope, &a.post);
            let modifies = scope.primed_used.into_iter().collect();
            debug_assert_eq!(self.typed_actions.len(), i);
            self.typed_actions.push(TAction {
                name: a.name.name.clone(),
                params,
                pre,
                post,
                modifies,
            });
        }
        for p in &self.model.programs {
            let params = self.decls(&p.params, &[]);
            let locals = self.decls(&p.locals, &params);
            self.program_sigs.push((params, locals));
        }
        self.check_recursion();
        let mut programs = Vec::new();
        for (i, p) in self.model.programs.iter().enumerate() {
            let (params, locals) = self.program_sigs[i].clone();
            let frame: Vec<VarDecl> = params.iter().chain(&locals).cloned().collect();
            let body = self.program(&frame, &p.body);
            programs.push(TProgram {
                name: p.name.name.clone(),
                params,
                locals,
                body,
            });
        }
        let mut assertions = Vec::new();
        for a in &self.model.assertions {
            let params = self.decls(&a.params, &[]);
            let mut scope = Scope::vars(&params);
            let pre = self.formula_or_true(&mut scope, &a.pre);
            let post = self.formula_or_true(&mut scope, &a.post);
            let program = self.program(&params, &a.program);
            assertions.push(TAssertion {
                name: a.name.name.clone(),
                params,
                pre,
                program,
                post,
                span: a.span,
            });
        }
        TypedModel {
            sigs: self.sigs.clone(),
            actions: std::mem::take(&mut self.typed_actions),
            programs,
            assertions,
            surface: self.model.clone(),
        }
    }

    fn check_duplicates(&mut self) {
        let mut sig_names = HashSet::new();
        for s in &self.model.sigs {
            if s.name.name == "Int" || !sig_names.insert(s.name.name.as_str()) {
                self.errors.push(ResolveError::new(
                    K::DuplicateName,
                    s.name.span,
                    format!("signature `{}` is declared twice", s.name.name),
                ));
            }
        }
        let mut callables = HashSet::new();
        let names = self
            .model
            .preds
            .iter()
            .map(|p| &p.name)
            .chain(self.model.actions.iter().map(|a| &a.name))
            .chain(self.model.programs.iter().map(|p| &p.name));
        for n in names {
            if !callables.insert(n.name.as_str()) || sig_names.contains(n.name.as_str()) {
                self.errors.push(ResolveError::new(
                    K::DuplicateName,
                    n.span,
                    format!("`{}` is declared twice", n.name),
                ));
            }
        }
        let mut asserts = HashSet::new();
        for a in &self.model.assertions {
            if !asserts.insert(a.name.name.as_str()) {
                self.errors.push(ResolveError::new(
                    K::DuplicateName,
                    a.name.span,
                    format!("assertion `{}` is declared twice", a.name.name),
                ));
            }
        }
    }

    fn check_recursion(&mut self) {
        // program index -> invoked program indices
        let mut edges: Vec<Vec<(usize, Span)>> = Vec::new();
        for p in &self.model.programs {
            let mut out = Vec::new();
            p.body.walk(&mut |n| {
                if let ProgramKind::Invoke { name, .. } = &n.kind {
                    if let Some(&j) = self.programs.get(name.name.as_str()) {
                        out.push((j, name.span));
                    }
                }
            });
            edges.push(out);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        fn dfs(v: usize, edges: &[Vec<(usize, Span)>], state: &mut [u8], found: &mut Vec<(usize, Span)>) {
            state[v] = 1;
            for &(w, span) in &edges[v] {
                match state[w] {
                    0 => dfs(w, edges, state, found),
                    1 => found.push((w, span)),
                    _ => {}
                }
            }
            state[v] = 2;
        }
        let mut state = vec![0u8; edges.len()];
        let mut found = Vec::new();
        for v in 0..edges.len() {
            if state[v] == 0 {
                dfs(v, &edges, &mut state, &mut found);
            }
        }
        for (w, span) in found {
            self.errors.push(ResolveError::new(
                K::Recursion,
                span,
                format!(
                    "recursive invocation of program `{}` is not supported",
                    self.model.programs[w].name.name
                ),
            ));
        }
    }

    // -- declarations ------------------------------------------------------

    fn col(&mut self, c: &ColType) -> ColTy {
        let mut out = BTreeSet::new();
        for s in &c.sigs {
            match self.sigs.iter().position(|x| x.name == s.name) {
                Some(id) => {
                    out.insert(id);
                }
                None => self.errors.push(ResolveError::new(
                    K::UnknownName,
                    s.span,
                    format!("unknown signature `{}`", s.name),
                )),
            }
        }
        ColTy(out)
    }

    fn decls(&mut self, params: &[Param], outer: &[VarDecl]) -> Vec<VarDecl> {
        let mut out: Vec<VarDecl> = Vec::new();
        for p in params {
            let name = &p.name.name;
            if out.iter().chain(outer).any(|v| &v.name == name) || self.sigs.iter().any(|s| &s.name == name) {
                self.errors.push(ResolveError::new(
                    K::DuplicateName,
                    p.name.span,
                    format!("`{name}` is declared twice"),
                ));
            }
            let domain = self.col(&p.ty.domain);
            let (cols, mult) = match &p.ty.range {
                None => {
                    let mult = if p.ty.domain_mult == ColMult::Set {
                        VarMult::Set
                    } else {
                        VarMult::One
                    };
                    (vec![domain], mult)
                }
                Some((m, r)) => {
                    if p.ty.domain_mult != ColMult::Implicit {
                        self.errors.push(ResolveError::new(
                            K::Invalid,
                            p.ty.span,
                            "multiplicity on the domain of a binary relation is not supported",
                        ));
                    }
                    let range = self.col(r);
                    let mult = if *m == ColMult::One {
                        VarMult::Functional
                    } else {
                        VarMult::Set
                    };
                    (vec![domain, range], mult)
                }
            };
            out.push(VarDecl {
                name: name.clone(),
                cols,
                mult,
            });
        }
        out
    }

    // -- programs ----------------------------------------------------------

    fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn frame_var<'a>(&mut self, frame: &'a [VarDecl], name: &Ident) -> RResult<&'a VarDecl> {
        frame.iter().find(|v| v.name == name.name).ok_or_else(|| {
            ResolveError::new(
                K::UnknownName,
                name.span,
                format!("`{}` is not a variable in scope", name.name),
            )
        })
    }

    fn bind_args(
        &mut self,
        frame: &[VarDecl],
        callee: &str,
        params: &[VarDecl],
        args: &[Ident],
        span: Span,
    ) -> RResult<Vec<(String, String)>> {
        if params.len() != args.len() {
            return Err(ResolveError::new(
                K::Invalid,
                span,
                format!("`{callee}` expects {} argument(s), got {}", params.len(), args.len()),
            ));
        }
        let mut out = Vec::new();
        for (p, a) in params.iter().zip(args) {
            let v = self.frame_var(frame, a)?;
            if v.arity() != p.arity() {
                return Err(ResolveError::new(
                    K::ArityMismatch,
                    a.span,
                    format!(
                        "argument `{}` has arity {}, parameter `{}` expects {}",
                        a.name,
                        v.arity(),
                        p.name,
                        p.arity()
                    ),
                ));
            }
            out.push((p.name.clone(), v.name.clone()));
        }
        Ok(out)
    }

    fn program(&mut self, frame: &[VarDecl], p: &Program) -> TProg {
        let id = self.fresh_id();
        let role = role_of(p);
        let label = label_of(p);
        let placeholder = || TProgKind::Test(TFormula::True);
        let kind = match &p.kind {
            ProgramKind::Atomic(Atomic::Assign { target, value }) => {
                let r = self.assign(frame, target, value);
                self.report(r).map(TProgKind::Atomic).unwrap_or_else(placeholder)
            }
            ProgramKind::Atomic(Atomic::Action { name, args }) => {
                let r = self.action_call(frame, name, args, p.span);
                self.report(r).map(TProgKind::Atomic).unwrap_or_else(placeholder)
            }
            ProgramKind::Test(f) => {
                let mut scope = Scope::vars(frame);
                TProgKind::Test(self.formula_or_true(&mut scope, f))
            }
            ProgramKind::Choice(a, b) => {
                TProgKind::Choice(Box::new(self.program(frame, a)), Box::new(self.program(frame, b)))
            }
            ProgramKind::Seq(a, b) => {
                TProgKind::Seq(Box::new(self.program(frame, a)), Box::new(self.program(frame, b)))
            }
            ProgramKind::Star(b) => TProgKind::Star(Box::new(self.program(frame, b))),
            ProgramKind::Invoke { name, args } => {
                let r = self.invoke(frame, name, args, p.span);
                self.report(r).unwrap_or_else(placeholder)
            }
            ProgramKind::Call { .. }
            | ProgramKind::If { .. }
            | ProgramKind::While { .. }
            | ProgramKind::Assign { .. }
            | ProgramKind::Skip => {
                self.errors.push(ResolveError::new(
                    K::Invalid,
                    p.span,
                    "model must be desugared before resolution",
                ));
                placeholder()
            }
        };
        TProg {
            id,
            span: p.span,
            label,
            role,
            kind,
        }
    }

    fn assign(&mut self, frame: &[VarDecl], target: &Ident, value: &Expr) -> RResult<TAtomic> {
        let var = self.frame_var(frame, target)?.clone();
        let mut scope = Scope::vars(frame);
        let v = self.expr(&mut scope, value)?;
        let rhs = self.need_rel(v, value.span)?;
        if rhs.arity() != var.arity() {
            return Err(ResolveError::new(
                K::ArityMismatch,
                value.span,
                format!(
                    "cannot assign an arity-{} value to `{}` of arity {}",
                    rhs.arity(),
                    var.name,
                    var.arity()
                ),
            ));
        }
        let lhs = TExpr {
            kind: TExprKind::Var {
                name: var.name.clone(),
                primed: true,
            },
            ty: var.cols.clone(),
        };
        Ok(TAtomic {
            pre: TFormula::True,
            post: TFormula::Eq(lhs, rhs),
            renaming: Vec::new(),
            modifies: vec![var.name.clone()],
        })
    }

    fn action_call(&mut self, frame: &[VarDecl], name: &Ident, args: &[Ident], span: Span) -> RResult<TAtomic> {
        let idx = *self
            .actions
            .get(name.name.as_str())
            .ok_or_else(|| ResolveError::new(K::UnknownName, name.span, format!("unknown action `{}`", name.name)))?;
        let action = self.typed_actions[idx].clone();
        let renaming = self.bind_args(frame, &action.name, &action.params, args, span)?;
        let modifies = action
            .modifies
            .iter()
            .map(|m| {
                renaming
                    .iter()
                    .find(|(p, _)| p == m)
                    .map(|(_, a)| a.clone())
                    .unwrap_or_else(|| m.clone())
            })
            .collect();
        Ok(TAtomic {
            pre: action.pre,
            post: action.post,
            renaming,
            modifies,
        })
    }

    fn invoke(&mut self, frame: &[VarDecl], name: &Ident, args: &[Ident], span: Span) -> RResult<TProgKind> {
        let idx = *self
            .programs
            .get(name.name.as_str())
            .ok_or_else(|| ResolveError::new(K::UnknownName, name.span, format!("unknown program `{}`", name.name)))?;
        let params = self.program_sigs[idx].0.clone();
        let binding = self.bind_args(frame, &name.name, &params, args, span)?;
        Ok(TProgKind::Invoke {
            program: idx,
            args: binding.into_iter().map(|(_, a)| a).collect(),
        })
    }

    // -- formulas ----------------------------------------------------------

    fn formula_or_true(&mut self, scope: &mut Scope, f: &Formula) -> TFormula {
        let r = self.formula(scope, f);
        self.report(r).unwrap_or(TFormula::True)
    }

    pub(crate) fn formula(&mut self, scope: &mut Scope, f: &Formula) -> RResult<TFormula> {
        Ok(match &f.kind {
            FormulaKind::True => TFormula::True,
            FormulaKind::False => TFormula::False,
            FormulaKind::Not(a) => TFormula::Not(Box::new(self.formula(scope, a)?)),
            FormulaKind::And(a, b) => TFormula::And(vec![self.formula(scope, a)?, self.formula(scope, b)?]),
            FormulaKind::Or(a, b) => TFormula::Or(vec![self.formula(scope, a)?, self.formula(scope, b)?]),
            FormulaKind::Implies(a, b) => {
                TFormula::Implies(Box::new(self.formula(scope, a)?), Box::new(self.formula(scope, b)?))
            }
            FormulaKind::Iff(a, b) => {
                TFormula::Iff(Box::new(self.formula(scope, a)?), Box::new(self.formula(scope, b)?))
            }
            FormulaKind::Cmp(op, a, b) => self.comparison(scope, *op, a, b, f.span)?,
            FormulaKind::Mult(m, e) => {
                let v = self.expr(scope, e)?;
                TFormula::Mult(*m, self.need_rel(v, e.span)?)
            }
            FormulaKind::Quant {
                quant,
                var,
                bound,
                body,
            } => {
                let v = self.expr(scope, bound)?;
                let bound_e = self.need_rel(v, bound.span)?;
                if bound_e.arity() != 1 {
                    return Err(ResolveError::new(
                        K::ArityMismatch,
                        bound.span,
                        "quantifier bound must be unary",
                    ));
                }
                let level = scope.depth;
                scope
                    .frames
                    .push((var.name.clone(), Binding::QVar(level, bound_e.ty[0].clone())));
                scope.depth += 1;
                let body_r = self.formula(scope, body);
                scope.depth -= 1;
                scope.frames.pop();
                TFormula::Quant {
                    quant: *quant,
                    level,
                    bound: bound_e,
                    body: Box::new(body_r?),
                }
            }
            FormulaKind::PredCall { name, args } => self.pred_call(scope, name, args, f.span)?,
        })
    }

    fn comparison(&mut self, scope: &mut Scope, op: CmpOp, a: &Expr, b: &Expr, span: Span) -> RResult<TFormula> {
        let va = self.expr(scope, a)?;
        let vb = self.expr(scope, b)?;
        let any_int = matches!(va, Val::Int(_)) || matches!(vb, Val::Int(_));
        match op {
            CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge => {
                let ia = self.need_int(va, a.span)?;
                let ib = self.need_int(vb, b.span)?;
                Ok(TFormula::IntCmp(IntCmp::from_cmp(op).expect("ordering op"), ia, ib))
            }
            CmpOp::Eq | CmpOp::Neq if any_int => {
                let ia = self.need_int(va, a.span)?;
                let ib = self.need_int(vb, b.span)?;
                let eq = TFormula::IntCmp(IntCmp::Eq, ia, ib);
                Ok(if op == CmpOp::Neq {
                    TFormula::Not(Box::new(eq))
                } else {
                    eq
                })
            }
            _ => {
                let ea = self.need_rel(va, a.span)?;
                let eb = self.need_rel(vb, b.span)?;
                if ea.arity() != eb.arity() {
                    return Err(ResolveError::new(
                        K::ArityMismatch,
                        span,
                        format!("cannot compare arity {} with arity {}", ea.arity(), eb.arity()),
                    ));
                }
                Ok(match op {
                    CmpOp::Eq => TFormula::Eq(ea, eb),
                    CmpOp::Neq => TFormula::Not(Box::new(TFormula::Eq(ea, eb))),
                    CmpOp::In => TFormula::In(ea, eb),
                    CmpOp::NotIn => TFormula::Not(Box::new(TFormula::In(ea, eb))),
                    _ => unreachable!(),
                })
            }
        }
    }

    fn pred_call(&mut self, scope: &mut Scope, name: &Ident, args: &[Expr], span: Span) -> RResult<TFormula> {
        let pred = *self.preds.get(name.name.as_str()).ok_or_else(|| {
            let kind =
                if self.actions.contains_key(name.name.as_str()) || self.programs.contains_key(name.name.as_str()) {
                    K::TypeMismatch
                } else {
                    K::UnknownName
                };
            ResolveError::new(kind, name.span, format!("`{}` is not a predicate", name.name))
        })?;
        if self.pred_stack.iter().any(|p| p == &name.name) {
            return Err(ResolveError::new(
                K::Recursion,
                name.span,
                format!("predicate `{}` is recursive", name.name),
            ));
        }
        if pred.params.len() != args.len() {
            return Err(ResolveError::new(
                K::Invalid,
                span,
                format!(
                    "`{}` expects {} argument(s), got {}",
                    name.name,
                    pred.params.len(),
                    args.len()
                ),
            ));
        }
        let params = {
            let saved = std::mem::take(&mut self.errors);
            let d = self.decls(&pred.params, &[]);
            let errs = std::mem::replace(&mut self.errors, saved);
            // declaration errors are reported once, when the predicate itself is checked
            drop(errs);
            d
        };
        let mut frames = Vec::new();
        for ((p, decl), a) in pred.params.iter().zip(&params).zip(args) {
            let v = self.expr(scope, a)?;
            let e = self.need_rel(v, a.span)?;
            if e.arity() != decl.arity() {
                return Err(ResolveError::new(
                    K::ArityMismatch,
                    a.span,
                    format!(
                        "argument has arity {}, parameter `{}` expects {}",
                        e.arity(),
                        p.name.name,
                        decl.arity()
                    ),
                ));
            }
            frames.push((p.name.name.clone(), Binding::Subst(e)));
        }
        let mut inner = Scope {
            frames,
            primable: None,
            depth: scope.depth,
            primed_used: BTreeSet::new(),
        };
        self.pred_stack.push(name.name.clone());
        let body = self.formula(&mut inner, &pred.body);
        self.pred_stack.pop();
        body
    }

    // -- expressions -------------------------------------------------------

    fn need_rel(&mut self, v: Val, _span: Span) -> RResult<TExpr> {
        Ok(match v {
            Val::Rel(e) => e,
            Val::Int(i) => TExpr {
                kind: TExprKind::IntAtom(Box::new(i)),
                ty: vec![ColTy::of(self.int_sig())],
            },
        })
    }

    fn need_int(&mut self, v: Val, span: Span) -> RResult<TInt> {
        match v {
            Val::Int(i) => Ok(i),
            Val::Rel(e) if e.arity() == 1 && e.ty[0].0.iter().all(|&s| s == self.int_sig()) => {
                Ok(TInt::Sum(Box::new(e)))
            }
            Val::Rel(e) => Err(ResolveError::new(
                K::TypeMismatch,
                span,
                format!(
                    "expected an integer, found a relation of type {}",
                    self.type_name(&e.ty)
                ),
            )),
        }
    }

    fn type_name(&self, ty: &RelTy) -> String {
        if ty.is_empty() {
            return "none".into();
        }
        ty.iter()
            .map(|c| {
                c.0.iter()
                    .map(|&s| self.sigs[s].name.as_str())
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect::<Vec<_>>()
            .join(" -> ")
    }

    fn rel_operand(&mut self, scope: &mut Scope, e: &Expr, op: &str) -> RResult<TExpr> {
        match self.expr(scope, e)? {
            Val::Rel(r) => Ok(r),
            Val::Int(_) => Err(ResolveError::new(
                K::TypeMismatch,
                e.span,
                format!("cannot apply `{op}` to an integer"),
            )),
        }
    }

    pub(crate) fn expr_rel(&mut self, scope: &mut Scope, e: &Expr) -> RResult<(TExpr, bool)> {
        match self.expr(scope, e)? {
            Val::Rel(r) => Ok((r, false)),
            Val::Int(i) => Ok((self.need_rel(Val::Int(i), e.span)?, true)),
        }
    }

    fn expr(&mut self, scope: &mut Scope, e: &Expr) -> RResult<Val> {
        let span = e.span;
        let rel = |kind, ty| Ok(Val::Rel(TExpr { kind, ty }));
        match &e.kind {
            ExprKind::Name { name, primed } => self.name(scope, name, *primed, span),
            ExprKind::Int(n) => Ok(Val::Int(TInt::Lit(*n))),
            ExprKind::None => rel(TExprKind::None, vec![ColTy::default()]),
            ExprKind::Univ => rel(TExprKind::Univ, vec![self.all_sigs()]),
            ExprKind::Iden => rel(TExprKind::Iden, vec![self.all_sigs(), self.all_sigs()]),
            ExprKind::Call { name, args } => {
                let op = match name.name.as_str() {
                    "add" => true,
                    "sub" => false,
                    other => {
                        let kind = if self.preds.contains_key(other) {
                            K::TypeMismatch
                        } else {
                            K::UnknownName
                        };
                        return Err(ResolveError::new(
                            kind,
                            name.span,
                            format!("`{other}` is not a function"),
                        ));
                    }
                };
                if args.len() != 2 {
                    return Err(ResolveError::new(
                        K::Invalid,
                        span,
                        format!("`{}` takes two arguments", name.name),
                    ));
                }
                let a = self.expr(scope, &args[0])?;
                let a = self.need_int(a, args[0].span)?;
                let b = self.expr(scope, &args[1])?;
                let b = self.need_int(b, args[1].span)?;
                Ok(Val::Int(if op {
                    TInt::Add(Box::new(a), Box::new(b))
                } else {
                    TInt::Sub(Box::new(a), Box::new(b))
                }))
            }
            ExprKind::Unary(UnOp::Card, a) => {
                let v = self.expr(scope, a)?;
                let r = self.need_rel(v, a.span)?;
                Ok(Val::Int(TInt::Card(Box::new(r))))
            }
            ExprKind::Unary(op, a) => {
                let r = self.rel_operand(scope, a, op.symbol())?;
                if r.arity() != 2 {
                    return Err(ResolveError::new(
                        K::ArityMismatch,
                        span,
                        format!("`{}` needs a binary relation, found arity {}", op.symbol(), r.arity()),
                    ));
                }
                let (kind, ty) = match op {
                    UnOp::Transpose => {
                        let ty = vec![r.ty[1].clone(), r.ty[0].clone()];
                        (TExprKind::Transpose(Box::new(r)), ty)
                    }
                    UnOp::Closure => {
                        let c = r.ty[0].union(&r.ty[1]);
                        (TExprKind::Closure(Box::new(r)), vec![c.clone(), c])
                    }
                    UnOp::ReflexiveClosure => (TExprKind::ReflexiveClosure(Box::new(r)), vec![self.all_sigs(); 2]),
                    UnOp::Card => unreachable!(),
                };
                rel(kind, ty)
            }
            ExprKind::Binary(op, a, b) => {
                let (ea, eb) = match op {
                    BinOp::Join => (self.rel_operand(scope, a, ".")?, self.rel_operand(scope, b, ".")?),
                    _ => (self.expr_rel(scope, a)?.0, self.expr_rel(scope, b)?.0),
                };
                let ty = match op {
                    BinOp::Join => {
                        if ea.arity() + eb.arity() < 3 {
                            return Err(ResolveError::new(
                                K::ArityMismatch,
                                span,
                                format!("join of arity {} and arity {} is ill-formed", ea.arity(), eb.arity()),
                            ));
                        }
                        ea.ty[..ea.arity() - 1].iter().chain(&eb.ty[1..]).cloned().collect()
                    }
                    BinOp::Product => ea.ty.iter().chain(&eb.ty).cloned().collect(),
                    _ => {
                        if ea.arity() != eb.arity() {
                            return Err(ResolveError::new(
                                K::ArityMismatch,
                                span,
                                format!(
                                    "`{}` needs equal arities, found {} and {}",
                                    op.symbol(),
                                    ea.arity(),
                                    eb.arity()
                                ),
                            ));
                        }
                        match op {
                            BinOp::Union | BinOp::Override => {
                                ea.ty.iter().zip(&eb.ty).map(|(x, y)| x.union(y)).collect()
                            }
                            BinOp::Inter => ea.ty.iter().zip(&eb.ty).map(|(x, y)| x.intersect(y)).collect(),
                            _ => ea.ty.clone(),
                        }
                    }
                };
                rel(TExprKind::Binary(*op, Box::new(ea), Box::new(eb)), ty)
            }
        }
    }

    /// The signature an atom name such as `Node2` would belong to.
    fn atom_sig(&self, name: &str) -> Option<SigId> {
        if !self.atom_names {
            return None;
        }
        let digits = name.trim_end_matches(|c: char| c.is_ascii_digit());
        if digits.len() == name.len() {
            return None;
        }
        self.sigs.iter().position(|s| !s.one && !s.int && s.name == digits)
    }

    fn name(&mut self, scope: &mut Scope, name: &str, primed: bool, span: Span) -> RResult<Val> {
        if primed {
            let ok = scope.primable.as_ref().is_some_and(|p| p.contains(name));
            if !ok {
                return Err(ResolveError::new(
                    K::Invalid,
                    span,
                    format!("`{name}'` is only allowed on action parameters in a postcondition"),
                ));
            }
        }
        match scope.lookup(name).cloned() {
            Some(Binding::Var(ty)) => {
                if primed {
                    scope.primed_used.insert(name.to_string());
                }
                Ok(Val::Rel(TExpr {
                    kind: TExprKind::Var {
                        name: name.to_string(),
                        primed,
                    },
                    ty,
                }))
            }
            Some(Binding::Subst(e)) => Ok(Val::Rel(e)),
            Some(Binding::QVar(level, col)) => Ok(Val::Rel(TExpr {
                kind: TExprKind::QVar(level),
                ty: vec![col],
            })),
            None => match self.sigs.iter().position(|s| s.name == name) {
                Some(id) => Ok(Val::Rel(TExpr {
                    kind: TExprKind::Sig(id),
                    ty: vec![ColTy::of(id)],
                })),
                None => match self.atom_sig(name) {
                    Some(id) => Ok(Val::Rel(TExpr {
                        kind: TExprKind::Atom(name.to_string()),
                        ty: vec![ColTy::of(id)],
                    })),
                    None => Err(ResolveError::new(
                        K::UnknownName,
                        span,
                        format!("unknown name `{name}`"),
                    )),
                },
            },
        }
    }
}

fn role_of(p: &Program) -> Role {
    match (&p.origin, &p.kind) {
        (Some(Origin::IfThen(_)), _) => Role::IfThen,
        (Some(Origin::IfElse(_)), _) => Role::IfElse,
        (Some(Origin::If(_)), _) => Role::If,
        (Some(Origin::LoopGuard(_)), _) => Role::LoopGuard,
        (Some(Origin::LoopExit(_)), _) => Role::LoopExit,
        (Some(Origin::Loop(_)), _) => Role::Loop,
        (Some(Origin::While(_)), _) => Role::While,
        (Some(Origin::Skip), _) => Role::Skip,
        (None, ProgramKind::Atomic(Atomic::Assign { .. })) => Role::Assign,
        (None, _) => Role::Plain,
    }
}

fn label_of(p: &Program) -> String {
    match (&p.origin, &p.kind) {
        (Some(Origin::IfThen(c)), _) => format!("if {}: then-branch taken", pretty::formula(c)),
        (Some(Origin::IfElse(c)), _) => format!("if {}: else-branch taken", pretty::formula(c)),
        (Some(Origin::If(c)), _) => format!("if {}", pretty::formula(c)),
        (Some(Origin::LoopGuard(c)), _) => format!("while {}: enter body", pretty::formula(c)),
        (Some(Origin::LoopExit(c)), _) => format!("while {}: exit loop", pretty::formula(c)),
        (Some(Origin::Loop(c)), _) | (Some(Origin::While(c)), _) => {
            format!("while {}", pretty::formula(c))
        }
        (Some(Origin::Skip), _) => "skip".to_string(),
        (None, ProgramKind::Choice(..)) => "choice".to_string(),
        (None, ProgramKind::Seq(..)) => "sequence".to_string(),
        (None, ProgramKind::Star(..)) => "iteration".to_string(),
        (None, _) => pretty::program(p),
    }
}

/// Resolves a standalone expression or formula against a set of state
/// variables, with the model's signatures and predicates in scope.
pub fn resolve_watch(
    model: &TypedModel,
    vars: &[VarDecl],
    term: &super::parser::WatchTerm,
) -> Result<WatchResolved, ResolveError> {
    let mut r = Resolver::new(&model.surface);
    r.atom_names = true;
    let mut scope = Scope::vars(vars);
    match term {
        super::parser::WatchTerm::Formula(f) => r.formula(&mut scope, f).map(WatchResolved::Formula),
        super::parser::WatchTerm::Expr(e) => match r.expr(&mut scope, e)? {
            Val::Rel(t) => Ok(WatchResolved::Rel(t)),
            Val::Int(i) => Ok(WatchResolved::Int(i)),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WatchResolved {
    Rel(TExpr),
    Int(TInt),
    Formula(TFormula),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{desugar::desugar, parser::parse_model};

    const LIST: &str = "one sig null {} sig List {} sig Node {}\n";

    fn check(src: &str) -> Result<TypedModel, Vec<ResolveError>> {
        resolve(&desugar(&parse_model(&format!("{LIST}{src}")).unwrap()))
    }

    fn watch(vars: &str, text: &str) -> Result<WatchResolved, ResolveError> {
        let m = check(&format!("program p[{vars}] {{ skip }}")).unwrap();
        let vars = m.programs[0].params.clone();
        resolve_watch(&m, &vars, &super::super::parser::parse_watch(text).unwrap())
    }

    #[test]
    fn join_through_functional_field() {
        let r = watch("thiz: List, header: List -> one(Node+null)", "thiz.header").unwrap();
        let WatchResolved::Rel(e) = r else { panic!() };
        assert_eq!(e.arity(), 1);
        // Node is sig 2, null is sig 0
        assert_eq!(e.ty[0], ColTy([0, 2].into_iter().collect()));
    }

    #[test]
    fn unary_self_join_is_an_arity_error() {
        let err = watch("x: Node", "x.x").unwrap_err();
        assert_eq!(err.kind, K::ArityMismatch);
    }

    #[test]
    fn cardinality_is_int_typed() {
        let r = watch(
            "thiz: List, header: List -> one(Node+null), next: Node -> one(Node+null)",
            "#(thiz.header.*next-null)",
        )
        .unwrap();
        assert!(matches!(r, WatchResolved::Int(TInt::Card(_))));
    }

    #[test]
    fn joining_an_integer_with_a_closure() {
        let err = watch("next: Node -> one(Node+null)", "sub[1, 1].*next").unwrap_err();
        assert_eq!(err.kind, K::TypeMismatch);
    }

    #[test]
    fn unknown_names_and_duplicates() {
        let errs = check("program p[a: List, a: Node] { b := a }").unwrap_err();
        let kinds: Vec<_> = errs.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![K::DuplicateName, K::UnknownName]);
    }

    #[test]
    fn recursion_is_rejected() {
        let errs = check("program p[] { q[] } program q[] { p[] }").unwrap_err();
        assert!(errs.iter().any(|e| e.kind == K::Recursion));
    }

    #[test]
    fn predicate_is_expanded_in_place() {
        let m = check(
            "pred isNotNull[n: Node+null] { n != null }
             program p[c: Node+null] { [isNotNull[c]]? }",
        )
        .unwrap();
        let TProgKind::Test(f) = &m.programs[0].body.kind else {
            panic!()
        };
        let TFormula::Not(inner) = f else { panic!("{f:?}") };
        let TFormula::Eq(lhs, _) = inner.as_ref() else { panic!() };
        assert_eq!(
            lhs.kind,
            TExprKind::Var {
                name: "c".into(),
                primed: false
            }
        );
    }

    #[test]
    fn action_modifies_only_primed_params() {
        let m = check(
            "action setHead[l: List, h: List -> one(Node+null)] { pre { } post { h' = h ++ (l -> null) } }
             program p[a: List, b: List -> one(Node+null)] { setHead[a, b] }",
        )
        .unwrap();
        assert_eq!(m.actions[0].modifies, vec!["h".to_string()]);
        let TProgKind::Atomic(at) = &m.programs[0].body.kind else {
            panic!()
        };
        assert_eq!(at.modifies, vec!["b".to_string()]);
    }

    #[test]
    fn resolution_is_deterministic() {
        let src = "program p[a: List] { b := c; d := a.a }";
        assert_eq!(check(src).unwrap_err(), check(src).unwrap_err());
    }

    #[test]
    fn primes_outside_postconditions() {
        let errs = check("program p[a: List] { a := a' }").unwrap_err();
        assert_eq!(errs[0].kind, K::Invalid);
    }
}
