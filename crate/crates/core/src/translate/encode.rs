//! Program and formula encoding over a [`StateLayout`].

use super::circuit::{Circuit, Gate};
use super::layout::{candidate_tuples, Matrix, StateLayout, Symbol};
use super::source_map::{Detail, Entry, SourceMap, StarBlock, Tag};
use super::{Bounds, TranslateError};
use crate::lang::ast::{BinOp, Mult, Quant};
use crate::lang::typed::*;
use crate::relational::{build_universe, AtomId, Tuple, Universe};
use std::collections::{BTreeMap, HashMap};

/// A call-site context: the frame a program body is encoded in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ctx {
    pub parent: Option<usize>,
    /// Invoked program, `None` for the assertion itself.
    pub program: Option<usize>,
    /// Frame name -> layout symbol name.
    pub frame: Vec<(String, String)>,
}

impl Ctx {
    pub fn symbol<'a>(&'a self, name: &str) -> Option<&'a str> {
        self.frame.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_str())
    }
}

/// (caller ctx, invoke node) -> callee ctx.
type Sites = HashMap<(usize, NodeId), usize>;

/// Assigns a context to every invocation reachable from `body`, in
/// depth-first order, and collects the symbols they introduce.
fn plan_contexts(
    model: &TypedModel,
    params: &[VarDecl],
    body: &TProg,
) -> Result<(Vec<Ctx>, Vec<Symbol>, Sites), TranslateError> {
    let mut symbols: Vec<Symbol> = params
        .iter()
        .map(|p| Symbol {
            name: p.name.clone(),
            decl: p.clone(),
            ctx: 0,
            local: false,
        })
        .collect();
    let root = Ctx {
        parent: None,
        program: None,
        frame: params.iter().map(|p| (p.name.clone(), p.name.clone())).collect(),
    };
    let mut ctxs = vec![root];
    let mut sites = HashMap::new();
    visit(model, body, 0, &mut ctxs, &mut symbols, &mut sites, &mut Vec::new())?;
    Ok((ctxs, symbols, sites))
}

fn visit(
    model: &TypedModel,
    p: &TProg,
    ctx: usize,
    ctxs: &mut Vec<Ctx>,
    symbols: &mut Vec<Symbol>,
    sites: &mut Sites,
    stack: &mut Vec<usize>,
) -> Result<(), TranslateError> {
    match &p.kind {
        TProgKind::Choice(a, b) | TProgKind::Seq(a, b) => {
            visit(model, a, ctx, ctxs, symbols, sites, stack)?;
            visit(model, b, ctx, ctxs, symbols, sites, stack)
        }
        TProgKind::Star(b) => visit(model, b, ctx, ctxs, symbols, sites, stack),
        TProgKind::Invoke { program, args } => {
            if stack.contains(program) {
                return Err(TranslateError::Recursion(model.programs[*program].name.clone()));
            }
            let callee = &model.programs[*program];
            let id = ctxs.len();
            let mut frame = Vec::new();
            for (param, arg) in callee.params.iter().zip(args) {
                let sym = ctxs[ctx]
                    .symbol(arg)
                    .expect("argument resolved in caller frame")
                    .to_string();
                frame.push((param.name.clone(), sym));
            }
            for local in &callee.locals {
                let name = if symbols.iter().any(|s| s.name == local.name) {
                    format!("{}${id}", local.name)
                } else {
                    local.name.clone()
                };
                symbols.push(Symbol {
                    name: name.clone(),
                    decl: local.clone(),
                    ctx: id,
                    local: true,
                });
                frame.push((local.name.clone(), name));
            }
            ctxs.push(Ctx {
                parent: Some(ctx),
                program: Some(*program),
                frame,
            });
            sites.insert((ctx, p.id), id);
            stack.push(*program);
            let r = visit(model, &callee.body, id, ctxs, symbols, sites, stack);
            stack.pop();
            r
        }
        TProgKind::Atomic(_) | TProgKind::Test(_) => Ok(()),
    }
}

pub struct Encoder<'m> {
    pub model: &'m TypedModel,
    pub universe: Universe,
    pub c: Circuit,
    pub layout: StateLayout,
    pub ctxs: Vec<Ctx>,
    pub map: SourceMap,
    k: usize,
    sites: Sites,
    widths: HashMap<(NodeId, usize), usize>,
    quant: Vec<AtomId>,
}

/// Where names in a formula live while it is being encoded.
struct Frame<'f> {
    /// Formula name -> layout symbol index.
    names: &'f [(String, usize)],
    pre: usize,
    post: Option<usize>,
}

impl<'m> Encoder<'m> {
    pub fn new(model: &'m TypedModel, a: &TAssertion, bounds: &Bounds) -> Result<Self, TranslateError> {
        bounds.validate()?;
        for name in bounds.scope_for.keys() {
            let known = model.sigs.iter().any(|s| &s.name == name && !s.one && !s.int);
            if !known {
                return Err(TranslateError::Config(format!(
                    "`{name}` is not a signature whose scope can be set"
                )));
            }
        }
        let universe = build_universe(&model.sigs, bounds.scope, &bounds.scope_for, bounds.bitwidth);
        let (ctxs, symbols, sites) = plan_contexts(model, &a.params, &a.program)?;
        let mut enc = Encoder {
            model,
            universe,
            c: Circuit::new(),
            layout: StateLayout::empty(),
            ctxs,
            map: SourceMap::default(),
            k: bounds.unroll,
            sites,
            widths: HashMap::new(),
            quant: Vec::new(),
        };
        let states = enc.width(&a.program, 0) + 1;
        enc.layout = StateLayout::new(&mut enc.c, &enc.universe, symbols, states);
        Ok(enc)
    }

    /// Number of state transitions `p` spans.
    pub fn width(&mut self, p: &TProg, ctx: usize) -> usize {
        if let Some(&w) = self.widths.get(&(p.id, ctx)) {
            return w;
        }
        let w = match &p.kind {
            TProgKind::Atomic(_) => 1,
            TProgKind::Test(_) => 0,
            TProgKind::Seq(a, b) => self.width(a, ctx) + self.width(b, ctx),
            TProgKind::Choice(a, b) => self.width(a, ctx).max(self.width(b, ctx)),
            TProgKind::Star(b) => self.k * self.width(b, ctx),
            TProgKind::Invoke { program, .. } => {
                let callee = self.sites[&(ctx, p.id)];
                self.width(&self.model.programs[*program].body, callee)
            }
        };
        self.widths.insert((p.id, ctx), w);
        w
    }

    fn program_body(&self, program: usize) -> &'m TProg {
        &self.model.programs[program].body
    }

    fn ctx_names(&self, ctx: usize) -> Vec<(String, usize)> {
        self.ctxs[ctx]
            .frame
            .iter()
            .map(|(n, s)| {
                (
                    n.clone(),
                    self.layout.symbol_index(s).expect("context symbol in layout"),
                )
            })
            .collect()
    }

    // -- states -----------------------------------------------------------

    /// All symbols equal between states `s` and `t`, except those in `except`.
    fn frame(&mut self, s: usize, t: usize, except: &[usize]) -> Gate {
        let mut parts = Vec::new();
        for sym in 0..self.layout.symbols.len() {
            if except.contains(&sym) {
                continue;
            }
            let a = self.layout.matrix(sym, s).clone();
            let b = self.layout.matrix(sym, t).clone();
            for (tuple, ga) in &a.entries {
                parts.push(self.c.iff(*ga, b.get(tuple)));
            }
        }
        self.c.and(parts)
    }

    /// States `from..=to` all equal.
    fn stutter(&mut self, from: usize, to: usize) -> Gate {
        let parts: Vec<Gate> = (from..to).map(|s| self.frame(s, s + 1, &[])).collect();
        self.c.and(parts)
    }

    /// Multiplicity constraints of one symbol at one state.
    pub fn well_formed(&mut self, sym: usize, state: usize) -> Gate {
        let m = self.layout.matrix(sym, state).clone();
        match self.layout.mult(sym) {
            VarMult::Set => Gate::TRUE,
            VarMult::One => {
                let gates: Vec<Gate> = m.entries.values().copied().collect();
                self.exactly_one(&gates)
            }
            VarMult::Functional => {
                let mut rows: BTreeMap<AtomId, Vec<Gate>> = BTreeMap::new();
                for (t, g) in &m.entries {
                    rows.entry(t[0]).or_default().push(*g);
                }
                let parts: Vec<Gate> = rows.values().map(|r| self.exactly_one(r)).collect();
                self.c.and(parts)
            }
        }
    }

    pub fn well_formed_state(&mut self, state: usize) -> Gate {
        let parts: Vec<Gate> = (0..self.layout.symbols.len())
            .map(|s| self.well_formed(s, state))
            .collect();
        self.c.and(parts)
    }

    fn exactly_one(&mut self, gates: &[Gate]) -> Gate {
        let some = self.c.or(gates.iter().copied());
        let lone = self.at_most_one(gates);
        self.c.and2(some, lone)
    }

    /// Pairwise exclusion for up to 8 inputs; above that, a sequential
    /// counter whose running "seen one already" flags are prefix disjunctions.
    fn at_most_one(&mut self, gates: &[Gate]) -> Gate {
        let mut parts = Vec::new();
        if gates.len() <= 8 {
            for i in 0..gates.len() {
                for j in i + 1..gates.len() {
                    let both = self.c.and2(gates[i], gates[j]);
                    parts.push(self.c.not(both));
                }
            }
        } else {
            let mut seen = gates[0];
            for &g in &gates[1..] {
                let clash = self.c.and2(seen, g);
                parts.push(self.c.not(clash));
                seen = self.c.or2(seen, g);
            }
        }
        self.c.and(parts)
    }

    // -- programs ---------------------------------------------------------

    fn reserve(&mut self, p: &TProg, ctx: usize, pre: usize, post: usize, tag: Tag) -> usize {
        self.map.push(Entry {
            node: p.id,
            ctx,
            span: p.span,
            pre,
            post,
            gate: Gate::FALSE,
            tag,
            children: Vec::new(),
            detail: Detail::None,
        })
    }

    /// Encodes `p` running from state `s` to `s + width(p)`. Returns the
    /// gate and the index of the entry recorded for `p`.
    pub fn program(&mut self, p: &TProg, ctx: usize, s: usize) -> (Gate, usize) {
        let w = self.width(p, ctx);
        match &p.kind {
            TProgKind::Atomic(at) => {
                let e = self.reserve(p, ctx, s, s + 1, Tag::Atomic);
                let g = self.atomic(at, ctx, s);
                self.map.finish(e, g, Vec::new(), Detail::None);
                (g, e)
            }
            TProgKind::Test(f) => {
                let e = self.reserve(p, ctx, s, s, Tag::Test);
                let names = self.ctx_names(ctx);
                let g = self.formula(
                    f,
                    &Frame {
                        names: &names,
                        pre: s,
                        post: None,
                    },
                );
                self.map.finish(e, g, Vec::new(), Detail::None);
                (g, e)
            }
            TProgKind::Seq(a, b) => {
                let e = self.reserve(p, ctx, s, s + w, Tag::Seq);
                let wa = self.width(a, ctx);
                let (ga, ea) = self.program(a, ctx, s);
                let (gb, eb) = self.program(b, ctx, s + wa);
                let g = self.c.and2(ga, gb);
                self.map.finish(e, g, vec![ea, eb], Detail::None);
                (g, e)
            }
            TProgKind::Choice(a, b) => {
                let e = self.reserve(p, ctx, s, s + w, Tag::Choice);
                let (wa, wb) = (self.width(a, ctx), self.width(b, ctx));
                let (ga, ea) = self.program(a, ctx, s);
                let pad_a = self.stutter(s + wa, s + w);
                let left = self.c.and2(ga, pad_a);
                let (gb, eb) = self.program(b, ctx, s);
                let pad_b = self.stutter(s + wb, s + w);
                let right = self.c.and2(gb, pad_b);
                let g = self.c.choice_or(left, right);
                let detail = Detail::Choice {
                    left,
                    right,
                    left_width: wa,
                    right_width: wb,
                };
                self.map.finish(e, g, vec![ea, eb], detail);
                (g, e)
            }
            TProgKind::Star(body) => {
                let e = self.reserve(p, ctx, s, s + w, Tag::Star);
                let bw = self.width(body, ctx);
                let end = s + w;
                let mut bodies = Vec::new();
                for j in 0..self.k {
                    bodies.push(self.program(body, ctx, s + j * bw));
                }
                let exits: Vec<Gate> = (0..=self.k).map(|j| self.stutter(s + j * bw, end)).collect();
                let mut blocks = vec![StarBlock {
                    state: end,
                    gate: exits[self.k],
                    exit: exits[self.k],
                    iterate: None,
                    body: None,
                }];
                let mut next = exits[self.k];
                for j in (0..self.k).rev() {
                    let iterate = self.c.and2(bodies[j].0, next);
                    let gate = self.c.choice_or(exits[j], iterate);
                    blocks.push(StarBlock {
                        state: s + j * bw,
                        gate,
                        exit: exits[j],
                        iterate: Some(iterate),
                        body: Some(bodies[j].1),
                    });
                    next = gate;
                }
                blocks.reverse();
                let children = bodies.iter().map(|b| b.1).collect();
                self.map.finish(e, next, children, Detail::Star { width: bw, blocks });
                (next, e)
            }
            TProgKind::Invoke { program, .. } => {
                let e = self.reserve(p, ctx, s, s + w, Tag::Invoke);
                let callee = self.sites[&(ctx, p.id)];
                let (g, eb) = self.program(self.program_body(*program), callee, s);
                self.map.finish(e, g, vec![eb], Detail::Invoke { callee_ctx: callee });
                (g, e)
            }
        }
    }

    /// Binding of an atomic step's formula names to layout symbols.
    pub fn atomic_names(&self, at: &TAtomic, ctx: usize) -> Vec<(String, usize)> {
        let frame = self.ctx_names(ctx);
        let lookup = |n: &str| frame.iter().find(|(f, _)| f == n).map(|(_, s)| *s);
        if at.renaming.is_empty() {
            return frame.clone();
        }
        at.renaming
            .iter()
            .map(|(param, arg)| (param.clone(), lookup(arg).expect("argument in frame")))
            .collect()
    }

    fn atomic(&mut self, at: &TAtomic, ctx: usize, s: usize) -> Gate {
        let names = self.atomic_names(at, ctx);
        let pre = self.formula(
            &at.pre,
            &Frame {
                names: &names,
                pre: s,
                post: None,
            },
        );
        let post = self.formula(
            &at.post,
            &Frame {
                names: &names,
                pre: s,
                post: Some(s + 1),
            },
        );
        let frame = self.ctx_names(ctx);
        let modified: Vec<usize> = at
            .modifies
            .iter()
            .map(|m| {
                frame
                    .iter()
                    .find(|(f, _)| f == m)
                    .map(|(_, s)| *s)
                    .expect("modified symbol in frame")
            })
            .collect();
        let keep = self.frame(s, s + 1, &modified);
        let mut parts = vec![pre, post, keep];
        for &m in &modified {
            parts.push(self.well_formed(m, s + 1));
        }
        self.c.and(parts)
    }

    // -- loop-bound probe -------------------------------------------------

    /// Some execution prefix of `p` from `s` reaches a loop whose bound is
    /// exhausted while its body could still run.
    pub fn reach(&mut self, p: &TProg, ctx: usize, s: usize) -> Gate {
        match &p.kind {
            TProgKind::Atomic(_) | TProgKind::Test(_) => Gate::FALSE,
            TProgKind::Seq(a, b) => {
                let wa = self.width(a, ctx);
                let ra = self.reach(a, ctx, s);
                let (full, _) = self.program(a, ctx, s);
                let rb = self.reach(b, ctx, s + wa);
                let then = self.c.and2(full, rb);
                self.c.or2(ra, then)
            }
            TProgKind::Choice(a, b) => {
                let ra = self.reach(a, ctx, s);
                let rb = self.reach(b, ctx, s);
                self.c.or2(ra, rb)
            }
            TProgKind::Star(body) => {
                let bw = self.width(body, ctx);
                let mut acc = self.enabled(body, ctx, s + self.k * bw);
                for j in (0..self.k).rev() {
                    let t = s + j * bw;
                    let inner = self.reach(body, ctx, t);
                    let (full, _) = self.program(body, ctx, t);
                    let go_on = self.c.and2(full, acc);
                    acc = self.c.or2(inner, go_on);
                }
                acc
            }
            TProgKind::Invoke { program, .. } => {
                let callee = self.sites[&(ctx, p.id)];
                self.reach(self.program_body(*program), callee, s)
            }
        }
    }

    /// `p` can take its first step from `s`: its leading tests hold and its
    /// first atomic step's precondition holds.
    fn enabled(&mut self, p: &TProg, ctx: usize, s: usize) -> Gate {
        match &p.kind {
            TProgKind::Test(f) => {
                let names = self.ctx_names(ctx);
                self.formula(
                    f,
                    &Frame {
                        names: &names,
                        pre: s,
                        post: None,
                    },
                )
            }
            TProgKind::Atomic(at) => {
                let names = self.atomic_names(at, ctx);
                self.formula(
                    &at.pre,
                    &Frame {
                        names: &names,
                        pre: s,
                        post: None,
                    },
                )
            }
            TProgKind::Seq(a, b) => {
                let ea = self.enabled(a, ctx, s);
                if self.width(a, ctx) == 0 {
                    let eb = self.enabled(b, ctx, s);
                    self.c.and2(ea, eb)
                } else {
                    ea
                }
            }
            TProgKind::Choice(a, b) => {
                let ea = self.enabled(a, ctx, s);
                let eb = self.enabled(b, ctx, s);
                self.c.or2(ea, eb)
            }
            TProgKind::Star(_) => Gate::TRUE,
            TProgKind::Invoke { program, .. } => {
                let callee = self.sites[&(ctx, p.id)];
                self.enabled(self.program_body(*program), callee, s)
            }
        }
    }

    // -- formulas ---------------------------------------------------------

    fn formula(&mut self, f: &TFormula, fr: &Frame) -> Gate {
        match f {
            TFormula::True => Gate::TRUE,
            TFormula::False => Gate::FALSE,
            TFormula::Not(a) => {
                let g = self.formula(a, fr);
                self.c.not(g)
            }
            TFormula::And(fs) => {
                let gs: Vec<Gate> = fs.iter().map(|g| self.formula(g, fr)).collect();
                self.c.and(gs)
            }
            TFormula::Or(fs) => {
                let gs: Vec<Gate> = fs.iter().map(|g| self.formula(g, fr)).collect();
                self.c.or(gs)
            }
            TFormula::Implies(a, b) => {
                let (a, b) = (self.formula(a, fr), self.formula(b, fr));
                self.c.implies(a, b)
            }
            TFormula::Iff(a, b) => {
                let (a, b) = (self.formula(a, fr), self.formula(b, fr));
                self.c.iff(a, b)
            }
            TFormula::Eq(a, b) => {
                let (a, b) = (self.expr(a, fr), self.expr(b, fr));
                let keys: Vec<Tuple> = a.entries.keys().chain(b.entries.keys()).cloned().collect();
                let mut parts = Vec::new();
                for k in keys {
                    parts.push(self.c.iff(a.get(&k), b.get(&k)));
                }
                self.c.and(parts)
            }
            TFormula::In(a, b) => {
                let (a, b) = (self.expr(a, fr), self.expr(b, fr));
                let mut parts = Vec::new();
                for (k, g) in &a.entries {
                    parts.push(self.c.implies(*g, b.get(k)));
                }
                self.c.and(parts)
            }
            TFormula::IntCmp(op, a, b) => {
                let (a, b) = (self.int(a, fr), self.int(b, fr));
                match op {
                    IntCmp::Eq => self.bv_eq(&a, &b),
                    IntCmp::Lt => self.bv_lt(&a, &b),
                    IntCmp::Gt => self.bv_lt(&b, &a),
                    IntCmp::Le => {
                        let gt = self.bv_lt(&b, &a);
                        self.c.not(gt)
                    }
                    IntCmp::Ge => {
                        let lt = self.bv_lt(&a, &b);
                        self.c.not(lt)
                    }
                }
            }
            TFormula::Mult(m, e) => {
                let gates: Vec<Gate> = self.expr(e, fr).entries.into_values().collect();
                match m {
                    Mult::Some => self.c.or(gates),
                    Mult::No => {
                        let some = self.c.or(gates);
                        self.c.not(some)
                    }
                    Mult::Lone => self.at_most_one(&gates),
                    Mult::One => self.exactly_one(&gates),
                }
            }
            TFormula::Quant {
                quant,
                level,
                bound,
                body,
            } => {
                let b = self.expr(bound, fr);
                self.quant.truncate(*level);
                let mut parts = Vec::new();
                for (t, g) in &b.entries {
                    self.quant.push(t[0]);
                    let inner = self.formula(body, fr);
                    self.quant.pop();
                    parts.push(match quant {
                        Quant::All => self.c.implies(*g, inner),
                        Quant::Some => self.c.and2(*g, inner),
                    });
                }
                match quant {
                    Quant::All => self.c.and(parts),
                    Quant::Some => self.c.or(parts),
                }
            }
        }
    }

    fn expr(&mut self, e: &TExpr, fr: &Frame) -> Matrix {
        let u = &self.universe;
        match &e.kind {
            TExprKind::Var { name, primed } => {
                let sym = fr
                    .names
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, s)| *s)
                    .expect("name bound in frame");
                let state = if *primed {
                    fr.post.expect("primed name outside a postcondition")
                } else {
                    fr.pre
                };
                self.layout.matrix(sym, state).clone()
            }
            TExprKind::Sig(s) => Matrix::constant(1, u.sig_atoms(*s).iter().map(|&a| vec![a])),
            TExprKind::QVar(level) => Matrix::constant(1, [vec![self.quant[*level]]]),
            TExprKind::None => Matrix::empty(1),
            TExprKind::Univ => Matrix::constant(1, u.atoms().map(|a| vec![a])),
            TExprKind::Iden => Matrix::constant(2, u.atoms().map(|a| vec![a, a])),
            TExprKind::Atom(name) => match u.atom(name) {
                Some(a) => Matrix::constant(1, [vec![a]]),
                None => Matrix::empty(1),
            },
            TExprKind::Binary(op, a, b) => {
                let (a, b) = (self.expr(a, fr), self.expr(b, fr));
                match op {
                    BinOp::Union => self.union(&a, &b),
                    BinOp::Inter => {
                        let mut out = Matrix::empty(a.arity);
                        for (k, g) in &a.entries {
                            if let Some(h) = b.entries.get(k) {
                                out.entries.insert(k.clone(), self.c.and2(*g, *h));
                            }
                        }
                        out
                    }
                    BinOp::Diff => {
                        let mut out = Matrix::empty(a.arity);
                        for (k, g) in &a.entries {
                            let nb = self.c.not(b.get(k));
                            out.entries.insert(k.clone(), self.c.and2(*g, nb));
                        }
                        out
                    }
                    BinOp::Product => {
                        let mut out = Matrix::empty(a.arity + b.arity);
                        for (ka, ga) in &a.entries {
                            for (kb, gb) in &b.entries {
                                out.entries.insert([ka.as_slice(), kb].concat(), self.c.and2(*ga, *gb));
                            }
                        }
                        out
                    }
                    BinOp::Join => self.join(&a, &b),
                    BinOp::Override => {
                        let mut dom: BTreeMap<AtomId, Vec<Gate>> = BTreeMap::new();
                        for (k, g) in &b.entries {
                            dom.entry(k[0]).or_default().push(*g);
                        }
                        let mut dom_g = BTreeMap::new();
                        for (x, gs) in dom {
                            dom_g.insert(x, self.c.or(gs));
                        }
                        let mut out = b.clone();
                        for (k, g) in &a.entries {
                            let covered = dom_g.get(&k[0]).copied().unwrap_or(Gate::FALSE);
                            let nc = self.c.not(covered);
                            let kept = self.c.and2(*g, nc);
                            let prev = out.get(k);
                            out.entries.insert(k.clone(), self.c.or2(prev, kept));
                        }
                        out
                    }
                }
            }
            TExprKind::Transpose(a) => {
                let a = self.expr(a, fr);
                Matrix {
                    arity: 2,
                    entries: a.entries.into_iter().map(|(k, g)| (vec![k[1], k[0]], g)).collect(),
                }
            }
            TExprKind::Closure(a) => {
                let a = self.expr(a, fr);
                self.closure(&a)
            }
            TExprKind::ReflexiveClosure(a) => {
                let a = self.expr(a, fr);
                let cl = self.closure(&a);
                let id = Matrix::constant(2, self.universe.atoms().map(|x| vec![x, x]));
                self.union(&cl, &id)
            }
            TExprKind::IntAtom(i) => {
                let bits = self.int(i, fr);
                let mut out = Matrix::empty(1);
                let int_sig = self.model.int_sig();
                for &a in self.universe.sig_atoms(int_sig).to_vec().iter() {
                    let v = self.universe.int_value(a).expect("int atom");
                    let k = self.bv_const(v);
                    let g = self.bv_eq(&bits, &k);
                    if g != Gate::FALSE {
                        out.entries.insert(vec![a], g);
                    }
                }
                out
            }
        }
    }

    fn union(&mut self, a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = a.clone();
        for (k, g) in &b.entries {
            let prev = out.get(k);
            out.entries.insert(k.clone(), self.c.or2(prev, *g));
        }
        out
    }

    fn join(&mut self, a: &Matrix, b: &Matrix) -> Matrix {
        let mut by_first: BTreeMap<AtomId, Vec<(&Tuple, Gate)>> = BTreeMap::new();
        for (k, g) in &b.entries {
            by_first.entry(k[0]).or_default().push((k, *g));
        }
        let mut acc: BTreeMap<Tuple, Vec<Gate>> = BTreeMap::new();
        for (ka, ga) in &a.entries {
            let (last, prefix) = ka.split_last().expect("arity >= 1");
            for (kb, gb) in by_first.get(last).into_iter().flatten() {
                let g = self.c.and2(*ga, *gb);
                acc.entry([prefix, &kb[1..]].concat()).or_default().push(g);
            }
        }
        let mut out = Matrix::empty(a.arity + b.arity - 2);
        for (k, gs) in acc {
            let g = self.c.or(gs);
            if g != Gate::FALSE {
                out.entries.insert(k, g);
            }
        }
        out
    }

    /// Transitive closure by repeated squaring: after `i` rounds the matrix
    /// holds every path of length at most `2^i`.
    fn closure(&mut self, r: &Matrix) -> Matrix {
        let mut atoms: Vec<AtomId> = r.entries.keys().flatten().copied().collect();
        atoms.sort_unstable();
        atoms.dedup();
        let mut acc = r.clone();
        let mut reach = 1;
        while reach < atoms.len() {
            let sq = self.join(&acc, &acc);
            acc = self.union(&acc, &sq);
            reach *= 2;
        }
        acc
    }

    // -- integers ---------------------------------------------------------

    fn bits(&self) -> usize {
        self.universe.bitwidth() as usize
    }

    fn bv_const(&self, v: i64) -> Vec<Gate> {
        let v = self.universe.wrap(v);
        (0..self.bits()).map(|i| self.c.constant((v >> i) & 1 == 1)).collect()
    }

    fn bv_add(&mut self, a: &[Gate], b: &[Gate], carry_in: Gate) -> Vec<Gate> {
        let mut carry = carry_in;
        let mut out = Vec::with_capacity(a.len());
        for i in 0..a.len() {
            let x = self.c.xor(a[i], b[i]);
            out.push(self.c.xor(x, carry));
            let both = self.c.and2(a[i], b[i]);
            let prop = self.c.and2(x, carry);
            carry = self.c.or2(both, prop);
        }
        out
    }

    fn bv_sub(&mut self, a: &[Gate], b: &[Gate]) -> Vec<Gate> {
        let nb: Vec<Gate> = b.iter().map(|&g| self.c.not(g)).collect();
        self.bv_add(a, &nb, Gate::TRUE)
    }

    fn bv_eq(&mut self, a: &[Gate], b: &[Gate]) -> Gate {
        let parts: Vec<Gate> = a.iter().zip(b).map(|(&x, &y)| self.c.iff(x, y)).collect();
        self.c.and(parts)
    }

    /// Signed less-than: flip the sign bits and compare unsigned.
    fn bv_lt(&mut self, a: &[Gate], b: &[Gate]) -> Gate {
        let n = a.len();
        let mut lt = Gate::FALSE;
        for i in 0..n {
            let (x, y) = if i == n - 1 {
                (self.c.not(a[i]), self.c.not(b[i]))
            } else {
                (a[i], b[i])
            };
            let nx = self.c.not(x);
            let here = self.c.and2(nx, y);
            let same = self.c.iff(x, y);
            let below = self.c.and2(same, lt);
            lt = self.c.or2(here, below);
        }
        lt
    }

    fn int(&mut self, i: &TInt, fr: &Frame) -> Vec<Gate> {
        match i {
            TInt::Lit(n) => self.bv_const(*n),
            TInt::Add(a, b) => {
                let (a, b) = (self.int(a, fr), self.int(b, fr));
                self.bv_add(&a, &b, Gate::FALSE)
            }
            TInt::Sub(a, b) => {
                let (a, b) = (self.int(a, fr), self.int(b, fr));
                self.bv_sub(&a, &b)
            }
            TInt::Card(e) => {
                let m = self.expr(e, fr);
                let mut acc = self.bv_const(0);
                for g in m.entries.values() {
                    let mut one = self.bv_const(0);
                    one[0] = *g;
                    acc = self.bv_add(&acc, &one, Gate::FALSE);
                }
                acc
            }
            TInt::Sum(e) => {
                let m = self.expr(e, fr);
                let mut acc = self.bv_const(0);
                for (t, g) in &m.entries {
                    let Some(v) = self.universe.int_value(t[0]) else {
                        continue;
                    };
                    let term: Vec<Gate> = self.bv_const(v).into_iter().map(|b| self.c.and2(b, *g)).collect();
                    acc = self.bv_add(&acc, &term, Gate::FALSE);
                }
                acc
            }
        }
    }

    /// Encodes a formula over the assertion's parameters at one state.
    pub fn state_formula(&mut self, f: &TFormula, state: usize) -> Gate {
        let names = self.ctx_names(0);
        self.formula(
            f,
            &Frame {
                names: &names,
                pre: state,
                post: None,
            },
        )
    }

    /// Tuples a symbol may hold, for decoding.
    pub fn candidates(&self, sym: usize) -> Vec<Tuple> {
        candidate_tuples(&self.universe, &self.layout.symbols[sym].decl)
    }
}
