//! Explicit-state interpreter for the core program language. It runs
//! programs directly on concrete instances: no circuits, no solver.
//!
//! Semantics it shares with the translator by design: the first state is
//! well formed, a step whose result breaks a multiplicity blocks, loops run
//! at most `unroll` times, and each call site owns its locals, which start
//! with arbitrary values that persist between calls through the same site.

use dynscope_core::lang::typed::{ColTy, Role, TExprKind, TFormula, TProg, TProgKind, TypedModel, VarDecl, VarMult};
use dynscope_core::relational::universe::int_range;
use dynscope_core::relational::{build_universe, Env, Instance, TupleSet, Universe};
use dynscope_core::translate::Bounds;
use std::collections::{BTreeMap, BTreeSet};

pub type State = Instance;

pub struct Oracle<'m> {
    pub model: &'m TypedModel,
    pub u: Universe,
    pub k: usize,
    /// Global symbols: assertion parameters and one copy of each local per call site.
    pub symbols: Vec<VarDecl>,
    assertion: usize,
}

type Frame = Vec<(String, String)>;

impl<'m> Oracle<'m> {
    pub fn new(model: &'m TypedModel, assertion: &str, bounds: &Bounds) -> Self {
        let u = build_universe(&model.sigs, bounds.scope, &bounds.scope_for, bounds.bitwidth);
        let idx = model
            .assertions
            .iter()
            .position(|a| a.name == assertion)
            .expect("assertion exists");
        let a = &model.assertions[idx];
        let mut symbols = a.params.clone();
        collect_locals(model, &a.program, "", &mut symbols);
        Oracle {
            model,
            u,
            k: bounds.unroll,
            symbols,
            assertion: idx,
        }
    }

    fn frame0(&self) -> Frame {
        self.model.assertions[self.assertion]
            .params
            .iter()
            .map(|p| (p.name.clone(), p.name.clone()))
            .collect()
    }

    /// Every value a symbol may hold in a well-formed state.
    pub fn values(&self, d: &VarDecl) -> Vec<TupleSet> {
        let col = |c: &ColTy| -> Vec<u32> {
            let mut v: Vec<u32> = c.0.iter().flat_map(|&s| self.u.sig_atoms(s).iter().copied()).collect();
            v.sort();
            v
        };
        match d.mult {
            VarMult::One => col(&d.cols[0]).into_iter().map(TupleSet::singleton).collect(),
            VarMult::Functional => {
                let mut out = vec![TupleSet::empty(2)];
                let range = col(&d.cols[1]);
                for a in col(&d.cols[0]) {
                    out = out
                        .iter()
                        .flat_map(|t| {
                            range.iter().map(move |&b| {
                                let mut t = t.clone();
                                t.insert(vec![a, b]);
                                t
                            })
                        })
                        .collect();
                }
                out
            }
            VarMult::Set => {
                let mut tuples: Vec<Vec<u32>> = vec![vec![]];
                for c in &d.cols {
                    let atoms = col(c);
                    tuples = tuples
                        .iter()
                        .flat_map(|p| atoms.iter().map(move |&a| [p.clone(), vec![a]].concat()))
                        .collect();
                }
                assert!(
                    tuples.len() <= 16,
                    "set-valued symbol `{}` too large to enumerate",
                    d.name
                );
                (0u32..1 << tuples.len())
                    .map(|bits| {
                        TupleSet::from_tuples(
                            d.arity(),
                            tuples
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| bits >> i & 1 == 1)
                                .map(|(_, t)| t.clone()),
                        )
                    })
                    .collect()
            }
        }
    }

    fn col(&self, c: &ColTy, a: u32) -> bool {
        c.0.iter().any(|&s| self.u.sig_atoms(s).contains(&a))
    }

    fn well_formed(&self, d: &VarDecl, v: &TupleSet) -> bool {
        let typed = v.iter().all(|t| t.iter().zip(&d.cols).all(|(&a, c)| self.col(c, a)));
        typed
            && match d.mult {
                VarMult::Set => true,
                VarMult::One => v.len() == 1,
                VarMult::Functional => {
                    let domain: Vec<u32> = self.u.atoms().filter(|&a| self.col(&d.cols[0], a)).collect();
                    v.len() == domain.len() && domain.iter().all(|&a| v.iter().any(|t| t[0] == a))
                }
            }
    }

    /// Every well-formed state over all global symbols.
    pub fn all_states(&self) -> Vec<State> {
        let mut out = vec![State::new()];
        for d in &self.symbols {
            let vals = self.values(d);
            out = out
                .iter()
                .flat_map(|s| {
                    vals.iter().map(move |v| {
                        let mut s = s.clone();
                        s.insert(d.name.clone(), v.clone());
                        s
                    })
                })
                .collect();
        }
        out
    }

    pub fn pre_holds(&self, s: &State) -> bool {
        let a = &self.model.assertions[self.assertion];
        Env::new(&self.u, s)
            .with_bindings(self.frame0())
            .eval_formula(&a.pre)
            .expect("pre evaluates")
    }

    pub fn post_holds(&self, s: &State) -> bool {
        let a = &self.model.assertions[self.assertion];
        Env::new(&self.u, s)
            .with_bindings(self.frame0())
            .eval_formula(&a.post)
            .expect("post evaluates")
    }

    /// Final states of the assertion's program from `s`.
    pub fn run(&self, s: &State) -> BTreeSet<State> {
        let a = &self.model.assertions[self.assertion];
        self.exec(&a.program, &self.frame0(), "", s)
    }

    /// A (first, last) pair violating the assertion among `initial`, if any.
    pub fn counterexample(&self, initial: impl IntoIterator<Item = State>) -> Option<(State, State)> {
        for s in initial {
            if !self.pre_holds(&s) {
                continue;
            }
            if let Some(f) = self.run(&s).into_iter().find(|f| !self.post_holds(f)) {
                return Some((s, f));
            }
        }
        None
    }

    /// Whether the assertion holds over every well-formed initial state.
    pub fn valid(&self) -> bool {
        self.counterexample(self.all_states()).is_none()
    }

    fn exec(&self, p: &TProg, frame: &Frame, site: &str, s: &State) -> BTreeSet<State> {
        match &p.kind {
            TProgKind::Test(f) => {
                let ok = Env::new(&self.u, s)
                    .with_bindings(frame.clone())
                    .eval_formula(f)
                    .expect("test evaluates");
                if ok {
                    BTreeSet::from([s.clone()])
                } else {
                    BTreeSet::new()
                }
            }
            TProgKind::Atomic(at) => {
                let bindings: Frame = if at.renaming.is_empty() {
                    frame.clone()
                } else {
                    at.renaming
                        .iter()
                        .map(|(param, arg)| (param.clone(), lookup(frame, arg)))
                        .collect()
                };
                let env = Env::new(&self.u, s).with_bindings(bindings.clone());
                if !env.clone().eval_formula(&at.pre).expect("pre evaluates") {
                    return BTreeSet::new();
                }
                let modified: Vec<String> = at.modifies.iter().map(|m| lookup(frame, m)).collect();
                let decls: Vec<&VarDecl> = modified
                    .iter()
                    .map(|m| self.symbols.iter().find(|d| &d.name == m).expect("modified symbol"))
                    .collect();
                if p.role == Role::Assign {
                    if let TFormula::Eq(lhs, rhs) = &at.post {
                        assert!(matches!(lhs.kind, TExprKind::Var { primed: true, .. }));
                        let v = env.clone().eval_expr(rhs).expect("rhs evaluates");
                        if !self.well_formed(decls[0], &v) {
                            return BTreeSet::new();
                        }
                        let mut t = s.clone();
                        t.insert(modified[0].clone(), v);
                        return BTreeSet::from([t]);
                    }
                }
                let mut out = BTreeSet::new();
                let mut cands = vec![s.clone()];
                for d in &decls {
                    let vals = self.values(d);
                    cands = cands
                        .iter()
                        .flat_map(|c| {
                            vals.iter().map(move |v| {
                                let mut c = c.clone();
                                c.insert(d.name.clone(), v.clone());
                                c
                            })
                        })
                        .collect();
                }
                for t in cands {
                    let ok = Env::new(&self.u, s)
                        .with_post(&t)
                        .with_bindings(bindings.clone())
                        .eval_formula(&at.post);
                    if ok.expect("post evaluates") {
                        out.insert(t);
                    }
                }
                out
            }
            TProgKind::Seq(a, b) => self
                .exec(a, frame, site, s)
                .iter()
                .flat_map(|m| self.exec(b, frame, site, m))
                .collect(),
            TProgKind::Choice(a, b) => {
                let mut out = self.exec(a, frame, site, s);
                out.extend(self.exec(b, frame, site, s));
                out
            }
            TProgKind::Star(body) => {
                let mut out = BTreeSet::from([s.clone()]);
                let mut frontier = out.clone();
                for _ in 0..self.k {
                    frontier = frontier.iter().flat_map(|m| self.exec(body, frame, site, m)).collect();
                    out.extend(frontier.iter().cloned());
                }
                out
            }
            TProgKind::Invoke { program, args } => {
                let callee = &self.model.programs[*program];
                let site = format!("{site}/{}", p.id.0);
                let mut inner: Frame = callee
                    .params
                    .iter()
                    .zip(args)
                    .map(|(param, arg)| (param.name.clone(), lookup(frame, arg)))
                    .collect();
                for l in &callee.locals {
                    inner.push((l.name.clone(), local_key(&site, &l.name)));
                }
                self.exec(&callee.body, &inner, &site, s)
            }
        }
    }
}

fn lookup(frame: &Frame, name: &str) -> String {
    frame
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, g)| g.clone())
        .unwrap_or_else(|| panic!("`{name}` not in frame"))
}

pub fn local_key(site: &str, name: &str) -> String {
    format!("{name}@{site}")
}

fn collect_locals(model: &TypedModel, p: &TProg, site: &str, out: &mut Vec<VarDecl>) {
    match &p.kind {
        TProgKind::Seq(a, b) | TProgKind::Choice(a, b) => {
            collect_locals(model, a, site, out);
            collect_locals(model, b, site, out);
        }
        TProgKind::Star(b) => collect_locals(model, b, site, out),
        TProgKind::Invoke { program, .. } => {
            let callee = &model.programs[*program];
            let site = format!("{site}/{}", p.id.0);
            for l in &callee.locals {
                out.push(VarDecl {
                    name: local_key(&site, &l.name),
                    ..l.clone()
                });
            }
            collect_locals(model, &callee.body, &site, out);
        }
        _ => {}
    }
}

/// Initial heaps for the list models: every choice of `thiz`, `header`,
/// `next`, and the size of `thiz`; other sizes are 0 and locals fixed,
/// since the program never reads either before writing it.
pub fn list_heaps(o: &Oracle<'_>) -> Vec<State> {
    let d = |n: &str| {
        o.symbols
            .iter()
            .find(|d| d.name == n)
            .unwrap_or_else(|| panic!("no symbol {n}"))
            .clone()
    };
    let zero = o.u.int_atom(0);
    let lists = o.u.sig_atoms(o.model.sig_id("List").unwrap()).to_vec();
    let mut base = State::new();
    for l in o.symbols.iter().filter(|d| d.name.contains('@')) {
        base.insert(l.name.clone(), o.values(l)[0].clone());
    }
    let mut out = Vec::new();
    let (int_lo, int_hi) = int_range(o.u.bitwidth());
    for thiz in o.values(&d("thiz")) {
        let t = thiz.iter().next().unwrap()[0];
        for header in o.values(&d("header")) {
            for next in o.values(&d("next")) {
                for n in int_lo..=int_hi {
                    let rows = lists
                        .iter()
                        .map(|&l| vec![l, if l == t { o.u.int_atom(n) } else { zero }]);
                    let mut s = base.clone();
                    s.insert("thiz".into(), thiz.clone());
                    s.insert("header".into(), header.clone());
                    s.insert("next".into(), next.clone());
                    s.insert("size".into(), TupleSet::from_tuples(2, rows));
                    out.push(s);
                }
            }
        }
    }
    out
}

pub fn by_name(s: &State) -> BTreeMap<&str, &TupleSet> {
    s.iter().map(|(k, v)| (k.as_str(), v)).collect()
}
