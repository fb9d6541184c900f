//! Conflict-driven clause learning.
//!
//! Two watched literals per clause, first-UIP learning with local
//! minimisation, VSIDS branching (ties broken by lowest variable index),
//! phase saving, and restarts on the Luby sequence. No randomness: the same
//! clause list always yields the same model.

use super::cnf::Cnf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        let v = l.unsigned_abs() - 1;
        Lit(2 * v + (l < 0) as u32)
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn neg(self) -> bool {
        self.0 & 1 == 1
    }
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// Value of every variable, indexed by variable - 1.
    Sat(Vec<bool>),
    Unsat,
    /// Stopped by the interrupt flag before reaching a verdict.
    Interrupted,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnts: u64,
}

/// Max-heap of variables by activity; equal activities pop the lower index.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![None; n],
        }
    }

    fn better(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::better(v, self.heap[p], act) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = Some(i);
            i = p;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(self.heap[r], self.heap[l], act) {
                r
            } else {
                l
            };
            if !Self::better(self.heap[c], v, act) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = Some(i);
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

pub struct Solver {
    n: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    phase: Vec<bool>,
    order: VarHeap,
    seen: Vec<bool>,
    unsat: bool,
    pub stats: Stats,
    interrupt: Option<Arc<AtomicBool>>,
}

/// The `i`-th element (0-based) of the Luby sequence 1,1,2,1,1,2,4,...
pub fn luby(mut i: u64) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

impl Solver {
    pub fn new(cnf: &Cnf) -> Self {
        let n = cnf.num_vars as usize;
        let mut s = Solver {
            n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assign: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            phase: vec![false; n],
            order: VarHeap::new(n),
            seen: vec![false; n],
            unsat: false,
            stats: Stats::default(),
            interrupt: None,
        };
        for v in 0..n {
            s.order.insert(v, &s.activity);
        }
        for c in &cnf.clauses {
            s.add_clause(c);
        }
        s
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.assign[l.var()];
        if l.neg() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn add_clause(&mut self, dimacs: &[i32]) {
        if self.unsat {
            return;
        }
        let mut lits: Vec<Lit> = dimacs.iter().map(|&l| Lit::from_dimacs(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return; // tautology
        }
        lits.retain(|&l| self.value(l) != FALSE);
        if lits.iter().any(|&l| self.value(l) == TRUE) {
            return;
        }
        match lits.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(lits[0], None);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                self.attach(lits);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>) -> usize {
        let i = self.clauses.len();
        self.watches[lits[0].not().idx()].push(i);
        self.watches[lits[1].not().idx()].push(i);
        self.clauses.push(lits);
        i
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.assign[v] = if l.neg() { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            // clauses watching `p` false-side: watches are indexed by the literal that became true
            let false_lit = p.not();
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let c = &mut self.clauses[ci];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.value_in(first) == TRUE {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[ci].len() {
                    let l = self.clauses[ci][k];
                    if self.value(l) != FALSE {
                        self.clauses[ci].swap(1, k);
                        self.watches[l.not().idx()].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.value(first) == FALSE {
                    conflict = Some(ci);
                    break;
                }
                self.enqueue(first, Some(ci));
                i += 1;
            }
            let mut rest = std::mem::take(&mut self.watches[p.idx()]);
            ws.append(&mut rest);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn value_in(&self, l: Lit) -> i8 {
        self.value(l)
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v, &self.activity);
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the level to backjump to.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0;
        let mut idx = self.trail.len();
        let mut p: Option<Lit> = None;
        loop {
            let start = if p.is_some() { 1 } else { 0 };
            let clause = self.clauses[confl].clone();
            for &q in &clause[start..] {
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var()] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = lit.not();
                break;
            }
            confl = self.reason[lit.var()].expect("implied literal has a reason");
        }
        // Local minimisation: drop literals implied by others in the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, l)| {
                i == 0
                    || match self.reason[l.var()] {
                        None => true,
                        Some(r) => self.clauses[r][1..]
                            .iter()
                            .any(|q| !self.seen[q.var()] && self.level[q.var()] > 0),
                    }
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut learnt: Vec<Lit> = learnt
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(l, _)| l)
            .collect();
        let back = if learnt.len() == 1 {
            0
        } else {
            let (mut best, mut lvl) = (1, self.level[learnt[1].var()]);
            for (i, l) in learnt.iter().enumerate().skip(2) {
                if self.level[l.var()] > lvl {
                    best = i;
                    lvl = self.level[l.var()];
                }
            }
            learnt.swap(1, best);
            lvl
        };
        self.var_inc /= 0.95;
        (learnt, back)
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let v = self.trail[i].var();
            self.phase[v] = self.assign[v] == TRUE;
            self.assign[v] = UNDEF;
            self.reason[v] = None;
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assign[v] == UNDEF {
                return Some(Lit(2 * v as u32 + (!self.phase[v]) as u32));
            }
        }
        None
    }

    pub fn solve(&mut self) -> SolveResult {
        if self.unsat {
            return SolveResult::Unsat;
        }
        if self.propagate().is_some() {
            return SolveResult::Unsat;
        }
        let mut restart = 0u64;
        loop {
            let budget = 100 * luby(restart);
            let mut conflicts = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts += 1;
                    if self.decision_level() == 0 {
                        return SolveResult::Unsat;
                    }
                    let (learnt, back) = self.analyze(confl);
                    self.backtrack(back);
                    self.stats.learnts += 1;
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], None);
                    } else {
                        let first = learnt[0];
                        let ci = self.attach(learnt);
                        self.enqueue(first, Some(ci));
                    }
                    continue;
                }
                if conflicts >= budget {
                    break;
                }
                if self.interrupt.as_ref().is_some_and(|f| f.load(Ordering::Relaxed)) {
                    return SolveResult::Interrupted;
                }
                match self.pick() {
                    None => {
                        let model: Vec<bool> = self.assign.iter().map(|&a| a == TRUE).collect();
                        return SolveResult::Sat(model);
                    }
                    Some(l) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, None);
                    }
                }
            }
            self.stats.restarts += 1;
            restart += 1;
            self.backtrack(0);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Makes `solve` give up with [`SolveResult::Interrupted`] once `flag` is set.
    pub fn set_interrupt(&mut self, flag: Arc<AtomicBool>) {
        self.interrupt = Some(flag);
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }
}

/// Solves `cnf` and checks any model against every clause before returning it.
pub fn solve(cnf: &Cnf) -> SolveResult {
    let result = Solver::new(cnf).solve();
    if let SolveResult::Sat(m) = &result {
        assert!(cnf.satisfied_by(m), "solver produced a model that violates its clauses");
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: u32, clauses: &[&[i32]]) -> Cnf {
        let mut c = Cnf::new(n);
        for cl in clauses {
            c.add(cl.to_vec());
        }
        c
    }

    #[test]
    fn unit_contradiction() {
        assert_eq!(solve(&cnf(1, &[&[1], &[-1]])), SolveResult::Unsat);
    }

    #[test]
    fn single_binary_clause() {
        let SolveResult::Sat(m) = solve(&cnf(2, &[&[1, 2]])) else {
            panic!()
        };
        assert!(m[0] || m[1]);
    }

    #[test]
    fn pigeonhole_three_into_two() {
        // p_{i,j}: pigeon i in hole j, var = 2*i + j + 1
        let v = |i: i32, j: i32| 2 * i + j + 1;
        let mut c = Cnf::new(6);
        for i in 0..3 {
            c.add(vec![v(i, 0), v(i, 1)]);
        }
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    c.add(vec![-v(a, j), -v(b, j)]);
                }
            }
        }
        assert_eq!(solve(&c), SolveResult::Unsat);
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn empty_formula_is_sat() {
        assert!(matches!(solve(&Cnf::new(3)), SolveResult::Sat(_)));
    }
}
