//! Propositional consistency, entailment, and (var-)equivalence.
//!
//! Every query is answered by a complete DPLL search: unit propagation over
//! two watched literals, chronological backtracking, and branching on the
//! lowest-numbered free variable. Variables are numbered in lexicographic
//! atom order, so the search is deterministic.

use std::cell::Cell;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::logic::clauses::{Cnf, Lit};
use crate::logic::{Atom, Formula};

/// Work counters for one oracle session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub calls: u64,
    pub decisions: u64,
}

/// A consistency-test session. Counters accumulate over its lifetime.
#[derive(Debug, Default)]
pub struct Oracle {
    calls: Cell<u64>,
    decisions: Cell<u64>,
}

impl Oracle {
    pub fn new() -> Oracle {
        Oracle::default()
    }

    pub fn stats(&self) -> OracleStats {
        OracleStats { calls: self.calls.get(), decisions: self.decisions.get() }
    }

    /// Is the conjunction of `fs` satisfiable?
    pub fn is_consistent<'a, I>(&self, fs: I) -> bool
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        self.calls.set(self.calls.get() + 1);
        let cnf = Cnf::encode(fs);
        let mut solver = Dpll::new(&cnf);
        let sat = solver.solve();
        self.decisions.set(self.decisions.get() + solver.decisions);
        sat
    }

    pub fn entails<'a, I>(&self, fs: I, g: &Formula) -> bool
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let negated = g.clone().negate();
        let mut all: Vec<&Formula> = fs.into_iter().collect();
        all.push(&negated);
        !self.is_consistent(all)
    }

    pub fn equivalent(&self, f: &Formula, g: &Formula) -> bool {
        self.entails([f], g) && self.entails([g], f)
    }

    /// Do `f` and `g` have the same consequences over `keep`?
    pub fn var_equivalent(&self, f: &Formula, g: &Formula, keep: &BTreeSet<Atom>) -> bool {
        let fa: BTreeSet<Atom> = f.atoms().difference(keep).cloned().collect();
        let ga: BTreeSet<Atom> = g.atoms().difference(keep).cloned().collect();
        self.equivalent(&f.forget(&fa), &g.forget(&ga))
    }
}

pub fn is_consistent<'a, I: IntoIterator<Item = &'a Formula>>(fs: I) -> bool {
    Oracle::new().is_consistent(fs)
}

pub fn entails<'a, I: IntoIterator<Item = &'a Formula>>(fs: I, g: &Formula) -> bool {
    Oracle::new().entails(fs, g)
}

pub fn equivalent(f: &Formula, g: &Formula) -> bool {
    Oracle::new().equivalent(f, g)
}

pub fn var_equivalent(f: &Formula, g: &Formula, keep: &BTreeSet<Atom>) -> bool {
    Oracle::new().var_equivalent(f, g, keep)
}

const UNASSIGNED: i8 = 0;

struct Level {
    trail_start: usize,
    decision: Lit,
    flipped: bool,
}

struct Dpll {
    clauses: Vec<Vec<Lit>>,
    // watches[lit.code()] lists clauses watching `lit`; a clause watches its
    // first two literals.
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    qhead: usize,
    levels: Vec<Level>,
    units: Vec<Lit>,
    trivially_unsat: bool,
    decisions: u64,
}

impl Dpll {
    fn new(cnf: &Cnf) -> Dpll {
        let n = cnf.num_vars;
        let mut s = Dpll {
            clauses: Vec::with_capacity(cnf.clauses.len()),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNASSIGNED; n],
            trail: Vec::new(),
            qhead: 0,
            levels: Vec::new(),
            units: Vec::new(),
            trivially_unsat: false,
            decisions: 0,
        };
        for c in &cnf.clauses {
            let mut c = c.clone();
            c.sort();
            c.dedup();
            if c.windows(2).any(|w| w[0] == !w[1]) {
                continue;
            }
            match c.len() {
                0 => s.trivially_unsat = true,
                1 => s.units.push(c[0]),
                _ => {
                    let id = s.clauses.len();
                    s.watches[c[0].code()].push(id);
                    s.watches[c[1].code()].push(id);
                    s.clauses.push(c);
                }
            }
        }
        s
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var()];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    // Returns false on an immediate conflict.
    fn enqueue(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => true,
            -1 => false,
            _ => {
                self.value[l.var()] = if l.is_positive() { 1 } else { -1 };
                self.trail.push(l);
                true
            }
        }
    }

    // Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = !self.trail[self.qhead];
            self.qhead += 1;
            let mut watchers = std::mem::take(&mut self.watches[falsified.code()]);
            let mut i = 0;
            let mut ok = true;
            while i < watchers.len() {
                let cid = watchers[i];
                let clause = &mut self.clauses[cid];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_val = {
                    let v = self.value[other.var()];
                    if other.is_positive() { v } else { -v }
                };
                if other_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let cand = clause[k];
                    let v = self.value[cand.var()];
                    let cv = if cand.is_positive() { v } else { -v };
                    if cv != -1 {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[new_watch.code()].push(cid);
                        watchers.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                if !self.enqueue(other) {
                    ok = false;
                    break;
                }
            }
            let displaced = std::mem::replace(&mut self.watches[falsified.code()], watchers);
            self.watches[falsified.code()].extend(displaced);
            if !ok {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, trail_len: usize) {
        for l in self.trail.drain(trail_len..) {
            self.value[l.var()] = UNASSIGNED;
        }
        self.qhead = trail_len;
    }

    fn solve(&mut self) -> bool {
        if self.trivially_unsat {
            return false;
        }
        for l in std::mem::take(&mut self.units) {
            if !self.enqueue(l) {
                return false;
            }
        }
        let mut next_free = 0;
        loop {
            if !self.propagate() {
                // backtrack to the latest decision whose other branch is open
                loop {
                    let Some(mut level) = self.levels.pop() else {
                        return false;
                    };
                    if level.flipped {
                        continue;
                    }
                    self.undo_to(level.trail_start);
                    level.decision = !level.decision;
                    level.flipped = true;
                    let l = level.decision;
                    self.levels.push(level);
                    self.enqueue(l);
                    next_free = 0;
                    break;
                }
                continue;
            }
            while next_free < self.value.len() && self.value[next_free] != UNASSIGNED {
                next_free += 1;
            }
            if next_free == self.value.len() {
                return true;
            }
            self.decisions += 1;
            let l = Lit::new(next_free, false);
            self.levels.push(Level { trail_start: self.trail.len(), decision: l, flipped: false });
            self.enqueue(l);
        }
    }
}
