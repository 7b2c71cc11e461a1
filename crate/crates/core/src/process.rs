//! Processes and regular semantics.
//!
//! A process is a duplicate-free sequence of defaults, each of whose
//! preconditions follows from the background plus the consequences applied
//! before it, with jointly consistent consequences. A semantics picks the
//! processes that are *successful* (applied justifications not
//! contradicted) and *closed* (nothing left to apply); each such process
//! generates an extension, the deductive closure of `W ∧ cons(Π)`.
//!
//! Successfulness and closure depend only on the set of applied defaults,
//! never on their order, so the [`Engine`] memoizes every consistency test
//! on the step set.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::EngineError;
use crate::logic::Formula;
use crate::sat::{Oracle, OracleStats};
use crate::theory::DefaultTheory;

/// Default cap on explored prefixes per search.
pub const DEFAULT_MAX_PREFIXES: usize = 1_000_000;

/// Sequence of default indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Process(Vec<usize>);

impl Process {
    pub fn new(steps: Vec<usize>) -> Process {
        Process(steps)
    }

    pub fn empty() -> Process {
        Process(Vec::new())
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    /// `self · [index]`
    pub fn then(&self, index: usize) -> Process {
        let mut steps = self.0.clone();
        steps.push(index);
        Process(steps)
    }

    pub fn prefix(&self, len: usize) -> Process {
        Process(self.0[..len].to_vec())
    }

    pub fn names(&self, t: &DefaultTheory) -> Vec<String> {
        self.0.iter().map(|&i| t.defaults()[i].name.clone()).collect()
    }

    /// Resolves default names; `None` names the first unknown one.
    pub fn from_names<S: AsRef<str>>(t: &DefaultTheory, names: &[S]) -> Result<Process, String> {
        names
            .iter()
            .map(|n| t.index_of(n.as_ref()).ok_or_else(|| n.as_ref().to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Process)
    }
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<usize>> for Process {
    fn from(v: Vec<usize>) -> Self {
        Process(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Successfulness {
    /// Each applied justification is separately consistent with `W ∧ cons(Π)`.
    Local,
    /// All applied justifications are jointly consistent with `W ∧ cons(Π)`.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Closure {
    /// No default outside the process is applicable: precondition entailed
    /// and justification consistent.
    Inapplicability,
    /// No default outside the process extends it to a globally successful
    /// process.
    Maximality,
    /// No default outside the process extends it to a locally successful
    /// process.
    LocalMaximality,
}

/// A regular semantics: a successfulness test paired with a closure test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Semantics {
    pub successfulness: Successfulness,
    pub closure: Closure,
    normal_only: bool,
    name: &'static str,
}

impl Semantics {
    pub const REITER: Semantics = Semantics {
        successfulness: Successfulness::Local,
        closure: Closure::Inapplicability,
        normal_only: false,
        name: "reiter",
    };
    pub const CONSTRAINED: Semantics = Semantics {
        successfulness: Successfulness::Global,
        closure: Closure::Maximality,
        normal_only: false,
        name: "constrained",
    };
    pub const JUSTIFIED: Semantics = Semantics {
        successfulness: Successfulness::Local,
        closure: Closure::LocalMaximality,
        normal_only: false,
        name: "justified",
    };
    /// Reiter's semantics, defined only on normal theories.
    pub const NORMAL: Semantics = Semantics { normal_only: true, name: "normal", ..Semantics::REITER };

    pub const PRESETS: [Semantics; 4] =
        [Semantics::REITER, Semantics::CONSTRAINED, Semantics::JUSTIFIED, Semantics::NORMAL];

    pub fn custom(successfulness: Successfulness, closure: Closure) -> Semantics {
        Semantics { successfulness, closure, normal_only: false, name: "custom" }
    }

    pub fn by_name(name: &str) -> Option<Semantics> {
        Semantics::PRESETS.into_iter().find(|s| s.name == name)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn requires_normal(&self) -> bool {
        self.normal_only
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

/// An extension: the closure of `axiom`, generated by every witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub axiom: Formula,
    pub witnesses: Vec<Process>,
}

impl Extension {
    pub fn to_json(&self, t: &DefaultTheory) -> serde_json::Value {
        serde_json::json!({
            "axiom": self.axiom.to_string(),
            "witnesses": self.witnesses.iter().map(|p| p.names(t)).collect::<Vec<_>>(),
        })
    }
}

/// Outcome of a fail-safety check. `witness` is the lexicographically first
/// successful process that no successful and closed process extends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailSafety {
    pub fail_safe: bool,
    pub witness: Option<Process>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct StepSet(Vec<u64>);

impl StepSet {
    fn new(m: usize) -> StepSet {
        StepSet(vec![0; m.div_ceil(64).max(1)])
    }

    fn of(m: usize, steps: &[usize]) -> StepSet {
        let mut s = StepSet::new(m);
        for &i in steps {
            s.0[i / 64] |= 1 << (i % 64);
        }
        s
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn with(&self, i: usize) -> StepSet {
        let mut s = self.clone();
        s.0[i / 64] |= 1 << (i % 64);
        s
    }

    fn members(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        (0..m).filter(move |&i| self.contains(i))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Probe {
    /// `W ∧ cons(S)`
    Base,
    /// `W ∧ cons(S) ∧ ¬prec(i)`
    NotPrec(usize),
    /// `W ∧ cons(S) ∧ just(i)`
    Just(usize),
    /// `W ∧ cons(S) ∧ just(S)`
    AllJust,
}

/// Query engine for one theory under one semantics.
pub struct Engine<'t> {
    theory: &'t DefaultTheory,
    semantics: Semantics,
    oracle: Oracle,
    max_prefixes: usize,
    explored: Cell<usize>,
    cache: RefCell<HashMap<(StepSet, Probe), bool>>,
}

impl<'t> Engine<'t> {
    pub fn new(theory: &'t DefaultTheory, semantics: Semantics) -> Result<Engine<'t>, EngineError> {
        if semantics.requires_normal() && !theory.is_normal() {
            return Err(EngineError::RequiresNormal { semantics: semantics.name().to_string() });
        }
        Ok(Engine {
            theory,
            semantics,
            oracle: Oracle::new(),
            max_prefixes: DEFAULT_MAX_PREFIXES,
            explored: Cell::new(0),
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn with_max_prefixes(mut self, cap: usize) -> Self {
        self.max_prefixes = cap;
        self
    }

    pub fn theory(&self) -> &'t DefaultTheory {
        self.theory
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn oracle_stats(&self) -> OracleStats {
        self.oracle.stats()
    }

    fn m(&self) -> usize {
        self.theory.len()
    }

    fn reset_budget(&self) {
        self.explored.set(0);
    }

    fn tick(&self) -> Result<(), EngineError> {
        let n = self.explored.get() + 1;
        self.explored.set(n);
        if n > self.max_prefixes {
            return Err(EngineError::ResourceLimit(self.max_prefixes));
        }
        Ok(())
    }

    fn probe(&self, set: &StepSet, probe: Probe) -> bool {
        let key = (set.clone(), probe);
        if let Some(&v) = self.cache.borrow().get(&key) {
            return v;
        }
        let ds = self.theory.defaults();
        let negated;
        let mut fs: Vec<&Formula> = vec![self.theory.background()];
        fs.extend(set.members(self.m()).map(|i| &ds[i].cons));
        match probe {
            Probe::Base => {}
            Probe::NotPrec(i) => {
                negated = ds[i].prec.clone().negate();
                fs.push(&negated);
            }
            Probe::Just(i) => fs.push(&ds[i].just),
            Probe::AllJust => fs.extend(set.members(self.m()).map(|i| &ds[i].just)),
        }
        let v = self.oracle.is_consistent(fs);
        self.cache.borrow_mut().insert(key, v);
        v
    }

    fn entails_prec(&self, set: &StepSet, i: usize) -> bool {
        !self.probe(set, Probe::NotPrec(i))
    }

    // S ∪ {d} is a process whenever S is one and `d` may be appended.
    fn can_append(&self, set: &StepSet, d: usize) -> bool {
        !set.contains(d) && self.entails_prec(set, d) && self.probe(&set.with(d), Probe::Base)
    }

    fn locally_successful(&self, set: &StepSet) -> bool {
        set.members(self.m()).all(|i| self.probe(set, Probe::Just(i)))
    }

    fn successful_set(&self, set: &StepSet) -> bool {
        match self.semantics.successfulness {
            Successfulness::Local => self.locally_successful(set),
            Successfulness::Global => self.probe(set, Probe::AllJust),
        }
    }

    fn closed_set(&self, set: &StepSet) -> bool {
        let outside = (0..self.m()).filter(|&d| !set.contains(d));
        match self.semantics.closure {
            Closure::Inapplicability => outside
                .into_iter()
                .all(|d| !(self.entails_prec(set, d) && self.probe(set, Probe::Just(d)))),
            Closure::Maximality => outside
                .into_iter()
                .all(|d| !(self.entails_prec(set, d) && self.probe(&set.with(d), Probe::AllJust))),
            Closure::LocalMaximality => outside
                .into_iter()
                .all(|d| !(self.can_append(set, d) && self.locally_successful(&set.with(d)))),
        }
    }

    // Π·[d] is a successful process, given that Π is one.
    fn successor(&self, set: &StepSet, d: usize) -> Option<StepSet> {
        if !self.can_append(set, d) {
            return None;
        }
        let next = set.with(d);
        self.successful_set(&next).then_some(next)
    }

    fn validate(&self, p: &Process) -> Result<StepSet, EngineError> {
        let m = self.m();
        let mut seen = StepSet::new(m);
        for &i in p.steps() {
            if i >= m {
                return Err(EngineError::IndexOutOfRange { index: i, len: m });
            }
            if seen.contains(i) {
                return Err(EngineError::DuplicateStep(i));
            }
            seen = seen.with(i);
        }
        Ok(seen)
    }

    fn process_set(&self, p: &Process) -> Result<Option<StepSet>, EngineError> {
        let full = self.validate(p)?;
        let mut set = StepSet::new(self.m());
        for &d in p.steps() {
            if !self.entails_prec(&set, d) {
                return Ok(None);
            }
            set = set.with(d);
        }
        Ok(self.probe(&full, Probe::Base).then_some(full))
    }

    /// Every step's precondition follows from `W` and the earlier
    /// consequences, and `W ∧ cons(Π)` is consistent.
    pub fn is_process(&self, p: &Process) -> Result<bool, EngineError> {
        Ok(self.process_set(p)?.is_some())
    }

    pub fn is_successful(&self, p: &Process) -> Result<bool, EngineError> {
        let set = self.process_set(p)?.ok_or(EngineError::NotAProcess)?;
        Ok(self.successful_set(&set))
    }

    pub fn is_closed(&self, p: &Process) -> Result<bool, EngineError> {
        let set = self.process_set(p)?.ok_or(EngineError::NotAProcess)?;
        if !self.successful_set(&set) {
            return Err(EngineError::NotSuccessful);
        }
        Ok(self.closed_set(&set))
    }

    /// Successful and closed, for any process; false for non-processes.
    pub fn is_successful_and_closed(&self, p: &Process) -> Result<bool, EngineError> {
        Ok(match self.process_set(p)? {
            Some(set) => self.successful_set(&set) && self.closed_set(&set),
            None => false,
        })
    }

    /// All successful and closed processes, in lexicographic order.
    pub fn enumerate_processes(&self) -> Result<Vec<Process>, EngineError> {
        self.reset_budget();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.enumerate_from(&mut prefix, StepSet::new(self.m()), &mut out, false)?;
        Ok(out)
    }

    /// The lexicographically first successful and closed process.
    pub fn first_process(&self) -> Result<Option<Process>, EngineError> {
        self.reset_budget();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.enumerate_from(&mut prefix, StepSet::new(self.m()), &mut out, true)?;
        Ok(out.pop())
    }

    fn enumerate_from(
        &self,
        prefix: &mut Vec<usize>,
        set: StepSet,
        out: &mut Vec<Process>,
        stop_at_first: bool,
    ) -> Result<(), EngineError> {
        self.tick()?;
        if self.closed_set(&set) {
            out.push(Process(prefix.clone()));
            if stop_at_first {
                return Ok(());
            }
        }
        for d in 0..self.m() {
            if let Some(next) = self.successor(&set, d) {
                prefix.push(d);
                self.enumerate_from(prefix, next, out, stop_at_first)?;
                prefix.pop();
                if stop_at_first && !out.is_empty() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Every successful process, in lexicographic order.
    pub fn successful_processes(&self) -> Result<Vec<Process>, EngineError> {
        self.reset_budget();
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), StepSet::new(self.m()), true, &mut out)?;
        Ok(out)
    }

    /// Every process (successful or not), in lexicographic order.
    pub fn all_processes(&self) -> Result<Vec<Process>, EngineError> {
        self.reset_budget();
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), StepSet::new(self.m()), false, &mut out)?;
        Ok(out)
    }

    fn walk(
        &self,
        prefix: &mut Vec<usize>,
        set: StepSet,
        successful_only: bool,
        out: &mut Vec<Process>,
    ) -> Result<(), EngineError> {
        self.tick()?;
        out.push(Process(prefix.clone()));
        for d in 0..self.m() {
            let next = if successful_only {
                self.successor(&set, d)
            } else {
                self.can_append(&set, d).then(|| set.with(d))
            };
            if let Some(next) = next {
                prefix.push(d);
                self.walk(prefix, next, successful_only, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }

    /// `W ∧ cons(Π)`, consequences in step order.
    pub fn axiom(&self, p: &Process) -> Formula {
        let ds = self.theory.defaults();
        Formula::and(
            std::iter::once(self.theory.background().clone())
                .chain(p.steps().iter().map(|&i| ds[i].cons.clone())),
        )
    }

    /// Extensions, merged by logical equivalence, each with the processes
    /// that generate it.
    pub fn extensions(&self) -> Result<Vec<Extension>, EngineError> {
        let processes = self.enumerate_processes()?;
        let mut by_set: Vec<(StepSet, usize)> = Vec::new();
        let mut out: Vec<Extension> = Vec::new();
        for p in processes {
            let set = StepSet::of(self.m(), p.steps());
            if let Some(&(_, k)) = by_set.iter().find(|(s, _)| *s == set) {
                out[k].witnesses.push(p);
                continue;
            }
            let axiom = self.axiom(&p);
            let k = match out.iter().position(|e| self.oracle.equivalent(&e.axiom, &axiom)) {
                Some(k) => {
                    out[k].witnesses.push(p);
                    k
                }
                None => {
                    out.push(Extension { axiom, witnesses: vec![p] });
                    out.len() - 1
                }
            };
            by_set.push((set, k));
        }
        Ok(out)
    }

    /// Entailed by every extension; vacuously true without extensions.
    pub fn skeptical_entails(&self, q: &Formula) -> Result<bool, EngineError> {
        Ok(self.extensions()?.iter().all(|e| self.oracle.entails([&e.axiom], q)))
    }

    /// Entailed by some extension.
    pub fn credulous_entails(&self, q: &Formula) -> Result<bool, EngineError> {
        Ok(self.extensions()?.iter().any(|e| self.oracle.entails([&e.axiom], q)))
    }

    /// Some successful and closed process starts with `prefix`.
    pub fn completable(&self, prefix: &Process) -> Result<bool, EngineError> {
        let Some(set) = self.process_set(prefix)? else {
            return Ok(false);
        };
        if !self.successful_set(&set) {
            return Ok(false);
        }
        self.reset_budget();
        self.completable_set(&set, &mut HashMap::new())
    }

    fn completable_set(
        &self,
        set: &StepSet,
        memo: &mut HashMap<StepSet, bool>,
    ) -> Result<bool, EngineError> {
        if let Some(&v) = memo.get(set) {
            return Ok(v);
        }
        self.tick()?;
        let mut v = self.closed_set(set);
        if !v {
            for d in 0..self.m() {
                if let Some(next) = self.successor(set, d) {
                    if self.completable_set(&next, memo)? {
                        v = true;
                        break;
                    }
                }
            }
        }
        memo.insert(set.clone(), v);
        Ok(v)
    }

    /// Is every successful process a prefix of a successful and closed one?
    pub fn fail_safety(&self) -> Result<FailSafety, EngineError> {
        self.reset_budget();
        let mut memo = HashMap::new();
        let mut seen = HashMap::new();
        let witness =
            self.find_dead_end(&mut Vec::new(), StepSet::new(self.m()), &mut memo, &mut seen)?;
        Ok(FailSafety { fail_safe: witness.is_none(), witness })
    }

    pub fn is_fail_safe_on(&self) -> Result<bool, EngineError> {
        Ok(self.fail_safety()?.fail_safe)
    }

    fn find_dead_end(
        &self,
        prefix: &mut Vec<usize>,
        set: StepSet,
        memo: &mut HashMap<StepSet, bool>,
        seen: &mut HashMap<StepSet, ()>,
    ) -> Result<Option<Process>, EngineError> {
        if seen.insert(set.clone(), ()).is_some() {
            return Ok(None);
        }
        if !self.completable_set(&set, memo)? {
            return Ok(Some(Process(prefix.clone())));
        }
        for d in 0..self.m() {
            if let Some(next) = self.successor(&set, d) {
                prefix.push(d);
                let found = self.find_dead_end(prefix, next, memo, seen)?;
                prefix.pop();
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }

    /// Greedy construction: starting from `[]`, append the lowest-index
    /// default that keeps the process successful until it is closed. On a
    /// fail-safe semantics this always ends in a successful and closed
    /// process after at most `|D|` steps.
    pub fn construct_extension_failsafe(&self) -> Result<Process, EngineError> {
        self.reset_budget();
        let mut steps = Vec::new();
        let mut set = StepSet::new(self.m());
        loop {
            self.tick()?;
            if self.closed_set(&set) {
                return Ok(Process(steps));
            }
            match (0..self.m()).find_map(|d| self.successor(&set, d).map(|next| (d, next))) {
                Some((d, next)) => {
                    steps.push(d);
                    set = next;
                }
                None => return Err(EngineError::Stuck(steps)),
            }
        }
    }
}

pub fn is_process(t: &DefaultTheory, p: &Process) -> Result<bool, EngineError> {
    Engine::new(t, Semantics::REITER)?.is_process(p)
}

pub fn is_successful(t: &DefaultTheory, s: Semantics, p: &Process) -> Result<bool, EngineError> {
    Engine::new(t, s)?.is_successful(p)
}

pub fn is_closed(t: &DefaultTheory, s: Semantics, p: &Process) -> Result<bool, EngineError> {
    Engine::new(t, s)?.is_closed(p)
}

pub fn enumerate_processes(t: &DefaultTheory, s: Semantics) -> Result<Vec<Process>, EngineError> {
    Engine::new(t, s)?.enumerate_processes()
}

pub fn extensions(t: &DefaultTheory, s: Semantics) -> Result<Vec<Extension>, EngineError> {
    Engine::new(t, s)?.extensions()
}

pub fn skeptical_entails(t: &DefaultTheory, s: Semantics, q: &Formula) -> Result<bool, EngineError> {
    Engine::new(t, s)?.skeptical_entails(q)
}

pub fn credulous_entails(t: &DefaultTheory, s: Semantics, q: &Formula) -> Result<bool, EngineError> {
    Engine::new(t, s)?.credulous_entails(q)
}

pub fn is_fail_safe_on(t: &DefaultTheory, s: Semantics) -> Result<bool, EngineError> {
    Engine::new(t, s)?.is_fail_safe_on()
}

pub fn completable(t: &DefaultTheory, s: Semantics, prefix: &Process) -> Result<bool, EngineError> {
    Engine::new(t, s)?.completable(prefix)
}

pub fn construct_extension_failsafe(
    t: &DefaultTheory,
    s: Semantics,
) -> Result<Process, EngineError> {
    Engine::new(t, s)?.construct_extension_failsafe()
}
