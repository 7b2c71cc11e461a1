//! Translations of a regular semantics into normal default logic.
//!
//! All of them rest on one construction, the *simulation*: a normal theory
//! whose processes first guess which source defaults are applied (families
//! A and N), then record the outcome of every consistency check the source
//! semantics needs (families V and G), and finally either assert the
//! simulated extension, when the recorded outcomes say the guessed process is
//! successful and closed, or a fixed formula `F` otherwise (family Z).
//!
//! Fresh atoms:
//!
//! | atom          | meaning                                      |
//! |---------------|----------------------------------------------|
//! | `__c<i>`      | source default `i` is in the process         |
//! | `__e<i>`      | the choice for default `i` has been made     |
//! | `__o<k>`      | check `k` came out consistent                |
//! | `__t<k>`      | check `k` has been recorded                  |
//! | `__x<k>_<p>`  | copy of source atom `p` private to check `k`; `k = 0` carries `W` |
//! | `__a`         | flag atom of the almost-consequence-preserving translation |

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{EngineError, TranslateError};
use crate::logic::{Assignment, Atom, Formula, Renaming};
use crate::process::{Closure, Engine, Process, Semantics, Successfulness};
use crate::sat::Oracle;
use crate::theory::{serialize_with_comments, Default, DefaultTheory, Reasoning};

/// Consistency checks `δ_1 … δ_u` over the source alphabet plus membership
/// atoms `__c<j>`, and a circuit over `__o<k>`/`__c<j>` that combines their
/// outcomes into "successful and closed".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSuite {
    pub checks: Vec<Formula>,
    pub circuit: Formula,
    pub membership: Vec<Atom>,
    pub outcomes: Vec<Atom>,
}

fn member_atom(i: usize) -> Atom {
    Atom::reserved(&format!("c{i}"))
}

fn chosen_atom(i: usize) -> Atom {
    Atom::reserved(&format!("e{i}"))
}

fn outcome_atom(k: usize) -> Atom {
    Atom::reserved(&format!("o{k}"))
}

fn recorded_atom(k: usize) -> Atom {
    Atom::reserved(&format!("t{k}"))
}

/// The flag atom `__a`.
pub fn flag_atom() -> Atom {
    Atom::reserved("a")
}

fn copy_renaming(alphabet: &BTreeSet<Atom>, k: usize) -> Renaming {
    Renaming::from_pairs(
        alphabet.iter().map(|x| (x.clone(), Atom::reserved(&format!("x{k}_{x}")))),
    )
    .expect("copies of distinct atoms are distinct")
}

fn var(a: &Atom) -> Formula {
    Formula::atom(a)
}

impl CheckSuite {
    pub fn u(&self) -> usize {
        self.checks.len()
    }

    /// Circuit value for a step set: `__c<j>` says whether default `j` is
    /// applied and `__o<k>` whether `δ_k` is consistent under those values.
    pub fn evaluate(&self, applied: &Process, oracle: &Oracle) -> bool {
        let mut m = Assignment::new();
        for (j, c) in self.membership.iter().enumerate() {
            m.insert(c.clone(), applied.contains(j));
        }
        for (k, check) in self.checks.iter().enumerate() {
            let mut fixed = check.clone();
            for (c, &v) in &m {
                fixed = fixed.substitute(c, v);
            }
            m.insert(self.outcomes[k].clone(), oracle.is_consistent([&fixed]));
        }
        self.circuit.evaluate(&m).expect("circuit mentions only c- and o-atoms")
    }
}

/// Checks and circuit for Reiter's and constrained default logic.
pub fn generate_checks(t: &DefaultTheory, s: Semantics) -> Result<CheckSuite, TranslateError> {
    if s.requires_normal() && !t.is_normal() {
        return Err(EngineError::RequiresNormal { semantics: s.name().to_string() }.into());
    }
    let ds = t.defaults();
    let m = ds.len();
    let w = t.background().clone();
    let c: Vec<Formula> = (1..=m).map(|i| var(&member_atom(i))).collect();
    // ⋀_j (c_j -> γ_j)
    let applied_cons: Vec<Formula> =
        (0..m).map(|j| Formula::implies(c[j].clone(), ds[j].cons.clone())).collect();
    let context = |extra: Vec<Formula>| {
        Formula::and(std::iter::once(w.clone()).chain(applied_cons.iter().cloned()).chain(extra))
    };

    let (checks, circuit) = match (s.successfulness, s.closure) {
        (Successfulness::Local, Closure::Inapplicability) => {
            // δ_i: justification i consistent; δ_{m+i}: precondition i not entailed
            let mut checks: Vec<Formula> = ds.iter().map(|d| context(vec![d.just.clone()])).collect();
            checks.extend(ds.iter().map(|d| context(vec![d.prec.clone().negate()])));
            let o: Vec<Formula> = (1..=2 * m).map(|k| var(&outcome_atom(k))).collect();
            let circuit = Formula::and((0..m).flat_map(|i| {
                [
                    Formula::implies(c[i].clone(), o[i].clone()),
                    Formula::implies(
                        c[i].clone().negate(),
                        Formula::Or(vec![o[m + i].clone(), o[i].clone().negate()]),
                    ),
                ]
            }));
            (checks, circuit)
        }
        (Successfulness::Global, Closure::Maximality) => {
            let applied_just: Vec<Formula> =
                (0..m).map(|j| Formula::implies(c[j].clone(), ds[j].just.clone())).collect();
            // δ_i: Π·[d_i] globally consistent; δ_{m+i}: precondition i not
            // entailed; δ_{2m+1}: Π globally successful
            let mut checks: Vec<Formula> = ds
                .iter()
                .map(|d| {
                    let mut extra = applied_just.clone();
                    extra.push(d.cons.clone());
                    extra.push(d.just.clone());
                    context(extra)
                })
                .collect();
            checks.extend(ds.iter().map(|d| context(vec![d.prec.clone().negate()])));
            checks.push(context(applied_just.clone()));
            let o: Vec<Formula> = (1..=2 * m + 1).map(|k| var(&outcome_atom(k))).collect();
            let circuit = Formula::and(std::iter::once(o[2 * m].clone()).chain((0..m).map(|i| {
                Formula::implies(
                    c[i].clone().negate(),
                    Formula::Or(vec![o[m + i].clone(), o[i].clone().negate()]),
                )
            })));
            (checks, circuit)
        }
        _ => return Err(TranslateError::UnsupportedSemantics(s.name().to_string())),
    };
    Ok(CheckSuite {
        membership: (1..=m).map(member_atom).collect(),
        outcomes: (1..=checks.len()).map(outcome_atom).collect(),
        checks,
        circuit,
    })
}

/// Which part of the simulation a generated default belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// Applies source default `i`.
    A,
    /// Declines source default `i`.
    N,
    /// Records that check `i` is consistent.
    V,
    /// Records that check `i` is inconsistent.
    G,
    /// Outputs the simulated extension (`z1`) or `F` (`z2`).
    Z,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Family and 1-based index of a generated default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FamilyTag {
    pub family: Family,
    pub index: usize,
}

/// Atoms introduced by a simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshAtoms {
    pub membership: Vec<Atom>,
    pub chosen: Vec<Atom>,
    pub outcomes: Vec<Atom>,
    pub recorded: Vec<Atom>,
    pub flag: Option<Atom>,
    /// `copies[0]` renames the source alphabet for `W` and the A family,
    /// `copies[k]` for check `k`.
    pub copies: Vec<Renaming>,
}

/// A simulating normal theory and the bookkeeping that relates it to its
/// source.
#[derive(Debug, Clone)]
pub struct SimulationArtifacts {
    pub theory: DefaultTheory,
    /// Parallel to `theory.defaults()`.
    pub families: Vec<FamilyTag>,
    pub source_alphabet: BTreeSet<Atom>,
    pub source_len: usize,
    pub checks: CheckSuite,
    pub fallback: Formula,
    pub fresh: FreshAtoms,
}

impl SimulationArtifacts {
    pub fn m(&self) -> usize {
        self.source_len
    }

    pub fn u(&self) -> usize {
        self.checks.u()
    }

    pub fn tag(&self, index: usize) -> FamilyTag {
        self.families[index]
    }

    /// `.dlt` text with `#family <name> <family> <index>` lines.
    pub fn serialize(&self) -> String {
        let lines: Vec<String> = self
            .theory
            .defaults()
            .iter()
            .zip(&self.families)
            .map(|(d, tag)| format!("#family {} {} {}", d.name, tag.family, tag.index))
            .collect();
        serialize_with_comments(&self.theory, &lines)
    }
}

fn check_source(t: &DefaultTheory) -> Result<(), TranslateError> {
    match t.atoms().into_iter().find(Atom::is_generated) {
        Some(a) => Err(TranslateError::ReservedInSource(a)),
        None => Ok(()),
    }
}

/// Simulation of `t` under `s`, outputting `fallback` for processes that are
/// not successful and closed.
pub fn build_simulation(
    t: &DefaultTheory,
    s: Semantics,
    fallback: &Formula,
) -> Result<SimulationArtifacts, TranslateError> {
    let suite = generate_checks(t, s)?;
    build_simulation_with_checks(t, suite, fallback)
}

/// Simulation driven by an explicit check suite.
pub fn build_simulation_with_checks(
    t: &DefaultTheory,
    suite: CheckSuite,
    fallback: &Formula,
) -> Result<SimulationArtifacts, TranslateError> {
    check_source(t)?;
    let flag = flag_atom();
    if let Some(a) = fallback.atoms().into_iter().find(|a| a.is_generated() && *a != flag) {
        return Err(TranslateError::ReservedInF(a));
    }
    let ds = t.defaults();
    let m = ds.len();
    let u = suite.u();
    let alphabet = t.atoms();
    let copies: Vec<Renaming> = (0..=u).map(|k| copy_renaming(&alphabet, k)).collect();

    let c: Vec<Formula> = suite.membership.iter().map(var).collect();
    let e: Vec<Formula> = (1..=m).map(|i| var(&chosen_atom(i))).collect();
    let o: Vec<Formula> = suite.outcomes.iter().map(var).collect();
    let tt: Vec<Formula> = (1..=u).map(|k| var(&recorded_atom(k))).collect();
    let all_chosen = Formula::and(e.iter().cloned());
    let all_recorded = Formula::and(tt.iter().cloned());

    let mut defaults = Vec::with_capacity(2 * m + 2 * u + 2);
    let mut families = Vec::with_capacity(2 * m + 2 * u + 2);
    for (i, d) in ds.iter().enumerate() {
        let cons =
            Formula::and([d.cons.rename(&copies[0]), c[i].clone(), e[i].clone()]);
        defaults.push(Default::normal(format!("a{}", i + 1), d.prec.rename(&copies[0]), cons));
        families.push(FamilyTag { family: Family::A, index: i + 1 });
    }
    for i in 0..m {
        let cons = Formula::and([c[i].clone().negate(), e[i].clone()]);
        defaults.push(Default::normal(format!("n{}", i + 1), Formula::True, cons));
        families.push(FamilyTag { family: Family::N, index: i + 1 });
    }
    for k in 0..u {
        let delta = suite.checks[k].rename(&copies[k + 1]);
        let cons = Formula::and([delta, o[k].clone(), tt[k].clone()]);
        defaults.push(Default::normal(format!("v{}", k + 1), all_chosen.clone(), cons));
        families.push(FamilyTag { family: Family::V, index: k + 1 });
    }
    for k in 0..u {
        let delta = suite.checks[k].rename(&copies[k + 1]);
        let prec = Formula::and([all_chosen.clone(), delta.negate()]);
        let cons = Formula::and([o[k].clone().negate(), tt[k].clone()]);
        defaults.push(Default::normal(format!("g{}", k + 1), prec, cons));
        families.push(FamilyTag { family: Family::G, index: k + 1 });
    }
    let simulated = Formula::and(
        std::iter::once(t.background().clone())
            .chain((0..m).map(|i| Formula::implies(c[i].clone(), ds[i].cons.clone()))),
    );
    let z1_prec = Formula::and([all_chosen.clone(), all_recorded.clone(), suite.circuit.clone()]);
    let z2_prec = Formula::and([all_chosen, all_recorded, suite.circuit.clone().negate()]);
    defaults.push(Default::normal("z1", z1_prec, simulated));
    families.push(FamilyTag { family: Family::Z, index: 1 });
    defaults.push(Default::normal("z2", z2_prec, fallback.clone()));
    families.push(FamilyTag { family: Family::Z, index: 2 });

    let background = t.background().rename(&copies[0]);
    let theory = DefaultTheory::new(defaults, background)
        .expect("generated names are unique and a renamed consistent W stays consistent");
    Ok(SimulationArtifacts {
        theory,
        families,
        source_alphabet: alphabet,
        source_len: m,
        fresh: FreshAtoms {
            membership: suite.membership.clone(),
            chosen: (1..=m).map(chosen_atom).collect(),
            outcomes: suite.outcomes.clone(),
            recorded: (1..=u).map(recorded_atom).collect(),
            flag: fallback.mentions(&flag).then_some(flag),
            copies,
        },
        checks: suite,
        fallback: fallback.clone(),
    })
}

/// The simulated source process: the A-family steps of `p`, in order.
pub fn extract_simulated(
    art: &SimulationArtifacts,
    p: &Process,
) -> Result<Process, TranslateError> {
    let engine = Engine::new(&art.theory, Semantics::REITER)?;
    if !engine.is_process(p)? {
        return Err(EngineError::NotAProcess.into());
    }
    Ok(Process::new(
        p.steps()
            .iter()
            .map(|&i| art.families[i])
            .filter(|tag| tag.family == Family::A)
            .map(|tag| tag.index - 1)
            .collect(),
    ))
}

/// Poly-size extension-preserving translation: the simulation with `F` set
/// to the extension of the lexicographically first successful and closed
/// process. Finding that process takes a full search.
pub fn faithful_translate(
    t: &DefaultTheory,
    s: Semantics,
) -> Result<SimulationArtifacts, TranslateError> {
    check_source(t)?;
    generate_checks(t, s)?;
    let engine = Engine::new(t, s)?;
    let first = engine.first_process()?.ok_or(TranslateError::NoExtension)?;
    build_simulation(t, s, &engine.axiom(&first))
}

/// Polynomial-time translation for query answering. The simulation outputs
/// `__a` (skeptical) or `~__a` (credulous) for failed simulated processes;
/// queries must go through [`transform_query`].
///
/// The source is expected to have an extension; this is not checked.
pub fn almost_translate(
    t: &DefaultTheory,
    s: Semantics,
    mode: Reasoning,
) -> Result<(SimulationArtifacts, Atom), TranslateError> {
    let flag = flag_atom();
    let fallback = match mode {
        Reasoning::Skeptical => var(&flag),
        Reasoning::Credulous => var(&flag).negate(),
    };
    Ok((build_simulation(t, s, &fallback)?, flag))
}

/// Query rewrite for [`almost_translate`]: `flag | q` in both modes.
///
/// Extensions asserting the simulated source extension never mention the
/// flag, so they entail `flag | q` exactly when they entail `q`. Under the
/// skeptical build the fallback extensions entail the flag and drop out of
/// the universal test. Under the credulous build they entail `~flag` and
/// therefore `flag | q` only for valid `q`, which some source extension
/// entails anyway.
pub fn transform_query(q: &Formula, _mode: Reasoning, flag: &Atom) -> Formula {
    Formula::Or(vec![var(flag), q.clone()])
}

/// Exponential extension-preserving translation: one mutually exclusive
/// normal default per extension.
pub fn enumerate_translate(t: &DefaultTheory, s: Semantics) -> Result<DefaultTheory, TranslateError> {
    check_source(t)?;
    let exts = Engine::new(t, s)?.extensions()?;
    if exts.is_empty() {
        return Err(TranslateError::NoExtension);
    }
    let k = exts.len();
    let e: Vec<Formula> = (1..=k).map(|i| var(&chosen_atom(i))).collect();
    let defaults = exts
        .iter()
        .enumerate()
        .map(|(i, ext)| {
            let cons = Formula::and(
                [e[i].clone(), ext.axiom.clone()]
                    .into_iter()
                    .chain((0..k).filter(|&j| j != i).map(|j| e[j].clone().negate())),
            );
            Default::normal(format!("x{}", i + 1), Formula::True, cons)
        })
        .collect();
    Ok(DefaultTheory::new(defaults, Formula::True).expect("distinct names, empty background"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::extensions;
    use crate::sat::{equivalent, var_equivalent};

    const T1: &str = "W: a. d1: a : b / c. d2: c : a / ~b.";
    const TURNER: &str = "d1: : h / h. d2: : ~h / ~h. d3: ~h : / false.";
    const CHOICE: &str = "d1: : b / b. d2: : ~b / ~b.";
    const SINGLE: &str = "W: a. d1: : b / b.";

    fn t(s: &str) -> DefaultTheory {
        DefaultTheory::parse(s).unwrap()
    }

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn reiter_checks_for_the_failure_example() {
        let suite = generate_checks(&t(T1), Semantics::REITER).unwrap();
        assert_eq!(suite.u(), 4);
        assert_eq!(suite.checks[0], f("a & (__c1 -> c) & (__c2 -> ~b) & b"));
        assert_eq!(suite.checks[2], f("a & (__c1 -> c) & (__c2 -> ~b) & ~a"));
        let atoms = suite.circuit.atoms();
        assert!(atoms.iter().all(|a| a.as_str().starts_with("__o") || a.as_str().starts_with("__c")));
    }

    #[test]
    fn empty_process_is_not_closed_by_the_circuit() {
        let th = t(T1);
        let suite = generate_checks(&th, Semantics::REITER).unwrap();
        assert!(!suite.evaluate(&Process::empty(), &Oracle::new()));
    }

    #[test]
    fn justified_has_no_check_generator() {
        assert_eq!(
            generate_checks(&t(T1), Semantics::JUSTIFIED),
            Err(TranslateError::UnsupportedSemantics("justified".into()))
        );
    }

    #[test]
    fn simulation_shape() {
        let art = build_simulation(&t(T1), Semantics::REITER, &var(&flag_atom())).unwrap();
        assert_eq!(art.theory.len(), 14);
        assert!(art.theory.is_normal());
        assert_eq!(art.theory.background(), &f("__x0_a"));
        assert_eq!(art.theory.defaults()[0].prec, f("__x0_a"));
        assert_eq!(art.theory.defaults()[0].cons, f("__x0_c & __c1 & __e1"));
        assert_eq!(art.theory.defaults()[2].cons, f("~__c1 & __e1"));
        assert_eq!(art.theory.defaults()[4].prec, f("__e1 & __e2"));
        assert_eq!(
            art.theory.defaults()[4].cons,
            f("(__x1_a & (__c1 -> __x1_c) & (__c2 -> ~__x1_b) & __x1_b) & __o1 & __t1")
        );
        assert_eq!(art.theory.defaults()[13].cons, f("__a"));
        assert_eq!(art.tag(13), FamilyTag { family: Family::Z, index: 2 });
        assert_eq!(art.fresh.flag, Some(flag_atom()));
    }

    #[test]
    fn turner_simulation_size() {
        let (art, _) = almost_translate(&t(TURNER), Semantics::REITER, Reasoning::Skeptical).unwrap();
        assert_eq!(art.theory.len(), 20);
    }

    #[test]
    fn fallback_may_only_use_the_flag() {
        assert_eq!(
            build_simulation(&t(SINGLE), Semantics::REITER, &f("__c1")).unwrap_err(),
            TranslateError::ReservedInF(Atom::new("__c1").unwrap())
        );
    }

    #[test]
    fn single_default_simulation_extensions() {
        let th = t(SINGLE);
        let art = build_simulation(&th, Semantics::REITER, &var(&flag_atom())).unwrap();
        let exts = extensions(&art.theory, Semantics::REITER).unwrap();
        let x = th.atoms();
        assert_eq!(exts.len(), 2);
        let mut classes = [false, false];
        for e in &exts {
            classes[0] |= var_equivalent(&e.axiom, &f("a & b"), &x);
            classes[1] |= var_equivalent(&e.axiom, &f("__a"), &x)
                && Oracle::new().entails([&e.axiom], &f("__a"));
        }
        assert_eq!(classes, [true, true]);
    }

    #[test]
    fn extraction() {
        let th = t(CHOICE);
        let art = build_simulation(&th, Semantics::REITER, &var(&flag_atom())).unwrap();
        // a2, n1 is a process of the simulation
        let p = Process::new(vec![1, 2]);
        assert_eq!(extract_simulated(&art, &p).unwrap(), Process::new(vec![1]));
        let p = Process::new(vec![2, 3]);
        assert_eq!(extract_simulated(&art, &p).unwrap(), Process::empty());
        // a1 and n1 together are inconsistent
        assert!(extract_simulated(&art, &Process::new(vec![0, 2])).is_err());
    }

    #[test]
    fn faithful_translation_of_a_single_extension() {
        let th = t(SINGLE);
        let art = faithful_translate(&th, Semantics::REITER).unwrap();
        assert!(equivalent(&art.fallback, &f("a & b")));
        let x = th.atoms();
        for e in extensions(&art.theory, Semantics::REITER).unwrap() {
            assert!(var_equivalent(&e.axiom, &f("a & b"), &x));
        }
    }

    #[test]
    fn faithful_needs_an_extension() {
        assert_eq!(
            faithful_translate(&t(T1), Semantics::REITER).unwrap_err(),
            TranslateError::NoExtension
        );
    }

    #[test]
    fn query_rewrite() {
        let a = flag_atom();
        assert_eq!(transform_query(&f("b"), Reasoning::Skeptical, &a), f("__a | b"));
        assert!(equivalent(&transform_query(&Formula::False, Reasoning::Skeptical, &a), &f("__a")));
    }

    #[test]
    fn enumeration_translation() {
        let out = enumerate_translate(&t(CHOICE), Semantics::REITER).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.is_normal());
        let x: BTreeSet<Atom> = [Atom::new("b").unwrap()].into();
        let exts = extensions(&out, Semantics::REITER).unwrap();
        assert_eq!(exts.len(), 2);
        assert!(var_equivalent(&exts[0].axiom, &f("b"), &x));
        assert!(var_equivalent(&exts[1].axiom, &f("~b"), &x));

        let out = enumerate_translate(&t(T1), Semantics::CONSTRAINED).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.defaults()[0].cons, f("__e1 & (a & c)"));
        assert_eq!(
            crate::process::enumerate_processes(&out, Semantics::REITER).unwrap(),
            vec![Process::new(vec![0])]
        );
    }

    #[test]
    fn family_lines_in_serialization() {
        let art = build_simulation(&t(SINGLE), Semantics::REITER, &var(&flag_atom())).unwrap();
        let text = art.serialize();
        assert!(text.starts_with("#generated\n#family a1 A 1\n"));
        assert!(text.contains("#family z2 Z 2\n"));
        assert_eq!(DefaultTheory::parse(&text).unwrap(), art.theory);
    }
}
