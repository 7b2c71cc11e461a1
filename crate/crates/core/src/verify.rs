//! Random corpora, an extension oracle independent of processes, and the
//! checks that compare engine and translations against each other.
//!
//! Every check produces [`Report`]s. A failing report carries the theory
//! text (and the offending process or query) so that the failure can be
//! reproduced with [`replay`].

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::VerifyError;
use crate::logic::{Atom, Formula};
use crate::process::{Closure, Engine, Process, Semantics, Successfulness};
use crate::sat::Oracle;
use crate::theory::{Default, DefaultTheory, Reasoning};
use crate::translate::{
    almost_translate, build_simulation_with_checks, faithful_translate, flag_atom,
    generate_checks, transform_query, CheckSuite, Family, SimulationArtifacts,
};

/// Largest theory the subset-sweep oracle accepts.
pub const ORACLE_MAX_DEFAULTS: usize = 12;
/// Largest source theory for which the simulation check enumerates every
/// simulation process.
pub const SIMULATION_MAX_DEFAULTS: usize = 2;
/// Largest source theory for which translated extensions are enumerated.
pub const TRANSLATION_MAX_DEFAULTS: usize = 3;

/// The theory in which a killing default removes the candidate extension
/// `~h`, so that applying `d2` first leads to a dead end.
pub const TURNER_THEORY: &str = "d1: : h / h.\nd2: : ~h / ~h.\nd3: ~h : / false.\n";

/// Parameters of a seeded random corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorpusParams {
    pub max_defaults: usize,
    pub max_atoms: usize,
    pub formula_depth: usize,
    pub seed: u64,
    pub count: usize,
}

impl CorpusParams {
    pub fn new(count: usize, seed: u64) -> CorpusParams {
        CorpusParams { max_defaults: 3, max_atoms: 3, formula_depth: 3, seed, count }
    }

    pub fn max_defaults(mut self, n: usize) -> Self {
        self.max_defaults = n;
        self
    }

    pub fn max_atoms(mut self, n: usize) -> Self {
        self.max_atoms = n;
        self
    }

    pub fn formula_depth(mut self, n: usize) -> Self {
        self.formula_depth = n;
        self
    }
}

/// A replayable failure witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// `.dlt` text of the theory.
    pub theory: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
}

/// Outcome of one property on one theory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub theory_id: String,
    pub property: String,
    pub semantics: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Report {
    fn pass(property: &str, s: Semantics) -> Report {
        Report {
            theory_id: String::new(),
            property: property.to_string(),
            semantics: s.name().to_string(),
            pass: true,
            detail: String::new(),
            counterexample: None,
        }
    }

    fn fail(property: &str, s: Semantics, t: &DefaultTheory, detail: String) -> Report {
        Report {
            pass: false,
            detail,
            counterexample: Some(Counterexample {
                theory: t.serialize(),
                process: None,
                query: None,
            }),
            ..Report::pass(property, s)
        }
    }

    fn with_process(mut self, names: Vec<String>) -> Report {
        if let Some(c) = &mut self.counterexample {
            c.process = Some(names);
        }
        self
    }

    fn with_query(mut self, q: &Formula) -> Report {
        if let Some(c) = &mut self.counterexample {
            c.query = Some(q.to_string());
        }
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Report {
        self.theory_id = id.into();
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Reports of a corpus run, ordered by theory index.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CorpusRun {
    pub reports: Vec<Report>,
    pub skipped_by_guard: usize,
}

impl CorpusRun {
    pub fn failures(&self) -> impl Iterator<Item = &Report> {
        self.reports.iter().filter(|r| !r.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    fn merge(parts: Vec<Result<Vec<Report>, VerifyError>>) -> Result<CorpusRun, VerifyError> {
        let mut run = CorpusRun::default();
        for part in parts {
            match part {
                Ok(rs) => run.reports.extend(rs),
                Err(VerifyError::Guard(_)) => run.skipped_by_guard += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(run)
    }
}

fn atom_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("p{i}")
    }
}

fn random_nnf(rng: &mut ChaCha8Rng, atoms: &[Atom], depth: usize) -> Formula {
    if atoms.is_empty() {
        return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
    }
    if depth == 0 || rng.gen_bool(0.4) {
        let a = Formula::atom(&atoms[rng.gen_range(0..atoms.len())]);
        return if rng.gen_bool(0.5) { a } else { a.negate() };
    }
    let parts = vec![random_nnf(rng, atoms, depth - 1), random_nnf(rng, atoms, depth - 1)];
    if rng.gen_bool(0.5) {
        Formula::And(parts)
    } else {
        Formula::Or(parts)
    }
}

/// Theory `index` of the corpus. The result depends only on the parameters
/// and the index; `index` may exceed `count` when a caller scans for
/// theories with some property.
pub fn random_theory(p: &CorpusParams, index: usize) -> DefaultTheory {
    let mut rng =
        ChaCha8Rng::seed_from_u64(p.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let n_atoms = if p.max_atoms == 0 { 0 } else { rng.gen_range(1..=p.max_atoms) };
    let atoms: Vec<Atom> =
        (0..n_atoms).map(|i| Atom::new(&atom_name(i)).expect("letters are atoms")).collect();
    let m = rng.gen_range(0..=p.max_defaults);
    let oracle = Oracle::new();
    let background = if rng.gen_bool(0.5) {
        Formula::True
    } else {
        loop {
            let w = random_nnf(&mut rng, &atoms, p.formula_depth);
            if oracle.is_consistent([&w]) {
                break w;
            }
        }
    };
    let defaults = (1..=m)
        .map(|i| {
            let prec = if rng.gen_bool(0.5) {
                Formula::True
            } else {
                random_nnf(&mut rng, &atoms, p.formula_depth)
            };
            let just = if rng.gen_bool(0.15) {
                Formula::True
            } else {
                random_nnf(&mut rng, &atoms, p.formula_depth)
            };
            let cons = if rng.gen_bool(0.07) {
                Formula::False
            } else {
                random_nnf(&mut rng, &atoms, p.formula_depth)
            };
            Default::new(format!("d{i}"), prec, just, cons)
        })
        .collect();
    DefaultTheory::new(defaults, background).expect("names are distinct and W is consistent")
}

/// Reiter extensions by the classical fixpoint characterisation, without
/// processes: `W ∧ cons(S)` is an extension iff the defaults that become
/// applicable, starting from `W` and testing justifications against
/// `W ∧ cons(S)`, are exactly `S`.
pub fn reiter_fixpoint_extensions(t: &DefaultTheory) -> Result<Vec<Formula>, VerifyError> {
    let ds = t.defaults();
    let m = ds.len();
    if m > ORACLE_MAX_DEFAULTS {
        return Err(VerifyError::Guard(format!(
            "subset sweep needs at most {ORACLE_MAX_DEFAULTS} defaults, got {m}"
        )));
    }
    let oracle = Oracle::new();
    let w = t.background();
    let mut out: Vec<Formula> = Vec::new();
    for mask in 0u32..(1 << m) {
        let in_s = |i: usize| mask & (1 << i) != 0;
        let candidate = Formula::and(
            std::iter::once(w.clone()).chain((0..m).filter(|&i| in_s(i)).map(|i| ds[i].cons.clone())),
        );
        if !oracle.is_consistent([&candidate]) {
            continue;
        }
        let mut generating = vec![false; m];
        let mut known = vec![w.clone()];
        loop {
            let mut changed = false;
            for (i, d) in ds.iter().enumerate() {
                if generating[i] {
                    continue;
                }
                if oracle.entails(&known, &d.prec) && oracle.is_consistent([&candidate, &d.just]) {
                    generating[i] = true;
                    known.push(d.cons.clone());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if (0..m).all(|i| generating[i] == in_s(i))
            && !out.iter().any(|e| oracle.equivalent(e, &candidate))
        {
            out.push(candidate);
        }
    }
    Ok(out)
}

/// Both sides have the same extensions up to equivalence.
fn same_classes(oracle: &Oracle, xs: &[Formula], ys: &[Formula]) -> bool {
    xs.iter().all(|x| ys.iter().any(|y| oracle.equivalent(x, y)))
        && ys.iter().all(|y| xs.iter().any(|x| oracle.equivalent(x, y)))
}

fn show(fs: &[Formula]) -> String {
    let parts: Vec<String> = fs.iter().map(|f| format!("[{f}]")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Engine extensions under Reiter's semantics against the fixpoint oracle.
pub fn check_oracle(t: &DefaultTheory) -> Result<Report, VerifyError> {
    let s = Semantics::REITER;
    let expected = reiter_fixpoint_extensions(t)?;
    let engine = Engine::new(t, s)?;
    let got: Vec<Formula> = engine.extensions()?.into_iter().map(|e| e.axiom).collect();
    if same_classes(&Oracle::new(), &got, &expected) {
        Ok(Report::pass("oracle", s))
    } else {
        Ok(Report::fail(
            "oracle",
            s,
            t,
            format!("engine {} vs fixpoint {}", show(&got), show(&expected)),
        ))
    }
}

fn projection(f: &Formula, keep: &BTreeSet<Atom>) -> Formula {
    let drop: BTreeSet<Atom> = f.atoms().difference(keep).cloned().collect();
    f.forget(&drop)
}

fn size_guard(t: &DefaultTheory, max: usize, what: &str) -> Result<(), VerifyError> {
    if t.len() > max {
        return Err(VerifyError::Guard(format!(
            "{what} check needs at most {max} defaults, got {}",
            t.len()
        )));
    }
    Ok(())
}

/// The correspondence between `t` under `s` and its simulation with
/// fallback `f`: circuit against the engine on every source process, phase
/// structure and check outcomes on every successful and closed simulation
/// process, and var-equivalence of extensions in both directions.
pub fn check_simulation(t: &DefaultTheory, s: Semantics, f: &Formula) -> Result<Report, VerifyError> {
    let suite = generate_checks(t, s)?;
    check_simulation_with_suite(t, s, suite, f)
}

/// [`check_simulation`] with an explicit check suite, e.g. a deliberately
/// broken one.
pub fn check_simulation_with_suite(
    t: &DefaultTheory,
    s: Semantics,
    suite: CheckSuite,
    f: &Formula,
) -> Result<Report, VerifyError> {
    size_guard(t, SIMULATION_MAX_DEFAULTS, "simulation")?;
    let art = build_simulation_with_checks(t, suite, f)?;
    let src = Engine::new(t, s)?;
    let oracle = Oracle::new();
    let prop = "simulation";

    for p in src.all_processes()? {
        let expected = src.is_successful_and_closed(&p)?;
        if art.checks.evaluate(&p, &oracle) != expected {
            return Ok(Report::fail(
                prop,
                s,
                t,
                format!("circuit disagrees with the engine (engine says {expected})"),
            )
            .with_process(p.names(t)));
        }
    }

    let sim = Engine::new(&art.theory, Semantics::REITER)?;
    for q in sim.enumerate_processes()? {
        if let Some(problem) = phase_violation(&art, &src, &oracle, &q)? {
            return Ok(Report::fail(prop, s, t, problem).with_process(q.names(&art.theory)));
        }
    }

    let keep: BTreeSet<Atom> = art.source_alphabet.union(&f.atoms()).cloned().collect();
    let source: Vec<Formula> = src.extensions()?.into_iter().map(|e| e.axiom).collect();
    let simulated: Vec<Formula> =
        sim.extensions()?.iter().map(|e| projection(&e.axiom, &keep)).collect();
    if let Some(e) = source.iter().find(|e| !simulated.iter().any(|x| oracle.equivalent(x, e))) {
        return Ok(Report::fail(
            prop,
            s,
            t,
            format!("source extension [{e}] has no counterpart among {}", show(&simulated)),
        ));
    }
    let fallback = projection(f, &keep);
    if let Some(x) = simulated.iter().find(|x| {
        !oracle.equivalent(x, &fallback) && !source.iter().any(|e| oracle.equivalent(x, e))
    }) {
        return Ok(Report::fail(
            prop,
            s,
            t,
            format!("simulation extension [{x}] is neither F nor a source extension"),
        ));
    }
    Ok(Report::pass(prop, s))
}

/// Phase structure of a successful and closed simulation process: one A or
/// N step per source default, then one V or G step per check, then one Z
/// step; each V/G step matches the check's actual outcome and the Z step
/// matches the simulated process's status.
fn phase_violation(
    art: &SimulationArtifacts,
    src: &Engine<'_>,
    oracle: &Oracle,
    q: &Process,
) -> Result<Option<String>, VerifyError> {
    let (m, u) = (art.m(), art.u());
    let tags: Vec<_> = q.steps().iter().map(|&i| art.tag(i)).collect();
    if tags.len() != m + u + 1 {
        return Ok(Some(format!("expected {} steps, found {}", m + u + 1, tags.len())));
    }
    let choice: BTreeSet<usize> = tags[..m]
        .iter()
        .filter(|t| matches!(t.family, Family::A | Family::N))
        .map(|t| t.index)
        .collect();
    if choice.len() != m {
        return Ok(Some("first phase does not decide every default once".into()));
    }
    let recorded: BTreeSet<usize> = tags[m..m + u]
        .iter()
        .filter(|t| matches!(t.family, Family::V | Family::G))
        .map(|t| t.index)
        .collect();
    if recorded.len() != u {
        return Ok(Some("second phase does not record every check once".into()));
    }
    if tags[m + u].family != Family::Z {
        return Ok(Some("last step is not an output default".into()));
    }

    let applied = crate::translate::extract_simulated(art, q)?;
    if !src.is_process(&applied)? {
        return Ok(Some("the simulated sequence is not a source process".into()));
    }
    let mut values = HashMap::new();
    for (j, c) in art.checks.membership.iter().enumerate() {
        values.insert(c.clone(), applied.contains(j));
    }
    for t in &tags[m..m + u] {
        let mut check = art.checks.checks[t.index - 1].clone();
        for (c, &v) in &values {
            check = check.substitute(c, v);
        }
        if oracle.is_consistent([&check]) != (t.family == Family::V) {
            return Ok(Some(format!("check {} recorded with the wrong outcome", t.index)));
        }
    }
    let closed = src.is_successful_and_closed(&applied)?;
    if closed != (tags[m + u].index == 1) {
        return Ok(Some(format!(
            "output z{} selected for a source process that is {}successful and closed",
            tags[m + u].index,
            if closed { "" } else { "not " }
        )));
    }
    Ok(None)
}

/// Faithful translation: normal output of size `2m + 2u + 2` whose
/// extensions match the source's modulo var-equivalence over the source
/// alphabet.
pub fn check_faithful(t: &DefaultTheory, s: Semantics) -> Result<Report, VerifyError> {
    size_guard(t, TRANSLATION_MAX_DEFAULTS, "faithful")?;
    let src = Engine::new(t, s)?;
    let source: Vec<Formula> = src.extensions()?.into_iter().map(|e| e.axiom).collect();
    if source.is_empty() {
        return Err(VerifyError::NoExtension);
    }
    let art = faithful_translate(t, s)?;
    let prop = "faithful";
    let size = 2 * art.m() + 2 * art.u() + 2;
    if !art.theory.is_normal() || art.theory.len() != size {
        return Ok(Report::fail(
            prop,
            s,
            t,
            format!("output has {} defaults (expected {size}) or is not normal", art.theory.len()),
        ));
    }
    let keep = art.source_alphabet.clone();
    let out: Vec<Formula> = Engine::new(&art.theory, Semantics::REITER)?
        .extensions()?
        .iter()
        .map(|e| projection(&e.axiom, &keep))
        .collect();
    if same_classes(&Oracle::new(), &source, &out) {
        Ok(Report::pass(prop, s))
    } else {
        Ok(Report::fail(prop, s, t, format!("source {} vs output {}", show(&source), show(&out))))
    }
}

/// Each source atom and its negation, plus `false`.
pub fn literal_queries(t: &DefaultTheory) -> Vec<Formula> {
    let mut qs: Vec<Formula> = t
        .atoms()
        .iter()
        .flat_map(|a| [Formula::atom(a), Formula::atom(a).negate()])
        .collect();
    qs.push(Formula::False);
    qs
}

fn almost_query_check(
    t: &DefaultTheory,
    s: Semantics,
    queries: &[Formula],
    mode: Reasoning,
    rewrite: impl Fn(&Formula, &Atom) -> Formula,
    prop: &str,
) -> Result<Report, VerifyError> {
    size_guard(t, TRANSLATION_MAX_DEFAULTS, "almost")?;
    let src = Engine::new(t, s)?;
    let source = src.extensions()?;
    if source.is_empty() {
        return Err(VerifyError::NoExtension);
    }
    let (art, flag) = almost_translate(t, s, mode)?;
    let out = Engine::new(&art.theory, Semantics::REITER)?.extensions()?;
    let oracle = Oracle::new();
    let verdict = |exts: &[crate::process::Extension], q: &Formula| match mode {
        Reasoning::Skeptical => exts.iter().all(|e| oracle.entails([&e.axiom], q)),
        Reasoning::Credulous => exts.iter().any(|e| oracle.entails([&e.axiom], q)),
    };
    for q in queries {
        let expected = verdict(&source, q);
        let rewritten = rewrite(q, &flag);
        let got = verdict(&out, &rewritten);
        if got != expected {
            return Ok(Report::fail(
                prop,
                s,
                t,
                format!("source says {expected}, output says {got} for [{rewritten}]"),
            )
            .with_query(q));
        }
    }
    Ok(Report::pass(prop, s))
}

/// Query answering through the almost-faithful translation, in both
/// reasoning modes, with the rewrite of [`transform_query`].
pub fn check_almost(
    t: &DefaultTheory,
    s: Semantics,
    queries: &[Formula],
) -> Result<Vec<Report>, VerifyError> {
    Ok(vec![
        almost_query_check(
            t,
            s,
            queries,
            Reasoning::Skeptical,
            |q, a| transform_query(q, Reasoning::Skeptical, a),
            "almost-skeptical",
        )?,
        almost_query_check(
            t,
            s,
            queries,
            Reasoning::Credulous,
            |q, a| transform_query(q, Reasoning::Credulous, a),
            "almost-credulous",
        )?,
    ])
}

/// Credulous answering on the `~flag` build with the conjunctive rewrite
/// `flag & q`. Extensions of that build either say nothing about the flag
/// or entail its negation, so this rewrite is never credulously entailed;
/// it is kept to document why [`transform_query`] does not use it.
pub fn check_almost_credulous_conjunctive(
    t: &DefaultTheory,
    s: Semantics,
    queries: &[Formula],
) -> Result<Report, VerifyError> {
    almost_query_check(
        t,
        s,
        queries,
        Reasoning::Credulous,
        |q, a| Formula::And(vec![Formula::atom(a), q.clone()]),
        "almost-credulous-conjunctive",
    )
}

/// Fail-safety of one theory under one semantics.
pub fn check_failsafe(t: &DefaultTheory, s: Semantics) -> Result<Report, VerifyError> {
    let engine = Engine::new(t, s)?;
    let fs = engine.fail_safety()?;
    let prop = "failsafe";
    if !fs.fail_safe {
        let w = fs.witness.unwrap_or_else(Process::empty);
        return Ok(Report::fail(prop, s, t, "successful process with no completion".into())
            .with_process(w.names(t)));
    }
    if engine.first_process()?.is_none() {
        return Ok(Report::fail(prop, s, t, "fail-safe but without extensions".into()));
    }
    Ok(Report::pass(prop, s))
}

/// Constrained semantics on the corpus and Reiter's on its normal
/// restriction must be fail-safe; Reiter's on the corpus plus the Turner
/// theory must fail somewhere.
pub fn check_failsafe_asymmetry(p: &CorpusParams) -> Result<CorpusRun, VerifyError> {
    let parts: Vec<Result<Vec<Report>, VerifyError>> = (0..p.count)
        .into_par_iter()
        .map(|i| {
            let t = random_theory(p, i);
            let id = i.to_string();
            Ok(vec![
                check_failsafe(&t, Semantics::CONSTRAINED)?.with_id(&id),
                check_failsafe(&t.normalized(), Semantics::REITER)?.with_id(&id),
            ])
        })
        .collect();
    let mut run = CorpusRun::merge(parts)?;

    let turner = DefaultTheory::parse(TURNER_THEORY).expect("built-in theory parses");
    let mut counted = Vec::new();
    for i in 0..p.count {
        let t = random_theory(p, i);
        if !Engine::new(&t, Semantics::REITER)?.is_fail_safe_on()? {
            counted.push(i.to_string());
        }
    }
    let turner_fs = Engine::new(&turner, Semantics::REITER)?.fail_safety()?;
    if !turner_fs.fail_safe {
        counted.push("turner".into());
    }
    let mut r = Report::pass("failsafe-asymmetry", Semantics::REITER).with_id("corpus+turner");
    r.detail = format!("reiter not fail-safe on {} theories: {}", counted.len(), counted.join(" "));
    if counted.is_empty() {
        r.pass = false;
        r.counterexample =
            Some(Counterexample { theory: turner.serialize(), process: None, query: None });
    }
    run.reports.push(r);
    Ok(run)
}

const PROPERTY_SEMANTICS: [Semantics; 3] =
    [Semantics::REITER, Semantics::CONSTRAINED, Semantics::JUSTIFIED];

/// Over all processes: prefixes of processes are processes, successfulness
/// is antimonotonic, and successfulness and closure depend only on the set
/// of applied defaults.
pub fn check_properties(t: &DefaultTheory) -> Result<Vec<Report>, VerifyError> {
    let reiter = Engine::new(t, Semantics::REITER)?;
    let processes = reiter.all_processes()?;
    let mut out = Vec::new();

    let mut r = Report::pass("process-prefix", Semantics::REITER);
    'prefix: for p in &processes {
        for k in 0..p.len() {
            if !reiter.is_process(&p.prefix(k))? {
                r = Report::fail("process-prefix", Semantics::REITER, t, format!("prefix {k} fails"))
                    .with_process(p.names(t));
                break 'prefix;
            }
        }
    }
    out.push(r);

    for (succ, s) in [
        (Successfulness::Local, Semantics::REITER),
        (Successfulness::Global, Semantics::CONSTRAINED),
    ] {
        let engine = Engine::new(t, Semantics::custom(succ, Closure::Inapplicability))?;
        let prop = "antimonotonicity";
        let mut r = Report::pass(prop, s);
        'anti: for p in &processes {
            if !engine.is_successful(p)? {
                continue;
            }
            for k in 0..p.len() {
                if !engine.is_successful(&p.prefix(k))? {
                    r = Report::fail(prop, s, t, format!("prefix of length {k} is not successful"))
                        .with_process(p.names(t));
                    break 'anti;
                }
            }
        }
        out.push(r);
    }

    let mut by_set: HashMap<BTreeSet<usize>, Vec<&Process>> = HashMap::new();
    for p in &processes {
        by_set.entry(p.steps().iter().copied().collect()).or_default().push(p);
    }
    let mut groups: Vec<_> = by_set.into_values().filter(|g| g.len() > 1).collect();
    groups.sort();
    for s in PROPERTY_SEMANTICS {
        let engine = Engine::new(t, s)?;
        let prop = "permutation-invariance";
        let mut r = Report::pass(prop, s);
        'perm: for g in &groups {
            let first = (engine.is_successful(g[0])?, engine.is_successful_and_closed(g[0])?);
            for p in &g[1..] {
                if (engine.is_successful(p)?, engine.is_successful_and_closed(p)?) != first {
                    r = Report::fail(prop, s, t, format!("differs from {:?}", g[0].names(t)))
                        .with_process(p.names(t));
                    break 'perm;
                }
            }
        }
        out.push(r);
    }
    Ok(out)
}

/// Which corpus check to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Oracle,
    Failsafe,
    Simulation,
    Faithful,
    Almost,
    Properties,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Oracle,
        CheckKind::Failsafe,
        CheckKind::Simulation,
        CheckKind::Faithful,
        CheckKind::Almost,
        CheckKind::Properties,
    ];

    /// Whether the check runs on theories that have an extension.
    pub fn needs_extension(self) -> bool {
        matches!(self, CheckKind::Simulation | CheckKind::Faithful | CheckKind::Almost)
    }
}

/// The first `p.count` corpus theories that have an extension under `s`,
/// with their corpus indices. Scans at most `50 * p.count` indices.
pub fn corpus_with_extensions(
    p: &CorpusParams,
    s: Semantics,
) -> Result<Vec<(usize, DefaultTheory)>, VerifyError> {
    let limit = p.count.saturating_mul(50).max(1);
    let mut found = Vec::with_capacity(p.count);
    let mut next = 0;
    while found.len() < p.count && next < limit {
        let end = (next + 4 * p.count.max(8)).min(limit);
        let batch: Vec<Option<(usize, DefaultTheory)>> = (next..end)
            .into_par_iter()
            .map(|i| {
                let t = random_theory(p, i);
                let has = Engine::new(&t, s)?.first_process()?.is_some();
                Ok::<_, VerifyError>(has.then_some((i, t)))
            })
            .collect::<Result<_, _>>()?;
        found.extend(batch.into_iter().flatten().take(p.count - found.len()));
        next = end;
    }
    if found.len() < p.count {
        return Err(VerifyError::Guard(format!(
            "only {} of the first {limit} corpus theories have an extension",
            found.len()
        )));
    }
    Ok(found)
}

/// Runs a check over a corpus. Checks that need an extension use the first
/// `p.count` theories that have one under `s`; the others use theories
/// `0..p.count`.
pub fn run_check(kind: CheckKind, p: &CorpusParams, s: Semantics) -> Result<CorpusRun, VerifyError> {
    if kind == CheckKind::Failsafe {
        return check_failsafe_asymmetry(p);
    }
    let corpus: Vec<(usize, DefaultTheory)> = if kind.needs_extension() {
        corpus_with_extensions(p, s)?
    } else {
        (0..p.count).map(|i| (i, random_theory(p, i))).collect()
    };
    let parts: Vec<Result<Vec<Report>, VerifyError>> = corpus
        .par_iter()
        .map(|(i, t)| {
            let reports = match kind {
                CheckKind::Oracle => vec![check_oracle(t)?],
                CheckKind::Simulation => vec![check_simulation(t, s, &Formula::atom(&flag_atom()))?],
                CheckKind::Faithful => vec![check_faithful(t, s)?],
                CheckKind::Almost => check_almost(t, s, &literal_queries(t))?,
                CheckKind::Properties => check_properties(t)?,
                CheckKind::Failsafe => unreachable!("handled above"),
            };
            Ok(reports.into_iter().map(|r| r.with_id(i.to_string())).collect())
        })
        .collect();
    CorpusRun::merge(parts)
}

/// Re-runs the property of a failing report on its counterexample and
/// returns whether it passes now.
pub fn replay(r: &Report) -> Result<bool, VerifyError> {
    let c = r
        .counterexample
        .as_ref()
        .ok_or_else(|| VerifyError::Guard("report carries no counterexample".into()))?;
    let t = DefaultTheory::parse(&c.theory)
        .map_err(|e| VerifyError::Guard(format!("counterexample does not parse: {e}")))?;
    let s = Semantics::by_name(&r.semantics)
        .ok_or_else(|| VerifyError::Guard(format!("unknown semantics `{}`", r.semantics)))?;
    let flag = Formula::atom(&flag_atom());
    let queries = match &c.query {
        Some(q) => vec![q
            .parse::<Formula>()
            .map_err(|e| VerifyError::Guard(format!("query does not parse: {e}")))?],
        None => literal_queries(&t),
    };
    let pass = match r.property.as_str() {
        "oracle" => check_oracle(&t)?.pass,
        "simulation" => check_simulation(&t, s, &flag)?.pass,
        "faithful" => check_faithful(&t, s)?.pass,
        "almost-skeptical" => check_almost(&t, s, &queries)?[0].pass,
        "almost-credulous" => check_almost(&t, s, &queries)?[1].pass,
        "almost-credulous-conjunctive" => check_almost_credulous_conjunctive(&t, s, &queries)?.pass,
        "failsafe" => check_failsafe(&t, s)?.pass,
        "process-prefix" | "antimonotonicity" | "permutation-invariance" => check_properties(&t)?
            .iter()
            .filter(|x| x.property == r.property && x.semantics == r.semantics)
            .all(|x| x.pass),
        other => return Err(VerifyError::Guard(format!("cannot replay property `{other}`"))),
    };
    Ok(pass)
}
