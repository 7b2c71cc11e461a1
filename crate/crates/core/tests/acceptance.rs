//! Acceptance run. Prints one PASS/FAIL line per criterion and exits with
//! status 1 if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dlw_core::process::Engine;
use dlw_core::sat::equivalent;
use dlw_core::translate::flag_atom;
use dlw_core::verify::{
    check_almost, check_almost_credulous_conjunctive, check_failsafe_asymmetry, check_faithful,
    check_oracle, check_properties, check_simulation, corpus_with_extensions, literal_queries,
    random_theory, CorpusParams, Report, TURNER_THEORY,
};
use dlw_core::{DefaultTheory, Formula, Process, Semantics};

const SEED: u64 = 20_240_601;

fn theory(text: &str) -> DefaultTheory {
    DefaultTheory::parse(text).expect("fixture parses")
}

fn f(s: &str) -> Formula {
    s.parse().expect("fixture parses")
}

fn mismatches<'a>(reports: impl IntoIterator<Item = &'a Report>) -> Vec<String> {
    reports
        .into_iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}:{}:{} {}", r.theory_id, r.property, r.semantics, r.detail))
        .collect()
}

fn outcome(problems: Vec<String>) -> Result<String, String> {
    if problems.is_empty() {
        Ok("0 violations".into())
    } else {
        Err(format!("{} violations, first: {}", problems.len(), problems[0]))
    }
}

fn small_corpus() -> CorpusParams {
    CorpusParams::new(200, SEED).max_defaults(3).max_atoms(3).formula_depth(3)
}

fn reiter_corpus() -> Vec<(usize, DefaultTheory)> {
    let p = CorpusParams::new(100, SEED).max_defaults(2).max_atoms(2).formula_depth(3);
    corpus_with_extensions(&p, Semantics::REITER).expect("enough theories with extensions")
}

fn criterion_1() -> Result<String, String> {
    let t = theory("W: a.\nd1: a : b / c.\nd2: c : a / ~b.\n");
    let reiter = Engine::new(&t, Semantics::REITER).unwrap().extensions().unwrap();
    let constrained = Engine::new(&t, Semantics::CONSTRAINED).unwrap().extensions().unwrap();
    if !reiter.is_empty() {
        return Err(format!("reiter: {} extensions", reiter.len()));
    }
    if constrained.len() != 1 || !equivalent(&constrained[0].axiom, &f("a & c")) {
        return Err(format!("constrained: {} extensions", constrained.len()));
    }
    Ok("reiter none, constrained [a & c]".into())
}

fn criterion_2() -> Result<String, String> {
    let t = theory(TURNER_THEORY);
    let e = Engine::new(&t, Semantics::REITER).unwrap();
    let exts = e.extensions().unwrap();
    if exts.len() != 1 || !equivalent(&exts[0].axiom, &f("h")) {
        return Err(format!("{} extensions", exts.len()));
    }
    if !e.skeptical_entails(&f("h")).unwrap() {
        return Err("h not skeptically entailed".into());
    }
    let fs = e.fail_safety().unwrap();
    let d2 = Process::from_names(&t, &["d2"]).unwrap();
    let d1 = Process::from_names(&t, &["d1"]).unwrap();
    if fs.fail_safe || fs.witness.as_ref() != Some(&d2) {
        return Err(format!("fail-safety {fs:?}"));
    }
    if e.completable(&d2).unwrap() || !e.completable(&d1).unwrap() {
        return Err("completability of [d2]/[d1] wrong".into());
    }
    Ok("one extension [h], not fail-safe at [d2], [d1] completes".into())
}

fn criterion_3() -> Result<String, String> {
    let t = theory("d1: : a / ~a.\n");
    let n = Engine::new(&t, Semantics::REITER).unwrap().extensions().unwrap().len();
    if n == 0 {
        Ok("no extension".into())
    } else {
        Err(format!("{n} extensions"))
    }
}

fn criterion_4() -> Result<String, String> {
    let p = small_corpus();
    let reports: Vec<Report> = (0..p.count)
        .map(|i| check_oracle(&random_theory(&p, i)).unwrap().with_id(i.to_string()))
        .collect();
    outcome(mismatches(&reports)).map(|s| format!("{s} over {} theories", reports.len()))
}

fn criterion_5() -> Result<String, String> {
    let run = check_failsafe_asymmetry(&small_corpus()).map_err(|e| e.to_string())?;
    let detail = run.reports.last().map(|r| r.detail.clone()).unwrap_or_default();
    outcome(mismatches(&run.reports)).map(|s| format!("{s}; {detail}"))
}

fn criterion_6(corpus: &[(usize, DefaultTheory)]) -> Result<String, String> {
    let flag = Formula::atom(&flag_atom());
    let reports: Vec<Report> = corpus
        .iter()
        .map(|(i, t)| check_simulation(t, Semantics::REITER, &flag).unwrap().with_id(i.to_string()))
        .collect();
    outcome(mismatches(&reports)).map(|s| format!("{s} over {} theories", reports.len()))
}

fn criterion_7(corpus: &[(usize, DefaultTheory)]) -> Result<String, String> {
    let reports: Vec<Report> = corpus
        .iter()
        .map(|(i, t)| check_faithful(t, Semantics::REITER).unwrap().with_id(i.to_string()))
        .collect();
    outcome(mismatches(&reports)).map(|s| format!("{s} over {} theories", reports.len()))
}

/// Skeptical with `flag | q` and credulous with `flag & q` on the `~flag`
/// build, as stated.
fn criterion_8(corpus: &[(usize, DefaultTheory)]) -> Result<String, String> {
    let mut skeptical = Vec::new();
    let mut credulous = Vec::new();
    for (i, t) in corpus {
        let qs = literal_queries(t);
        let almost = check_almost(t, Semantics::REITER, &qs).unwrap();
        skeptical.push(almost[0].clone().with_id(i.to_string()));
        credulous.push(
            check_almost_credulous_conjunctive(t, Semantics::REITER, &qs)
                .unwrap()
                .with_id(i.to_string()),
        );
    }
    let (sk, cr) = (mismatches(&skeptical), mismatches(&credulous));
    let detail = format!(
        "skeptical: {} violations; credulous (flag & q): {} violations{}",
        sk.len(),
        cr.len(),
        sk.iter().chain(&cr).next().map(|p| format!(", first: {p}")).unwrap_or_default()
    );
    if sk.is_empty() && cr.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Credulous with the `flag | q` rewrite used by the library.
fn criterion_8_disjunctive(corpus: &[(usize, DefaultTheory)]) -> Result<String, String> {
    let reports: Vec<Report> = corpus
        .iter()
        .map(|(i, t)| {
            check_almost(t, Semantics::REITER, &literal_queries(t)).unwrap()[1]
                .clone()
                .with_id(i.to_string())
        })
        .collect();
    outcome(mismatches(&reports)).map(|s| format!("{s} over {} theories", reports.len()))
}

fn criterion_9() -> Result<String, String> {
    let p = small_corpus();
    let mut reports = Vec::new();
    for i in 0..p.count {
        for r in check_properties(&random_theory(&p, i)).unwrap() {
            reports.push(r.with_id(i.to_string()));
        }
    }
    outcome(mismatches(&reports)).map(|s| format!("{s} in {} property reports", reports.len()))
}

fn run(
    label: &str,
    limit: Duration,
    informational: bool,
    check: impl FnOnce() -> Result<String, String>,
) -> bool {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let (ok, detail) = match result {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}, but took {elapsed:.2?} > {limit:?}")),
        Err(d) => (false, d),
    };
    let tag = match (informational, ok) {
        (false, true) => "PASS",
        (false, false) => "FAIL",
        (true, true) => "INFO pass",
        (true, false) => "INFO fail",
    };
    println!("{tag} {label} ({elapsed:.2?}): {detail}");
    ok || informational
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= run("criterion 1: T extensions", secs(1), false, criterion_1);
    ok &= run("criterion 2: Turner theory", secs(1), false, criterion_2);
    ok &= run("criterion 3: self-defeating default", secs(1), false, criterion_3);
    ok &= run("criterion 4: fixpoint oracle", secs(120), false, criterion_4);
    ok &= run("criterion 5: fail-safety", secs(120), false, criterion_5);

    let start = Instant::now();
    let corpus = reiter_corpus();
    let scan = start.elapsed();
    println!("     corpus: {} Reiter theories with extensions, scanned in {scan:.2?}", corpus.len());
    ok &= run("criterion 6: simulation", secs(600) - scan, false, || criterion_6(&corpus));
    ok &= run("criterion 7: faithful translation", secs(600) - scan, false, || criterion_7(&corpus));
    ok &= run("criterion 8: almost translation", secs(600) - scan, false, || criterion_8(&corpus));
    ok &= run("criterion 8, credulous via flag | q", secs(600), true, || {
        criterion_8_disjunctive(&corpus)
    });
    ok &= run("criterion 9: process properties", secs(120), false, criterion_9);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
