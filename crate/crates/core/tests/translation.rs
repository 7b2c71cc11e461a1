use std::collections::BTreeSet;

use dlw_core::process::{extensions, Engine};
use dlw_core::sat::{equivalent, var_equivalent};
use dlw_core::theory::Reasoning;
use dlw_core::translate::{
    almost_translate, build_simulation, enumerate_translate, faithful_translate, flag_atom,
    Family,
};
use dlw_core::verify::{
    check_almost, corpus_with_extensions, literal_queries, random_theory, CorpusParams,
    TURNER_THEORY,
};
use dlw_core::{Atom, DefaultTheory, Formula, Semantics, TranslateError};

fn t(s: &str) -> DefaultTheory {
    DefaultTheory::parse(s).unwrap()
}

fn f(s: &str) -> Formula {
    s.parse().unwrap()
}

#[test]
fn choice_simulation_has_three_classes() {
    let th = t("d1: : b / b. d2: : ~b / ~b.");
    let art = build_simulation(&th, Semantics::REITER, &f("__a")).unwrap();
    let keep: BTreeSet<Atom> = [Atom::new("b").unwrap(), flag_atom()].into();
    let mut classes: Vec<Formula> = Vec::new();
    for e in extensions(&art.theory, Semantics::REITER).unwrap() {
        if !classes.iter().any(|c| var_equivalent(c, &e.axiom, &keep)) {
            classes.push(e.axiom);
        }
    }
    assert_eq!(classes.len(), 3);
    for expected in ["b", "~b", "__a"] {
        assert!(classes.iter().any(|c| var_equivalent(c, &f(expected), &keep)), "{expected}");
    }
}

#[test]
fn turner_almost_translation() {
    let th = t(TURNER_THEORY);
    let (art, flag) = almost_translate(&th, Semantics::REITER, Reasoning::Skeptical).unwrap();
    assert_eq!(art.theory.len(), 20);
    assert_eq!((art.m(), art.u()), (3, 6));
    assert!(art.theory.is_normal());
    assert_eq!(flag, flag_atom());
    let counts = |fam: Family| art.families.iter().filter(|x| x.family == fam).count();
    assert_eq!(
        [Family::A, Family::N, Family::V, Family::G, Family::Z].map(counts),
        [3, 3, 6, 6, 2]
    );
    for r in check_almost(&th, Semantics::REITER, &literal_queries(&th)).unwrap() {
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn translations_refuse_reserved_source_atoms() {
    let th = t("#generated\nd1: : __x / __x.");
    assert!(matches!(
        build_simulation(&th, Semantics::REITER, &Formula::True),
        Err(TranslateError::ReservedInSource(_))
    ));
    assert!(matches!(
        enumerate_translate(&th, Semantics::REITER),
        Err(TranslateError::ReservedInSource(_))
    ));
}

#[test]
fn constrained_faithful_translation() {
    let th = t("W: a. d1: a : b / c. d2: c : a / ~b.");
    let art = faithful_translate(&th, Semantics::CONSTRAINED).unwrap();
    assert_eq!(art.u(), 5);
    assert_eq!(art.theory.len(), 2 * 2 + 2 * 5 + 2);
    let keep = th.atoms();
    let exts = extensions(&art.theory, Semantics::REITER).unwrap();
    assert!(!exts.is_empty());
    for e in exts {
        assert!(var_equivalent(&e.axiom, &f("a & c"), &keep));
    }
}

#[test]
fn enumeration_preserves_extensions_on_a_corpus() {
    let p = CorpusParams::new(60, 11).max_defaults(3).max_atoms(3);
    for s in [Semantics::REITER, Semantics::CONSTRAINED, Semantics::JUSTIFIED] {
        for (i, th) in corpus_with_extensions(&p, s).unwrap() {
            let source: Vec<Formula> =
                extensions(&th, s).unwrap().into_iter().map(|e| e.axiom).collect();
            let out = enumerate_translate(&th, s).unwrap();
            assert!(out.is_normal());
            let keep = th.atoms();
            let got = extensions(&out, Semantics::REITER).unwrap();
            assert_eq!(got.len(), source.len(), "theory {i} under {s}");
            for g in &got {
                assert!(source.iter().any(|x| var_equivalent(&g.axiom, x, &keep)), "theory {i}");
            }
        }
    }
}

#[test]
fn serialized_simulations_parse_back() {
    let p = CorpusParams::new(30, 4).max_defaults(2).max_atoms(2);
    for i in 0..p.count {
        let th = random_theory(&p, i);
        let art = build_simulation(&th, Semantics::REITER, &f("__a")).unwrap();
        let back = DefaultTheory::parse(&art.serialize()).unwrap();
        assert_eq!(back, art.theory);
        let n = Engine::new(&back, Semantics::REITER).unwrap().extensions().unwrap().len();
        assert!(n >= 1, "a normal theory always has an extension");
        assert!(equivalent(back.background(), art.theory.background()));
    }
}
