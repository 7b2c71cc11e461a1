use dlw_core::process::{construct_extension_failsafe, Closure, Engine, Successfulness};
use dlw_core::sat::{entails, equivalent};
use dlw_core::verify::{random_theory, reiter_fixpoint_extensions, CorpusParams};
use dlw_core::{DefaultTheory, EngineError, Formula, Process, Semantics};
use proptest::prelude::*;

fn corpus_theory() -> impl Strategy<Value = DefaultTheory> {
    (any::<u64>(), 0usize..64).prop_map(|(seed, i)| random_theory(&CorpusParams::new(64, seed), i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reiter_agrees_with_the_fixpoint_oracle(t in corpus_theory()) {
        let engine: Vec<Formula> = Engine::new(&t, Semantics::REITER).unwrap()
            .extensions().unwrap().into_iter().map(|e| e.axiom).collect();
        let oracle = reiter_fixpoint_extensions(&t).unwrap();
        prop_assert_eq!(engine.len(), oracle.len());
        for e in &engine {
            prop_assert!(oracle.iter().any(|o| equivalent(e, o)));
        }
    }

    #[test]
    fn extensions_are_pairwise_distinct_and_witnessed(t in corpus_theory()) {
        for s in Semantics::PRESETS.into_iter().filter(|s| !s.requires_normal()) {
            let e = Engine::new(&t, s).unwrap();
            let exts = e.extensions().unwrap();
            for (i, x) in exts.iter().enumerate() {
                prop_assert!(!x.witnesses.is_empty());
                for w in &x.witnesses {
                    prop_assert!(e.is_successful_and_closed(w).unwrap());
                    prop_assert!(equivalent(&e.axiom(w), &x.axiom));
                }
                for y in &exts[i + 1..] {
                    prop_assert!(!equivalent(&x.axiom, &y.axiom));
                }
            }
        }
    }

    #[test]
    fn fail_safe_semantics_construct_extensions(t in corpus_theory()) {
        for (th, s) in [(t.clone(), Semantics::CONSTRAINED), (t.normalized(), Semantics::NORMAL)] {
            let e = Engine::new(&th, s).unwrap();
            prop_assert!(e.is_fail_safe_on().unwrap());
            let p = e.construct_extension_failsafe().unwrap();
            prop_assert!(p.len() <= th.len());
            prop_assert!(e.is_successful_and_closed(&p).unwrap());
            prop_assert_eq!(Some(p), e.first_process().unwrap());
        }
    }

    #[test]
    fn completable_prefixes_are_prefixes_of_extensions(t in corpus_theory()) {
        let e = Engine::new(&t, Semantics::REITER).unwrap();
        let closed = e.enumerate_processes().unwrap();
        for p in e.successful_processes().unwrap() {
            let expected = closed.iter().any(|c| c.steps().starts_with(p.steps()));
            prop_assert_eq!(e.completable(&p).unwrap(), expected);
        }
    }

    #[test]
    fn skeptical_and_credulous_bracket_each_extension(t in corpus_theory()) {
        let e = Engine::new(&t, Semantics::REITER).unwrap();
        let exts = e.extensions().unwrap();
        for a in t.atoms() {
            let q = Formula::atom(&a);
            let skeptical = e.skeptical_entails(&q).unwrap();
            let credulous = e.credulous_entails(&q).unwrap();
            prop_assert_eq!(skeptical, exts.iter().all(|x| entails([&x.axiom], &q)));
            prop_assert_eq!(credulous, exts.iter().any(|x| entails([&x.axiom], &q)));
            if !exts.is_empty() && skeptical {
                prop_assert!(credulous);
            }
        }
    }
}

#[test]
fn justified_and_reiter_agree_on_normal_theories() {
    let p = CorpusParams::new(100, 5);
    for i in 0..p.count {
        let t = random_theory(&p, i).normalized();
        let r = Engine::new(&t, Semantics::REITER).unwrap().enumerate_processes().unwrap();
        let j = Engine::new(&t, Semantics::JUSTIFIED).unwrap().enumerate_processes().unwrap();
        assert_eq!(r, j, "theory {i}");
    }
}

#[test]
fn custom_semantics_match_presets() {
    let t = DefaultTheory::parse("W: a. d1: a : b / c. d2: c : a / ~b.").unwrap();
    let custom = Semantics::custom(Successfulness::Global, Closure::Maximality);
    let a = Engine::new(&t, custom).unwrap().enumerate_processes().unwrap();
    let b = Engine::new(&t, Semantics::CONSTRAINED).unwrap().enumerate_processes().unwrap();
    assert_eq!(a, b);
}

#[test]
fn resource_cap_is_reported() {
    let text: String = (0..8).map(|i| format!("d{i}: : a{i} / a{i}.\n")).collect();
    let t = DefaultTheory::parse(&text).unwrap();
    let e = Engine::new(&t, Semantics::REITER).unwrap().with_max_prefixes(100);
    assert_eq!(e.enumerate_processes(), Err(EngineError::ResourceLimit(100)));
}

#[test]
fn normal_semantics_rejects_non_normal_theories() {
    let t = DefaultTheory::parse("d1: : a / b.").unwrap();
    assert!(matches!(
        construct_extension_failsafe(&t, Semantics::NORMAL),
        Err(EngineError::RequiresNormal { .. })
    ));
}

#[test]
fn process_names_round_trip() {
    let t = DefaultTheory::parse("d1: : h / h. d2: : ~h / ~h.").unwrap();
    let p = Process::from_names(&t, &["d2", "d1"]).unwrap();
    assert_eq!(p, Process::new(vec![1, 0]));
    assert_eq!(p.names(&t), vec!["d2", "d1"]);
    assert!(Process::from_names(&t, &["d3"]).is_err());
}
