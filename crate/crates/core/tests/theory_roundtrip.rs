use dlw_core::theory::{parse_theory, serialize_theory};
use dlw_core::verify::{random_theory, CorpusParams};
use dlw_core::{DefaultTheory, TheoryError};

#[test]
fn corpus_theories_round_trip() {
    let p = CorpusParams::new(500, 99).max_defaults(4).max_atoms(4).formula_depth(3);
    for i in 0..p.count {
        let t = random_theory(&p, i);
        let text = serialize_theory(&t);
        let back = parse_theory(&text).unwrap_or_else(|e| panic!("theory {i}: {e}\n{text}"));
        assert_eq!(back, t, "theory {i}");
        assert!(t.len() <= 4);
        assert!(t.atoms().len() <= 4);
    }
}

#[test]
fn corpus_respects_zero_bounds() {
    let p = CorpusParams::new(50, 3).max_defaults(0).max_atoms(0);
    for i in 0..p.count {
        let t = random_theory(&p, i);
        assert!(t.is_empty());
        assert!(t.atoms().is_empty());
    }
}

#[test]
fn inconsistent_background_is_rejected() {
    assert_eq!(DefaultTheory::parse("W: a & ~a."), Err(TheoryError::InconsistentBackground));
}

#[test]
fn reserved_atoms_need_the_generated_header() {
    assert!(matches!(DefaultTheory::parse("d1: : __x / __x."), Err(TheoryError::ReservedAtom(_))));
    assert!(DefaultTheory::parse("#generated\nd1: : __x / __x.").is_ok());
}
