use std::collections::BTreeSet;

use dlw_core::logic::Assignment;
use dlw_core::sat::{entails, equivalent, is_consistent, var_equivalent};
use dlw_core::{Atom, Formula, Renaming};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["p", "q", "r", "s"];

fn atom(i: usize) -> Atom {
    Atom::new(NAMES[i]).unwrap()
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        8 => (0..NAMES.len()).prop_map(|i| Formula::atom(&atom(i))),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::negate),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

fn all_assignments(atoms: &[Atom]) -> Vec<Assignment> {
    (0..1u32 << atoms.len())
        .map(|bits| {
            atoms.iter().enumerate().map(|(i, a)| (a.clone(), bits & (1 << i) != 0)).collect()
        })
        .collect()
}

fn universe() -> Vec<Atom> {
    (0..NAMES.len()).map(atom).collect()
}

fn truth_table_sat(fs: &[Formula]) -> bool {
    all_assignments(&universe()).iter().any(|m| fs.iter().all(|f| f.evaluate(m).unwrap()))
}

fn models(f: &Formula) -> Vec<Assignment> {
    all_assignments(&universe()).into_iter().filter(|m| f.evaluate(m).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn consistency_matches_truth_tables(a in formula(), b in formula()) {
        prop_assert_eq!(is_consistent([&a, &b]), truth_table_sat(&[a.clone(), b.clone()]));
    }

    #[test]
    fn entailment_matches_truth_tables(a in formula(), b in formula()) {
        let expected = models(&a).iter().all(|m| b.evaluate(m).unwrap());
        prop_assert_eq!(entails([&a], &b), expected);
    }

    #[test]
    fn clause_form_is_equisatisfiable(f in formula()) {
        let clauses = f.to_clauses();
        let as_formula = Formula::and(clauses.iter().map(|c| {
            Formula::or(c.iter().map(|l| {
                let a = Formula::atom(&l.atom);
                if l.positive { a } else { a.negate() }
            }))
        }));
        prop_assert_eq!(is_consistent([&as_formula]), truth_table_sat(std::slice::from_ref(&f)));
        // every model of the clause form restricts to a model of f
        prop_assert!(entails([&as_formula], &f));
    }

    #[test]
    fn forgetting_is_projection(f in formula(), drop in prop::collection::btree_set(0..NAMES.len(), 0..=NAMES.len())) {
        let drop: BTreeSet<Atom> = drop.into_iter().map(atom).collect();
        let g = f.forget(&drop);
        prop_assert!(g.atoms().is_disjoint(&drop));
        // g's models are exactly the assignments that agree with some model
        // of f outside `drop`
        let fm = models(&f);
        for m in all_assignments(&universe()) {
            let projected = fm.iter().any(|n| {
                m.iter().all(|(a, v)| drop.contains(a) || n[a] == *v)
            });
            prop_assert_eq!(g.evaluate(&m).unwrap(), projected);
        }
    }

    #[test]
    fn var_equivalence_is_reflexive_and_symmetric(a in formula(), b in formula()) {
        let keep: BTreeSet<Atom> = [atom(0), atom(1)].into();
        prop_assert!(var_equivalent(&a, &a, &keep));
        prop_assert_eq!(var_equivalent(&a, &b, &keep), var_equivalent(&b, &a, &keep));
    }

    #[test]
    fn printing_round_trips(f in formula()) {
        let printed = f.to_string();
        let back: Formula = printed.parse().unwrap();
        prop_assert_eq!(back.to_string(), printed);
        prop_assert!(equivalent(&back, &f));
    }

    #[test]
    fn renaming_and_inverse(f in formula(), shift in 1..NAMES.len()) {
        let r = Renaming::from_pairs(
            (0..NAMES.len()).map(|i| (atom(i), Atom::new(&format!("{}_copy", NAMES[(i + shift) % NAMES.len()])).unwrap())),
        ).unwrap();
        prop_assert_eq!(f.rename(&r).rename(&r.inverse()), f.clone());
        prop_assert_eq!(f.rename(&r).atoms().len(), f.atoms().len());
    }

    #[test]
    fn simplify_preserves_meaning(f in formula()) {
        let g = f.simplify();
        for m in all_assignments(&universe()) {
            prop_assert_eq!(g.evaluate(&m).unwrap(), f.evaluate(&m).unwrap());
        }
    }
}

#[test]
fn non_injective_renaming_is_rejected() {
    let x = Atom::new("x").unwrap();
    let r = Renaming::from_pairs([(atom(0), x.clone()), (atom(1), x)]);
    assert!(r.is_err());
}
