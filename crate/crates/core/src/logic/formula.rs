use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::LogicError;

/// Prefix reserved for atoms introduced by the workbench itself.
pub const RESERVED_PREFIX: &str = "__";

/// A propositional variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    /// Builds an atom, checking the identifier syntax `[A-Za-z_][A-Za-z0-9_]*`.
    pub fn new(name: &str) -> Result<Atom, LogicError> {
        if is_identifier(name) && name != "true" && name != "false" {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(LogicError::InvalidAtom(name.to_string()))
        }
    }

    /// Builds a reserved atom `__<suffix>`.
    pub(crate) fn reserved(suffix: &str) -> Atom {
        let name = format!("{RESERVED_PREFIX}{suffix}");
        debug_assert!(is_identifier(&name));
        Atom(Arc::from(name.as_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True for atoms carrying the reserved `__` prefix.
    pub fn is_generated(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Truth assignment over atoms.
pub type Assignment = BTreeMap<Atom, bool>;

/// Propositional formula.
///
/// `And`/`Or` are n-ary. The smart constructors [`Formula::and`] and
/// [`Formula::or`] fold constants and never build empty or singleton
/// connectives; the parser builds the variants directly so that the syntax
/// tree mirrors the source text.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

impl From<&Atom> for Formula {
    fn from(a: &Atom) -> Self {
        Formula::Atom(a.clone())
    }
}

impl Formula {
    pub fn atom(a: &Atom) -> Formula {
        Formula::Atom(a.clone())
    }

    pub fn negate(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Conjunction with constant folding: `true` operands are dropped, a
    /// `false` operand absorbs, zero operands give `true`, one gives itself.
    pub fn and<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut kept = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => Formula::True,
            1 => kept.pop().unwrap(),
            _ => Formula::And(kept),
        }
    }

    /// Disjunction with constant folding, dual to [`Formula::and`].
    pub fn or<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut kept = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => Formula::False,
            1 => kept.pop().unwrap(),
            _ => Formula::Or(kept),
        }
    }

    /// Set of atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn mentions(&self, atom: &Atom) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(a) => a == atom,
            Formula::Not(f) => f.mentions(atom),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.mentions(atom)),
            Formula::Implies(l, r) | Formula::Iff(l, r) => l.mentions(atom) || r.mentions(atom),
        }
    }

    /// Applies a substitution of atoms by atoms. Atoms outside the
    /// renaming's domain are left alone.
    pub fn rename(&self, r: &Renaming) -> Formula {
        self.map_atoms(&|a| Formula::Atom(r.apply(a)))
    }

    fn map_atoms(&self, g: &dyn Fn(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => g(a),
            Formula::Not(f) => Formula::Not(Box::new(f.map_atoms(g))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.map_atoms(g)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.map_atoms(g)).collect()),
            Formula::Implies(l, r) => {
                Formula::Implies(Box::new(l.map_atoms(g)), Box::new(r.map_atoms(g)))
            }
            Formula::Iff(l, r) => Formula::Iff(Box::new(l.map_atoms(g)), Box::new(r.map_atoms(g))),
        }
    }

    /// Truth-functional evaluation. Every atom of the formula must be
    /// assigned, even ones that a short-circuit would skip.
    pub fn evaluate(&self, m: &Assignment) -> Result<bool, LogicError> {
        if let Some(missing) = self.atoms().into_iter().find(|a| !m.contains_key(a)) {
            return Err(LogicError::UnassignedAtom(missing));
        }
        Ok(self.eval_total(&|a| m[a]))
    }

    pub(crate) fn eval_total(&self, m: &dyn Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => m(a),
            Formula::Not(f) => !f.eval_total(m),
            Formula::And(fs) => fs.iter().all(|f| f.eval_total(m)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval_total(m)),
            Formula::Implies(l, r) => !l.eval_total(m) || r.eval_total(m),
            Formula::Iff(l, r) => l.eval_total(m) == r.eval_total(m),
        }
    }

    /// Constant folding. The result is equivalent and either a constant or
    /// free of constants.
    pub fn simplify(&self) -> Formula {
        self.fold(&|_| None)
    }

    /// Replaces `atom` by a truth value and folds constants.
    pub fn substitute(&self, atom: &Atom, value: bool) -> Formula {
        self.fold(&|a| (a == atom).then_some(value))
    }

    fn fold(&self, fixed: &dyn Fn(&Atom) -> Option<bool>) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => match fixed(a) {
                Some(true) => Formula::True,
                Some(false) => Formula::False,
                None => Formula::Atom(a.clone()),
            },
            Formula::Not(f) => match f.fold(fixed) {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                Formula::Not(inner) => *inner,
                g => g.negate(),
            },
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.fold(fixed))),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.fold(fixed))),
            Formula::Implies(l, r) => match (l.fold(fixed), r.fold(fixed)) {
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (Formula::True, r) => r,
                (l, Formula::False) => Formula::Not(Box::new(l)).fold(&|_| None),
                (l, r) => Formula::implies(l, r),
            },
            Formula::Iff(l, r) => match (l.fold(fixed), r.fold(fixed)) {
                (Formula::True, g) | (g, Formula::True) => g,
                (Formula::False, g) | (g, Formula::False) => g.negate().fold(&|_| None),
                (l, r) => Formula::iff(l, r),
            },
        }
    }

    /// Top-level conjuncts, flattening nested conjunctions.
    pub fn conjuncts(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.push_conjuncts(&mut out);
        out
    }

    fn push_conjuncts(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::And(fs) => fs.iter().for_each(|f| f.push_conjuncts(out)),
            Formula::True => {}
            f => out.push(f.clone()),
        }
    }

    /// Existentially abstracts `vars`: the strongest consequence of the
    /// formula that mentions none of them.
    ///
    /// Each variable is eliminated by Shannon expansion,
    /// `f[v/true] | f[v/false]`, with constant folding after every step.
    /// Only the conjuncts that mention `v` take part in the expansion; the
    /// others are carried over unchanged.
    pub fn forget(&self, vars: &BTreeSet<Atom>) -> Formula {
        let mut conjuncts = self.simplify().conjuncts();
        if conjuncts.contains(&Formula::False) {
            return Formula::False;
        }
        for v in vars {
            let (with, without): (Vec<_>, Vec<_>) =
                conjuncts.into_iter().partition(|c| c.mentions(v));
            conjuncts = without;
            if with.is_empty() {
                continue;
            }
            let group = Formula::and(with);
            let expanded = Formula::or([group.substitute(v, true), group.substitute(v, false)]);
            match expanded {
                Formula::False => return Formula::False,
                e => conjuncts.extend(e.conjuncts()),
            }
        }
        Formula::and(conjuncts)
    }
}

/// Injective atom-to-atom substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Renaming {
    map: BTreeMap<Atom, Atom>,
}

impl Renaming {
    pub fn new() -> Renaming {
        Renaming::default()
    }

    /// Builds a renaming from pairs, rejecting non-injective maps and
    /// conflicting entries for one source atom.
    pub fn from_pairs<I: IntoIterator<Item = (Atom, Atom)>>(
        pairs: I,
    ) -> Result<Renaming, LogicError> {
        let mut r = Renaming::new();
        for (from, to) in pairs {
            r.insert(from, to)?;
        }
        Ok(r)
    }

    pub fn insert(&mut self, from: Atom, to: Atom) -> Result<(), LogicError> {
        if let Some(existing) = self.map.get(&from) {
            if *existing == to {
                return Ok(());
            }
            return Err(LogicError::NonInjectiveRenaming(from, to));
        }
        if let Some((clash, _)) = self.map.iter().find(|(_, v)| **v == to) {
            return Err(LogicError::NonInjectiveRenaming(clash.clone(), to));
        }
        self.map.insert(from, to);
        Ok(())
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        self.map.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn inverse(&self) -> Renaming {
        Renaming {
            map: self.map.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.map.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn at(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    #[test]
    fn atom_syntax() {
        assert!(Atom::new("a_1").is_ok());
        assert!(Atom::new("_x").is_ok());
        assert!(Atom::new("1a").is_err());
        assert!(Atom::new("").is_err());
        assert!(Atom::new("true").is_err());
        assert!(Atom::new("__c1").unwrap().is_generated());
    }

    #[test]
    fn rename_examples() {
        let r = Renaming::from_pairs([(at("a"), at("a0"))]).unwrap();
        assert_eq!(f("a & b").rename(&r), f("a0 & b"));
        assert_eq!(f("a & b").rename(&Renaming::new()), f("a & b"));
        let r = Renaming::from_pairs([(at("a"), at("x"))]).unwrap();
        assert_eq!(f("a | ~a").rename(&r), f("x | ~x"));
    }

    #[test]
    fn renaming_rejects_collisions() {
        assert!(Renaming::from_pairs([(at("a"), at("x")), (at("b"), at("x"))]).is_err());
        assert!(Renaming::from_pairs([(at("a"), at("x")), (at("a"), at("y"))]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let m: Assignment = [(at("a"), true), (at("b"), false)].into_iter().collect();
        assert!(!f("a -> b").evaluate(&m).unwrap());
        assert!(f("true").evaluate(&Assignment::new()).unwrap());
        let m: Assignment = [(at("c1"), false), (at("o1"), true), (at("o3"), true)]
            .into_iter()
            .collect();
        assert!(f("(c1 -> o1) & (~c1 -> (o3 | ~o1))").evaluate(&m).unwrap());
    }

    #[test]
    fn evaluate_reports_missing_atom() {
        let m: Assignment = [(at("a"), false)].into_iter().collect();
        assert_eq!(
            f("a & b").evaluate(&m),
            Err(LogicError::UnassignedAtom(at("b")))
        );
    }

    #[test]
    fn folding() {
        assert_eq!(f("a & true").simplify(), f("a"));
        assert_eq!(f("a | true").simplify(), Formula::True);
        assert_eq!(f("false -> a").simplify(), Formula::True);
        assert_eq!(f("a -> false").simplify(), f("~a"));
        assert_eq!(f("a <-> false").simplify(), f("~a"));
        assert_eq!(f("~~a").simplify(), f("a"));
        assert_eq!(f("a & b").substitute(&at("a"), false), Formula::False);
    }

    #[test]
    fn forget_examples() {
        let b: BTreeSet<Atom> = [at("b")].into();
        assert_eq!(f("a & b").forget(&b), f("a"));
        assert_eq!(f("a | b").forget(&b), Formula::True);
        assert_eq!(f("a").forget(&BTreeSet::new()), f("a"));
        // b := true leaves c, b := false leaves ~a
        assert_eq!(f("(a -> b) & (b -> c)").forget(&b), f("c | ~a"));
    }
}
