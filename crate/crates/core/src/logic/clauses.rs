use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::formula::{Atom, Formula};

/// Literal over a numbered variable: `var << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Lit {
        Lit(((var as u32) << 1) | u32::from(!positive))
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// Clause form over numbered variables. Variables `0..atoms.len()` stand for
/// `atoms` in lexicographic order; the rest are definitional.
#[derive(Debug, Clone)]
pub(crate) struct Cnf {
    pub atoms: Vec<Atom>,
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    /// Equisatisfiable encoding of the conjunction of `formulas`.
    pub fn encode<'a, I>(formulas: I) -> Cnf
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let formulas: Vec<Formula> = formulas.into_iter().map(Formula::simplify).collect();
        let mut atoms = BTreeSet::new();
        formulas.iter().for_each(|f| f.collect_atoms(&mut atoms));
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut enc = Encoder { index, num_vars: atoms.len(), clauses: Vec::new() };
        for f in &formulas {
            enc.assert(f);
        }
        Cnf { num_vars: enc.num_vars, clauses: enc.clauses, atoms }
    }
}

struct Encoder {
    index: BTreeMap<Atom, usize>,
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Encoder {
    fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::new(self.num_vars - 1, true)
    }

    fn assert(&mut self, f: &Formula) {
        match f {
            Formula::True => {}
            Formula::False => self.clauses.push(Vec::new()),
            Formula::And(fs) => fs.iter().for_each(|g| self.assert(g)),
            Formula::Or(fs) => {
                let clause = fs.iter().map(|g| self.lit(g)).collect();
                self.clauses.push(clause);
            }
            Formula::Implies(l, r) => {
                let clause = vec![!self.lit(l), self.lit(r)];
                self.clauses.push(clause);
            }
            Formula::Not(g) => match g.as_ref() {
                Formula::And(fs) => {
                    let clause = fs.iter().map(|h| !self.lit(h)).collect();
                    self.clauses.push(clause);
                }
                Formula::Or(fs) => fs.iter().for_each(|h| self.assert(&h.clone().negate())),
                _ => {
                    let l = self.lit(f);
                    self.clauses.push(vec![l]);
                }
            },
            _ => {
                let l = self.lit(f);
                self.clauses.push(vec![l]);
            }
        }
    }

    // Literal equivalent to `f`, introducing a definitional variable for
    // compound subformulas. `f` must be constant-free.
    fn lit(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Atom(a) => Lit::new(self.index[a], true),
            Formula::Not(g) => !self.lit(g),
            Formula::And(fs) => {
                let parts: Vec<Lit> = fs.iter().map(|g| self.lit(g)).collect();
                let x = self.fresh();
                for &p in &parts {
                    self.clauses.push(vec![!x, p]);
                }
                let mut big: Vec<Lit> = parts.iter().map(|&p| !p).collect();
                big.push(x);
                self.clauses.push(big);
                x
            }
            Formula::Or(fs) => {
                let parts: Vec<Lit> = fs.iter().map(|g| self.lit(g)).collect();
                let x = self.fresh();
                for &p in &parts {
                    self.clauses.push(vec![x, !p]);
                }
                let mut big = parts;
                big.push(!x);
                self.clauses.push(big);
                x
            }
            Formula::Implies(l, r) => {
                let (l, r) = (self.lit(l), self.lit(r));
                let x = self.fresh();
                self.clauses.push(vec![!x, !l, r]);
                self.clauses.push(vec![x, l]);
                self.clauses.push(vec![x, !r]);
                x
            }
            Formula::Iff(l, r) => {
                let (l, r) = (self.lit(l), self.lit(r));
                let x = self.fresh();
                self.clauses.push(vec![!x, !l, r]);
                self.clauses.push(vec![!x, l, !r]);
                self.clauses.push(vec![x, l, r]);
                self.clauses.push(vec![x, !l, !r]);
                x
            }
            Formula::True | Formula::False => unreachable!("constants are folded before encoding"),
        }
    }
}

/// A literal over a named atom.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "~{}", self.atom)
        }
    }
}

pub type Clause = Vec<Literal>;

impl Formula {
    /// Equisatisfiable clause set. Definitional atoms are named `__k<n>`,
    /// skipping names already used by the formula; every model of the
    /// formula extends to exactly one model of the clauses.
    pub fn to_clauses(&self) -> Vec<Clause> {
        let cnf = Cnf::encode([self]);
        let taken = self.atoms();
        let mut names = cnf.atoms.clone();
        let mut n = 0usize;
        while names.len() < cnf.num_vars {
            n += 1;
            let candidate = Atom::reserved(&format!("k{n}"));
            if !taken.contains(&candidate) {
                names.push(candidate);
            }
        }
        cnf.clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| Literal { atom: names[l.var()].clone(), positive: l.is_positive() })
                    .collect()
            })
            .collect()
    }
}
