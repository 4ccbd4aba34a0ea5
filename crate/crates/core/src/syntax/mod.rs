//! Formula syntax: the abstract syntax tree, the concrete grammar, syntactic
//! measures and the one-hole necessity/possibility contexts.

mod forms;
mod parse;
mod render;

use std::collections::BTreeSet;
use std::fmt;

pub use forms::{nf_dual, nf_instantiate, pf_instantiate, NecessityForm, PossibilityForm};
pub use parse::{parse_formula, ParseError};
pub use render::render;

/// A formula built from the six primitive constructors plus the truth
/// constant. Derived connectives only exist as constructor helpers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Knows(String, Box<Formula>),
    /// `[announcement] body`
    Announce(Box<Formula>, Box<Formula>),
    /// The arbitrary boolean announcement box.
    Arb(Box<Formula>),
}

/// Syntactic fragments, ordered from narrowest to widest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    Boolean,
    Epistemic,
    Aanf,
    General,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Boolean => "boolean",
            Fragment::Epistemic => "epistemic",
            Fragment::Aanf => "aanf",
            Fragment::General => "general",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measures {
    /// Nesting depth of knowledge modalities.
    pub modal_depth: usize,
    /// Nesting depth of the arbitrary announcement box.
    pub quantifier_depth: usize,
    pub vars: BTreeSet<String>,
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn bottom() -> Formula {
        Formula::Top.not()
    }

    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    /// `a | b` is `~(~a & ~b)`.
    pub fn or(self, rhs: Formula) -> Formula {
        self.not().and(rhs.not()).not()
    }

    /// `a -> b` is `~(a & ~b)`.
    pub fn implies(self, rhs: Formula) -> Formula {
        self.and(rhs.not()).not()
    }

    /// `a <-> b` is `(a -> b) & (b -> a)`.
    pub fn iff(self, rhs: Formula) -> Formula {
        self.clone().implies(rhs.clone()).and(rhs.implies(self))
    }

    pub fn knows(agent: impl Into<String>, body: Formula) -> Formula {
        Formula::Knows(agent.into(), Box::new(body))
    }

    /// `Khat a φ` is `~K a ~φ`.
    pub fn considers(agent: impl Into<String>, body: Formula) -> Formula {
        Formula::knows(agent, body.not()).not()
    }

    pub fn announce(announcement: Formula, body: Formula) -> Formula {
        Formula::Announce(Box::new(announcement), Box::new(body))
    }

    /// `<α> φ` is `~[α]~φ`.
    pub fn announce_dual(announcement: Formula, body: Formula) -> Formula {
        Formula::announce(announcement, body.not()).not()
    }

    pub fn arb(body: Formula) -> Formula {
        Formula::Arb(Box::new(body))
    }

    /// `E φ` is `~A ~φ`.
    pub fn arb_dual(body: Formula) -> Formula {
        Formula::arb(body.not()).not()
    }

    /// Conjunction of the given formulas, `T` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(|acc, f| acc.and(f))
            .unwrap_or(Formula::Top)
    }

    /// Disjunction of the given formulas, `F` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(|acc, f| acc.or(f))
            .unwrap_or_else(Formula::bottom)
    }

    /// Matches the `~(a & ~b)` encoding of an implication.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::And(lhs, rhs) => match rhs.as_ref() {
                    Formula::Not(consequent) => Some((lhs, consequent)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// Number of symbols: every constructor and leaf counts once.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Knows(_, f) | Formula::Arb(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Announce(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Arb(f) => f.modal_depth(),
            Formula::Knows(_, f) => f.modal_depth() + 1,
            Formula::And(l, r) | Formula::Announce(l, r) => l.modal_depth().max(r.modal_depth()),
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Knows(_, f) => f.quantifier_depth(),
            Formula::Arb(f) => f.quantifier_depth() + 1,
            Formula::And(l, r) | Formula::Announce(l, r) => {
                l.quantifier_depth().max(r.quantifier_depth())
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top => {}
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(f) | Formula::Knows(_, f) | Formula::Arb(f) => f.collect_vars(out),
            Formula::And(l, r) | Formula::Announce(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn agents(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top | Formula::Atom(_) => {}
            Formula::Knows(a, f) => {
                out.insert(a.clone());
                f.collect_agents(out);
            }
            Formula::Not(f) | Formula::Arb(f) => f.collect_agents(out),
            Formula::And(l, r) | Formula::Announce(l, r) => {
                l.collect_agents(out);
                r.collect_agents(out);
            }
        }
    }

    pub fn measures(&self) -> Measures {
        Measures {
            modal_depth: self.modal_depth(),
            quantifier_depth: self.quantifier_depth(),
            vars: self.vars(),
        }
    }

    pub fn is_boolean(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_boolean(),
            Formula::And(l, r) => l.is_boolean() && r.is_boolean(),
            _ => false,
        }
    }

    pub fn is_epistemic(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => true,
            Formula::Not(f) | Formula::Knows(_, f) => f.is_epistemic(),
            Formula::And(l, r) => l.is_epistemic() && r.is_epistemic(),
            Formula::Announce(..) | Formula::Arb(_) => false,
        }
    }

    /// Every announcement has a box body and every box sits directly under an
    /// announcement.
    pub fn is_aanf(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => true,
            Formula::Not(f) | Formula::Knows(_, f) => f.is_aanf(),
            Formula::And(l, r) => l.is_aanf() && r.is_aanf(),
            Formula::Announce(ann, body) => match body.as_ref() {
                Formula::Arb(inner) => ann.is_aanf() && inner.is_aanf(),
                _ => false,
            },
            Formula::Arb(_) => false,
        }
    }

    pub fn fragment(&self) -> Fragment {
        if self.is_boolean() {
            Fragment::Boolean
        } else if self.is_epistemic() {
            Fragment::Epistemic
        } else if self.is_aanf() {
            Fragment::Aanf
        } else {
            Fragment::General
        }
    }

    /// Replaces every occurrence of atom `from` by atom `to`.
    pub fn substitute_atom(&self, from: &str, to: &str) -> Formula {
        self.map_atoms(&|p| {
            if p == from {
                Formula::atom(to)
            } else {
                Formula::atom(p)
            }
        })
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, f: &dyn Fn(&str) -> Formula) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Atom(p) => f(p),
            Formula::Not(g) => g.map_atoms(f).not(),
            Formula::And(l, r) => l.map_atoms(f).and(r.map_atoms(f)),
            Formula::Knows(a, g) => Formula::knows(a.clone(), g.map_atoms(f)),
            Formula::Announce(l, r) => Formula::announce(l.map_atoms(f), r.map_atoms(f)),
            Formula::Arb(g) => Formula::arb(g.map_atoms(f)),
        }
    }

    /// Single negation with double negations identified: `neg(~ψ) = ψ`.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Not(inner) => inner.as_ref().clone(),
            other => other.clone().not(),
        }
    }
}

pub fn fragment_of(formula: &Formula) -> Fragment {
    formula.fragment()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn measures_of_closure_example() {
        let m = f("p -> K a K b [q] A r").measures();
        assert_eq!(m.modal_depth, 2);
        assert_eq!(m.quantifier_depth, 1);
        let vars: Vec<_> = m.vars.into_iter().collect();
        assert_eq!(vars, ["p", "q", "r"]);
    }

    #[test]
    fn measures_of_leaves_and_boxes() {
        let m = f("p").measures();
        assert_eq!((m.modal_depth, m.quantifier_depth), (0, 0));
        let m = f("A A p").measures();
        assert_eq!((m.modal_depth, m.quantifier_depth), (0, 2));
        assert!(f("T").vars().is_empty());
    }

    #[test]
    fn fragments() {
        assert_eq!(f("p & ~q").fragment(), Fragment::Boolean);
        assert_eq!(f("K a p").fragment(), Fragment::Epistemic);
        assert_eq!(f("[p] A q").fragment(), Fragment::Aanf);
        assert_eq!(f("A p").fragment(), Fragment::General);
        assert_eq!(f("[p] q").fragment(), Fragment::General);
        assert_eq!(f("[[p] A q] A K a q").fragment(), Fragment::Aanf);
    }

    #[test]
    fn substitution() {
        assert_eq!(f("p & K a p").substitute_atom("p", "q"), f("q & K a q"));
        let g = f("K b (r -> [s] A r)");
        assert_eq!(g.substitute_atom("p", "q"), g);
    }

    #[test]
    fn negated_identifies_double_negation() {
        assert_eq!(f("~p").negated(), f("p"));
        assert_eq!(f("p").negated(), f("~p"));
    }
}
