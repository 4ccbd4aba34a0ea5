use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::syntax::{parse_formula, Formula};

/// The axiom schemas. Atoms in a schema are metavariables; `p` only matches
/// atoms, `psi0` only booleans, and the agent `a` matches any agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    P,
    K,
    T,
    Four,
    Five,
    AP,
    AN,
    AC,
    AK,
    AA,
    ABox,
}

impl Axiom {
    pub const ALL: [Axiom; 11] = [
        Axiom::P,
        Axiom::K,
        Axiom::T,
        Axiom::Four,
        Axiom::Five,
        Axiom::AP,
        Axiom::AN,
        Axiom::AC,
        Axiom::AK,
        Axiom::AA,
        Axiom::ABox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::P => "P",
            Axiom::K => "K",
            Axiom::T => "T",
            Axiom::Four => "4",
            Axiom::Five => "5",
            Axiom::AP => "AP",
            Axiom::AN => "AN",
            Axiom::AC => "AC",
            Axiom::AK => "AK",
            Axiom::AA => "AA",
            Axiom::ABox => "ABox",
        }
    }

    /// The schema as a formula over metavariables; `None` for `P`.
    pub fn schema(self) -> Option<Formula> {
        let text = match self {
            Axiom::P => return None,
            Axiom::K => "K a (phi -> psi) -> (K a phi -> K a psi)",
            Axiom::T => "K a phi -> phi",
            Axiom::Four => "K a phi -> K a K a phi",
            Axiom::Five => "~K a phi -> K a ~K a phi",
            Axiom::AP => "[phi] p <-> (phi -> p)",
            Axiom::AN => "[phi] ~psi <-> (phi -> ~[phi] psi)",
            Axiom::AC => "[phi] (psi & chi) <-> ([phi] psi & [phi] chi)",
            Axiom::AK => "[phi] K a psi <-> (phi -> K a [phi] psi)",
            Axiom::AA => "[phi] [psi] chi <-> [phi & [phi] psi] chi",
            Axiom::ABox => "A phi -> [psi0] phi",
        };
        Some(parse_formula(text).expect("schemas parse"))
    }

    pub fn metavariables(self) -> &'static [&'static str] {
        match self {
            Axiom::P => &[],
            Axiom::K => &["a", "phi", "psi"],
            Axiom::T | Axiom::Four | Axiom::Five => &["a", "phi"],
            Axiom::AP => &["phi", "p"],
            Axiom::AN => &["phi", "psi"],
            Axiom::AC | Axiom::AA => &["phi", "psi", "chi"],
            Axiom::AK => &["a", "phi", "psi"],
            Axiom::ABox => &["phi", "psi0"],
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = String;

    fn from_str(s: &str) -> Result<Axiom, String> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// Values for a schema's metavariables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    pub formulas: BTreeMap<String, Formula>,
    pub agent: Option<String>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn with(mut self, name: &str, value: Formula) -> Bindings {
        self.formulas.insert(name.to_string(), value);
        self
    }

    pub fn with_agent(mut self, agent: &str) -> Bindings {
        self.agent = Some(agent.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemaError {
    /// `P` has no schema to instantiate.
    NoSchema,
    Unbound(String),
    NotAnAtom(String),
    BooleanRequired(Formula),
    Mismatch,
}

/// Instantiates `axiom` with `bindings`.
pub fn axiom_instance(axiom: Axiom, bindings: &Bindings) -> Result<Formula, SchemaError> {
    let schema = axiom.schema().ok_or(SchemaError::NoSchema)?;
    check_binding_kinds(bindings)?;
    instantiate(&schema, bindings)
}

fn check_binding_kinds(bindings: &Bindings) -> Result<(), SchemaError> {
    if let Some(p) = bindings.formulas.get("p") {
        if !matches!(p, Formula::Atom(_)) {
            return Err(SchemaError::NotAnAtom(p.to_string()));
        }
    }
    if let Some(b) = bindings.formulas.get("psi0") {
        if !b.is_boolean() {
            return Err(SchemaError::BooleanRequired(b.clone()));
        }
    }
    Ok(())
}

fn instantiate(pattern: &Formula, b: &Bindings) -> Result<Formula, SchemaError> {
    Ok(match pattern {
        Formula::Top => Formula::Top,
        Formula::Atom(m) => b
            .formulas
            .get(m)
            .cloned()
            .ok_or_else(|| SchemaError::Unbound(m.clone()))?,
        Formula::Not(f) => instantiate(f, b)?.not(),
        Formula::And(l, r) => instantiate(l, b)?.and(instantiate(r, b)?),
        Formula::Knows(_, f) => {
            let agent = b.agent.clone().ok_or_else(|| SchemaError::Unbound("a".into()))?;
            Formula::knows(agent, instantiate(f, b)?)
        }
        Formula::Announce(l, r) => Formula::announce(instantiate(l, b)?, instantiate(r, b)?),
        Formula::Arb(f) => Formula::arb(instantiate(f, b)?),
    })
}

/// Matches `formula` against `axiom`'s schema, extending `bindings`.
pub fn match_axiom(axiom: Axiom, formula: &Formula, bindings: &mut Bindings) -> Result<(), SchemaError> {
    let schema = axiom.schema().ok_or(SchemaError::NoSchema)?;
    check_binding_kinds(bindings)?;
    unify(&schema, formula, bindings)?;
    check_binding_kinds(bindings)
}

fn unify(pattern: &Formula, target: &Formula, b: &mut Bindings) -> Result<(), SchemaError> {
    match (pattern, target) {
        (Formula::Atom(m), _) => {
            if m == "p" && !matches!(target, Formula::Atom(_)) {
                return Err(SchemaError::Mismatch);
            }
            match b.formulas.get(m) {
                Some(bound) if bound == target => Ok(()),
                Some(_) => Err(SchemaError::Mismatch),
                None => {
                    b.formulas.insert(m.clone(), target.clone());
                    Ok(())
                }
            }
        }
        (Formula::Top, Formula::Top) => Ok(()),
        (Formula::Not(p), Formula::Not(t)) | (Formula::Arb(p), Formula::Arb(t)) => unify(p, t, b),
        (Formula::And(pl, pr), Formula::And(tl, tr)) | (Formula::Announce(pl, pr), Formula::Announce(tl, tr)) => {
            unify(pl, tl, b)?;
            unify(pr, tr, b)
        }
        (Formula::Knows(_, p), Formula::Knows(agent, t)) => {
            match &b.agent {
                Some(bound) if bound != agent => return Err(SchemaError::Mismatch),
                Some(_) => {}
                None => b.agent = Some(agent.clone()),
            }
            unify(p, t, b)
        }
        _ => Err(SchemaError::Mismatch),
    }
}

/// Maximum number of propositional letters after abstraction.
pub const MAX_LETTERS: usize = 20;

/// Whether `formula` is a propositional tautology once every maximal
/// subformula headed by a modality is read as a letter. `None` when there are
/// more than [`MAX_LETTERS`] letters.
pub fn is_tautology(formula: &Formula) -> Option<bool> {
    let mut letters = Vec::new();
    collect_letters(formula, &mut letters);
    if letters.len() > MAX_LETTERS {
        return None;
    }
    Some((0u32..1 << letters.len()).all(|v| truth(formula, &letters, v)))
}

fn collect_letters(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Top => {}
        Formula::Not(g) => collect_letters(g, out),
        Formula::And(l, r) => {
            collect_letters(l, out);
            collect_letters(r, out);
        }
        _ => {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
    }
}

fn truth(f: &Formula, letters: &[Formula], v: u32) -> bool {
    match f {
        Formula::Top => true,
        Formula::Not(g) => !truth(g, letters, v),
        Formula::And(l, r) => truth(l, letters, v) && truth(r, letters, v),
        _ => {
            let i = letters.iter().position(|x| x == f).expect("letter collected");
            v >> i & 1 == 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn ap_instance() {
        let b = Bindings::new().with("phi", f("q")).with("p", f("r"));
        assert_eq!(axiom_instance(Axiom::AP, &b).unwrap(), f("[q]r <-> (q -> r)"));
    }

    #[test]
    fn abox_instances() {
        let b = Bindings::new().with("phi", f("K a p")).with("psi0", f("q | r"));
        assert_eq!(axiom_instance(Axiom::ABox, &b).unwrap(), f("A K a p -> [q|r] K a p"));
        let bad = Bindings::new().with("phi", f("p")).with("psi0", f("K a q"));
        assert!(matches!(axiom_instance(Axiom::ABox, &bad), Err(SchemaError::BooleanRequired(_))));
        let mut found = Bindings::new();
        assert!(matches!(
            match_axiom(Axiom::ABox, &f("A p -> [K a q] p"), &mut found),
            Err(SchemaError::BooleanRequired(_))
        ));
    }

    #[test]
    fn matching_recovers_bindings() {
        let mut b = Bindings::new();
        match_axiom(Axiom::AK, &f("[p] K b q <-> (p -> K b [p] q)"), &mut b).unwrap();
        assert_eq!(b.agent.as_deref(), Some("b"));
        assert_eq!(b.formulas["psi"], f("q"));
        let mut b = Bindings::new();
        assert_eq!(
            match_axiom(Axiom::AK, &f("[p] K b q <-> (p -> K a [p] q)"), &mut b),
            Err(SchemaError::Mismatch)
        );
        let mut b = Bindings::new().with("phi", f("r"));
        assert_eq!(match_axiom(Axiom::T, &f("K a p -> p"), &mut b), Err(SchemaError::Mismatch));
        let mut b = Bindings::new();
        assert_eq!(match_axiom(Axiom::AP, &f("[q] K a r <-> (q -> K a r)"), &mut b), Err(SchemaError::Mismatch));
    }

    #[test]
    fn every_schema_round_trips() {
        for axiom in Axiom::ALL {
            let Some(schema) = axiom.schema() else { continue };
            let mut b = Bindings::new();
            match_axiom(axiom, &schema, &mut b).unwrap();
            assert_eq!(axiom.name().parse::<Axiom>().unwrap(), axiom);
        }
    }

    #[test]
    fn tautologies() {
        assert_eq!(is_tautology(&f("p | ~p")), Some(true));
        assert_eq!(is_tautology(&f("K a p -> K a p")), Some(true));
        assert_eq!(is_tautology(&f("K a p -> p")), Some(false));
        assert_eq!(is_tautology(&f("(A q -> [p] r) -> (~[p] r -> ~A q)")), Some(true));
        assert_eq!(is_tautology(&Formula::Top), Some(true));
    }
}
