//! Fixture derivations: accepted ones and single-fault mutations.

use crate::syntax::{parse_formula, Formula, NecessityForm};

use super::{convert_rbox_one, Axiom, Bindings, Derivation, DiagnosticKind, Justification, Rule};

fn f(s: &str) -> Formula {
    parse_formula(s).expect("fixture formulas parse")
}

/// `φ` by P, then `[ψ]φ` by NecA.
pub fn tautology_announcement() -> Derivation {
    let mut d = Derivation::new();
    let a = d.axiom(f("p | ~p"), Axiom::P);
    d.rule(f("[K a q](p | ~p)"), Rule::NecA, &[a]);
    d
}

/// `T -> [T] A φ` from the tautology `φ`, announcing a fresh `p` and `T`
/// before the box rule.
pub fn box_from_tautology(phi: &Formula, fresh: &str) -> Derivation {
    let mut d = Derivation::new();
    let a = d.axiom(phi.clone(), Axiom::P);
    let with_p = Formula::announce(Formula::atom(fresh), phi.clone());
    let b = d.rule(with_p.clone(), Rule::NecA, &[a]);
    let with_top = Formula::announce(Formula::Top, with_p);
    let c = d.rule(with_top.clone(), Rule::NecA, &[b]);
    let padded = Formula::Top.implies(with_top.clone());
    let e = d.axiom(with_top.implies(padded.clone()), Axiom::P);
    let g = d.rule(padded, Rule::MP, &[c, e]);
    d.rbox(
        Formula::Top.implies(Formula::announce(Formula::Top, Formula::arb(phi.clone()))),
        g,
        fresh,
    );
    d
}

pub fn footnote() -> Derivation {
    box_from_tautology(&f("r -> r"), "p")
}

/// Derives `form([p]φ)` for a tautology `φ`, working outward from `φ`.
pub fn derive_instance(form: &NecessityForm, phi: &Formula, fresh: &str) -> Derivation {
    let mut d = Derivation::new();
    let a = d.axiom(phi.clone(), Axiom::P);
    let hole = Formula::announce(Formula::atom(fresh), phi.clone());
    let b = d.rule(hole.clone(), Rule::NecA, &[a]);
    build(&mut d, form, &hole, b);
    d
}

fn build(d: &mut Derivation, form: &NecessityForm, hole: &Formula, inner_line: usize) -> usize {
    let (outer, inner) = match form {
        NecessityForm::Hole => return inner_line,
        NecessityForm::Implies(_, rest) | NecessityForm::Knows(_, rest) | NecessityForm::Announce(_, rest) => {
            (form.instantiate(hole.clone()), rest)
        }
    };
    let line = build(d, inner, hole, inner_line);
    let body = inner.instantiate(hole.clone());
    match form {
        NecessityForm::Knows(..) => d.rule(outer, Rule::NecK, &[line]),
        NecessityForm::Announce(..) => d.rule(outer, Rule::NecA, &[line]),
        _ => {
            let p = d.axiom(body.implies(outer.clone()), Axiom::P);
            d.rule(outer, Rule::MP, &[line, p])
        }
    }
}

/// The necessity form `K a (s -> (t -> [q][u] _))`, whose normal-form trace
/// strips a knowledge operator, merges antecedents and composes announcements.
pub fn converted_form() -> NecessityForm {
    NecessityForm::knows(
        "a",
        NecessityForm::implies(
            f("s"),
            NecessityForm::implies(
                f("t"),
                NecessityForm::announce(f("q"), NecessityForm::announce(f("u"), NecessityForm::Hole)),
            ),
        ),
    )
}

/// A derivation using the necessity-form box rule once, converted into one
/// that only uses `RBox`; ends in `K a (s -> (t -> [q][u] A (r -> r)))`.
pub fn converted() -> Derivation {
    let phi = f("r -> r");
    let mut d = derive_instance(&converted_form(), &phi, "p");
    let last = d.last().expect("nonempty").index;
    convert_rbox_one(&mut d, last, "p").expect("every trace step is mechanized");
    d
}

/// `K a [q] A (r -> r)` from `r -> r`; the trace strips `K a` and pads a `T`
/// antecedent.
pub fn converted_padded() -> Derivation {
    let form = NecessityForm::knows("a", NecessityForm::announce(f("q"), NecessityForm::Hole));
    let mut d = derive_instance(&form, &f("r -> r"), "p");
    let last = d.last().expect("nonempty").index;
    convert_rbox_one(&mut d, last, "p").expect("every trace step is mechanized");
    d
}

/// One accepted instance of every schema, one per line.
pub fn axiom_instances() -> Vec<(Axiom, Formula)> {
    vec![
        (Axiom::P, f("(K a p -> q) -> (~q -> ~K a p)")),
        (Axiom::K, f("K a (p -> q) -> (K a p -> K a q)")),
        (Axiom::T, f("K b q -> q")),
        (Axiom::Four, f("K a p -> K a K a p")),
        (Axiom::Five, f("~K b p -> K b ~K b p")),
        (Axiom::AP, f("[q]r <-> (q -> r)")),
        (Axiom::AN, f("[p]~q <-> (p -> ~[p]q)")),
        (Axiom::AC, f("[p](q & r) <-> ([p]q & [p]r)")),
        (Axiom::AK, f("[p]K a q <-> (p -> K a [p]q)")),
        (Axiom::AA, f("[p][q]r <-> [p & [p]q]r")),
        (Axiom::ABox, f("A K a p -> [q | r] K a p")),
    ]
}

pub fn all_axioms() -> Derivation {
    let mut d = Derivation::new();
    for (axiom, formula) in axiom_instances() {
        d.axiom(formula, axiom);
    }
    d
}

/// Every accepted fixture, by name.
pub fn accepted() -> Vec<(&'static str, Derivation)> {
    vec![
        ("tautology-announcement", tautology_announcement()),
        ("footnote", footnote()),
        ("converted", converted()),
        ("converted-padded", converted_padded()),
        ("all-axioms", all_axioms()),
    ]
}

/// A derivation with exactly one faulty line and the diagnostic it must get.
#[derive(Clone, Debug)]
pub struct Mutation {
    pub name: &'static str,
    /// The axiom or rule being exercised.
    pub target: &'static str,
    pub derivation: Derivation,
    pub line: usize,
    pub expected: DiagnosticKind,
}

fn single(name: &'static str, axiom: Axiom, formula: &str, expected: DiagnosticKind) -> Mutation {
    let mut d = Derivation::new();
    let line = d.axiom(f(formula), axiom);
    Mutation {
        name,
        target: axiom.name(),
        derivation: d,
        line,
        expected,
    }
}

pub fn mutations() -> Vec<Mutation> {
    use DiagnosticKind::*;
    let mut out = vec![
        single("p-non-tautology", Axiom::P, "K a p -> p", NotTautology),
        single("k-agent-switch", Axiom::K, "K a (p -> q) -> (K a p -> K b q)", SchemaMismatch),
        single("t-wrong-consequent", Axiom::T, "K a p -> q", SchemaMismatch),
        single("4-agent-switch", Axiom::Four, "K a p -> K a K b p", SchemaMismatch),
        single("5-missing-negation", Axiom::Five, "~K a p -> K a K a p", SchemaMismatch),
        single("ap-modal-atom", Axiom::AP, "[q] K a r <-> (q -> K a r)", SchemaMismatch),
        single("an-dropped-negation", Axiom::AN, "[q]~r <-> (q -> [q]r)", SchemaMismatch),
        single("ac-disjunction", Axiom::AC, "[q](r & s) <-> ([q]r | [q]s)", SchemaMismatch),
        single("ak-missing-announcement", Axiom::AK, "[q]K a r <-> (q -> K a r)", SchemaMismatch),
        single("aa-plain-conjunction", Axiom::AA, "[q][r]s <-> [q & r]s", SchemaMismatch),
        single("abox-modal-announcement", Axiom::ABox, "A p -> [K a q] p", BooleanRequired),
    ];

    let mut d = Derivation::new();
    let a = d.axiom(f("p -> p"), Axiom::P);
    let b = d.axiom(f("(p -> p) -> (q -> q)"), Axiom::P);
    let line = d.rule(f("r -> r"), Rule::MP, &[a, b]);
    out.push(Mutation {
        name: "mp-wrong-conclusion",
        target: "MP",
        derivation: d,
        line,
        expected: ConclusionMismatch,
    });

    let mut d = tautology_announcement();
    let line = d.rule(f("K a q"), Rule::NecK, &[1]);
    out.push(Mutation {
        name: "neck-wrong-body",
        target: "NecK",
        derivation: d,
        line,
        expected: ConclusionMismatch,
    });

    let mut d = Derivation::new();
    let a = d.axiom(f("p | ~p"), Axiom::P);
    let line = d.rule(f("[q] p"), Rule::NecA, &[a]);
    out.push(Mutation {
        name: "neca-wrong-body",
        target: "NecA",
        derivation: d,
        line,
        expected: ConclusionMismatch,
    });

    let d = box_from_tautology(&f("p | ~p"), "p");
    let line = d.last().expect("nonempty").index;
    out.push(Mutation {
        name: "rbox-not-fresh",
        target: "RBox",
        derivation: d,
        line,
        expected: FreshnessViolation,
    });

    let mut d = footnote();
    let line = d.rule(f("T -> A (r -> r)"), Rule::RBox, &[1]);
    if let Some(Justification::Rule { fresh, .. }) = d.lines.last_mut().map(|l| &mut l.by) {
        *fresh = Some("p".into());
    }
    out.push(Mutation {
        name: "rbox-premise-shape",
        target: "RBox",
        derivation: d,
        line,
        expected: RulePremiseShape,
    });

    let mut d = footnote();
    let line = d.rule(f("p"), Rule::MP, &[1, 9]);
    out.push(Mutation {
        name: "mp-dangling-reference",
        target: "MP",
        derivation: d,
        line,
        expected: BadPremiseRef,
    });
    out
}

/// Bindings used when emitting the instances in `axiom_instances` through
/// `axiom_instance`.
pub fn sample_bindings() -> Vec<(Axiom, Bindings)> {
    vec![
        (Axiom::AP, Bindings::new().with("phi", f("q")).with("p", f("r"))),
        (Axiom::ABox, Bindings::new().with("phi", f("K a p")).with("psi0", f("q | r"))),
        (
            Axiom::AK,
            Bindings::new().with("phi", f("p")).with("psi", f("q")).with_agent("a"),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{axiom_instance, check_derivation};

    #[test]
    fn fixtures_are_accepted() {
        for (name, d) in accepted() {
            assert_eq!(check_derivation(&d), Ok(()), "{name}");
        }
        let c = converted();
        assert_eq!(
            c.last().map(|l| &l.formula),
            Some(&f("K a (s -> (t -> [q][u] A (r -> r)))"))
        );
        assert!(c.lines.iter().any(|l| matches!(l.by, Justification::Axiom { axiom: Axiom::AA, .. })));
        assert!(c.lines.iter().any(|l| matches!(l.by, Justification::Rule { rule: Rule::RBox, .. })));
        assert_eq!(
            converted_padded().last().map(|l| &l.formula),
            Some(&f("K a [q] A (r -> r)"))
        );
        assert_eq!(footnote().last().map(|l| &l.formula), Some(&f("T -> [T] A (r -> r)")));
    }

    #[test]
    fn mutations_get_their_diagnostic() {
        for m in mutations() {
            let errors = check_derivation(&m.derivation).unwrap_err();
            assert_eq!(errors.len(), 1, "{}: {errors:?}", m.name);
            assert_eq!(errors[0].kind, m.expected, "{}", m.name);
            assert_eq!(errors[0].line, Some(m.line), "{}", m.name);
        }
    }

    #[test]
    fn sample_bindings_match_fixture_instances() {
        let instances = axiom_instances();
        for (axiom, b) in sample_bindings() {
            let made = axiom_instance(axiom, &b).unwrap();
            assert!(instances.contains(&(axiom, made)), "{axiom}");
        }
    }
}
