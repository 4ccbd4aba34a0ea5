//! Hilbert-style derivation checking for the finitary axiomatization.

mod convert;
pub mod examples;
mod schema;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::syntax::{parse_formula, Formula};

pub use convert::{convert_rbox_one, ConvertError};
pub use schema::{axiom_instance, is_tautology, match_axiom, Axiom, Bindings, SchemaError, MAX_LETTERS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    MP,
    NecK,
    NecA,
    RBox,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::MP, Rule::NecK, Rule::NecA, Rule::RBox];

    pub fn name(self) -> &'static str {
        match self {
            Rule::MP => "MP",
            Rule::NecK => "NecK",
            Rule::NecA => "NecA",
            Rule::RBox => "RBox",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Rule, String> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom { axiom: Axiom, bind: Bindings },
    Rule { rule: Rule, from: Vec<usize>, fresh: Option<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub index: usize,
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub lines: Vec<Line>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    BadPremiseRef,
    SchemaMismatch,
    NotTautology,
    TooManyLetters,
    BooleanRequired,
    RulePremiseShape,
    ConclusionMismatch,
    FreshnessViolation,
    Malformed,
    UnknownAxiom,
    UnknownRule,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DiagnosticKind::BadPremiseRef => "bad-premise-ref",
            DiagnosticKind::SchemaMismatch => "schema-mismatch",
            DiagnosticKind::NotTautology => "not-tautology",
            DiagnosticKind::TooManyLetters => "too-many-letters",
            DiagnosticKind::BooleanRequired => "boolean-required",
            DiagnosticKind::RulePremiseShape => "rule-premise-shape",
            DiagnosticKind::ConclusionMismatch => "conclusion-mismatch",
            DiagnosticKind::FreshnessViolation => "freshness-violation",
            DiagnosticKind::Malformed => "malformed",
            DiagnosticKind::UnknownAxiom => "unknown-axiom",
            DiagnosticKind::UnknownRule => "unknown-rule",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// The offending line's index, when the problem belongs to a line.
    pub line: Option<usize>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    fn at(line: usize, kind: DiagnosticKind, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            line: Some(line),
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(i) => write!(f, "line {i}: {}: {}", self.kind, self.message),
            None => write!(f, "{}: {}", self.kind, self.message),
        }
    }
}

/// The pieces `ψ`, `φ′`, `p`, `φ` of a box-rule premise `ψ → [φ′][p]φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RBoxParts {
    pub antecedent: Formula,
    pub announcement: Formula,
    pub fresh: String,
    pub body: Formula,
}

impl RBoxParts {
    pub fn conclusion(&self) -> Formula {
        self.antecedent
            .clone()
            .implies(Formula::announce(self.announcement.clone(), Formula::arb(self.body.clone())))
    }
}

/// Reads `premise` as `ψ → [φ′][p]φ` with `p` the given atom.
pub fn rbox_parts(premise: &Formula, fresh: &str) -> Option<RBoxParts> {
    let (antecedent, rest) = premise.as_implication()?;
    let Formula::Announce(announcement, inner) = rest else { return None };
    let Formula::Announce(p, body) = inner.as_ref() else { return None };
    match p.as_ref() {
        Formula::Atom(name) if name == fresh => Some(RBoxParts {
            antecedent: antecedent.clone(),
            announcement: announcement.as_ref().clone(),
            fresh: fresh.to_string(),
            body: body.as_ref().clone(),
        }),
        _ => None,
    }
}

/// Checks every line; an empty error list never occurs.
pub fn check_derivation(d: &Derivation) -> Result<(), Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut seen: HashMap<usize, &Formula> = HashMap::new();
    let mut last = None;
    for line in &d.lines {
        if last.is_some_and(|l| line.index <= l) {
            out.push(Diagnostic::at(line.index, DiagnosticKind::Malformed, "line indices must increase"));
        }
        if let Err(diag) = check_line(line, &seen) {
            out.push(diag);
        }
        seen.insert(line.index, &line.formula);
        last = Some(line.index);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_line(line: &Line, seen: &HashMap<usize, &Formula>) -> Result<(), Diagnostic> {
    let i = line.index;
    let f = &line.formula;
    match &line.by {
        Justification::Axiom { axiom: Axiom::P, .. } => match is_tautology(f) {
            Some(true) => Ok(()),
            Some(false) => Err(Diagnostic::at(i, DiagnosticKind::NotTautology, format!("{f} is not a tautology"))),
            None => Err(Diagnostic::at(
                i,
                DiagnosticKind::TooManyLetters,
                format!("more than {MAX_LETTERS} propositional letters"),
            )),
        },
        Justification::Axiom { axiom, bind } => {
            if let Some(extra) = bind
                .formulas
                .keys()
                .find(|k| !axiom.metavariables().contains(&k.as_str()))
            {
                return Err(Diagnostic::at(
                    i,
                    DiagnosticKind::Malformed,
                    format!("{axiom} has no metavariable {extra}"),
                ));
            }
            let mut b = bind.clone();
            match match_axiom(*axiom, f, &mut b) {
                Ok(()) => Ok(()),
                Err(SchemaError::BooleanRequired(g)) => Err(Diagnostic::at(
                    i,
                    DiagnosticKind::BooleanRequired,
                    format!("{g} is not boolean"),
                )),
                Err(_) => Err(Diagnostic::at(
                    i,
                    DiagnosticKind::SchemaMismatch,
                    format!("{f} is not an instance of {axiom}"),
                )),
            }
        }
        Justification::Rule { rule, from, fresh } => {
            let premises = from
                .iter()
                .map(|j| {
                    seen.get(j).copied().ok_or_else(|| {
                        Diagnostic::at(i, DiagnosticKind::BadPremiseRef, format!("no earlier line {j}"))
                    })
                })
                .collect::<Result<Vec<&Formula>, Diagnostic>>()?;
            let arity = if *rule == Rule::MP { 2 } else { 1 };
            if premises.len() != arity {
                return Err(Diagnostic::at(
                    i,
                    DiagnosticKind::BadPremiseRef,
                    format!("{rule} takes {arity} premise(s), got {}", premises.len()),
                ));
            }
            if *rule != Rule::RBox && fresh.is_some() {
                return Err(Diagnostic::at(i, DiagnosticKind::Malformed, format!("{rule} takes no fresh atom")));
            }
            check_rule(i, *rule, &premises, fresh.as_deref(), f)
        }
    }
}

fn check_rule(i: usize, rule: Rule, premises: &[&Formula], fresh: Option<&str>, f: &Formula) -> Result<(), Diagnostic> {
    let mismatch = |msg: String| Err(Diagnostic::at(i, DiagnosticKind::ConclusionMismatch, msg));
    match rule {
        Rule::MP => {
            let (x, y) = (premises[0], premises[1]);
            let mut shaped = false;
            for (minor, major) in [(x, y), (y, x)] {
                if let Some((ante, cons)) = major.as_implication() {
                    if ante == minor {
                        if cons == f {
                            return Ok(());
                        }
                        shaped = true;
                    }
                }
            }
            if shaped {
                mismatch(format!("modus ponens does not yield {f}"))
            } else {
                Err(Diagnostic::at(
                    i,
                    DiagnosticKind::RulePremiseShape,
                    "neither premise is an implication whose antecedent is the other",
                ))
            }
        }
        Rule::NecK => match f {
            Formula::Knows(_, body) if body.as_ref() == premises[0] => Ok(()),
            _ => mismatch(format!("{f} is not K_a applied to the premise")),
        },
        Rule::NecA => match f {
            Formula::Announce(_, body) if body.as_ref() == premises[0] => Ok(()),
            _ => mismatch(format!("{f} is not an announcement of the premise")),
        },
        Rule::RBox => {
            let Some(p) = fresh else {
                return Err(Diagnostic::at(i, DiagnosticKind::Malformed, "RBox needs a fresh atom"));
            };
            let Some(parts) = rbox_parts(premises[0], p) else {
                return Err(Diagnostic::at(
                    i,
                    DiagnosticKind::RulePremiseShape,
                    format!("premise is not of the form psi -> [phi'][{p}]phi"),
                ));
            };
            let mut used = BTreeSet::new();
            for g in [&parts.antecedent, &parts.announcement, &parts.body] {
                used.extend(g.vars());
            }
            if used.contains(p) {
                return Err(Diagnostic::at(
                    i,
                    DiagnosticKind::FreshnessViolation,
                    format!("{p} occurs in the premise outside the announcement"),
                ));
            }
            if &parts.conclusion() != f {
                return mismatch(format!("expected {}", parts.conclusion()));
            }
            Ok(())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawDerivation {
    lines: Vec<RawLine>,
}

#[derive(Serialize, Deserialize)]
struct RawLine {
    i: usize,
    formula: String,
    by: RawBy,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawBy {
    Axiom {
        axiom: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        bind: BTreeMap<String, String>,
    },
    Rule {
        rule: String,
        #[serde(default)]
        from: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fresh: Option<String>,
    },
}

impl Derivation {
    pub fn new() -> Derivation {
        Derivation::default()
    }

    /// Appends a line numbered one past the last and returns its index.
    pub fn push(&mut self, formula: Formula, by: Justification) -> usize {
        let index = self.lines.last().map_or(1, |l| l.index + 1);
        self.lines.push(Line { index, formula, by });
        index
    }

    pub fn axiom(&mut self, formula: Formula, axiom: Axiom) -> usize {
        self.push(formula, Justification::Axiom { axiom, bind: Bindings::new() })
    }

    pub fn rule(&mut self, formula: Formula, rule: Rule, from: &[usize]) -> usize {
        self.push(formula, Justification::Rule { rule, from: from.to_vec(), fresh: None })
    }

    pub fn rbox(&mut self, formula: Formula, from: usize, fresh: &str) -> usize {
        self.push(
            formula,
            Justification::Rule {
                rule: Rule::RBox,
                from: vec![from],
                fresh: Some(fresh.to_string()),
            },
        )
    }

    pub fn formula(&self, index: usize) -> Option<&Formula> {
        self.lines.iter().find(|l| l.index == index).map(|l| &l.formula)
    }

    pub fn last(&self) -> Option<&Line> {
        self.lines.last()
    }

    /// Parses the JSON derivation format; problems are reported per line.
    pub fn from_json(text: &str) -> Result<Derivation, Vec<Diagnostic>> {
        let raw: RawDerivation = serde_json::from_str(text).map_err(|e| {
            vec![Diagnostic {
                line: None,
                kind: DiagnosticKind::Malformed,
                message: e.to_string(),
            }]
        })?;
        let mut lines = Vec::new();
        let mut errors = Vec::new();
        for l in raw.lines {
            match convert_line(&l) {
                Ok(line) => lines.push(line),
                Err(d) => errors.push(d),
            }
        }
        if errors.is_empty() {
            Ok(Derivation { lines })
        } else {
            Err(errors)
        }
    }

    pub fn to_json(&self) -> String {
        let raw = RawDerivation {
            lines: self
                .lines
                .iter()
                .map(|l| RawLine {
                    i: l.index,
                    formula: l.formula.to_string(),
                    by: match &l.by {
                        Justification::Axiom { axiom, bind } => {
                            let mut map: BTreeMap<String, String> =
                                bind.formulas.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
                            if let Some(a) = &bind.agent {
                                map.insert("a".into(), a.clone());
                            }
                            RawBy::Axiom {
                                axiom: axiom.name().into(),
                                bind: map,
                            }
                        }
                        Justification::Rule { rule, from, fresh } => RawBy::Rule {
                            rule: rule.name().into(),
                            from: from.clone(),
                            fresh: fresh.clone(),
                        },
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("derivations serialize")
    }
}

fn convert_line(l: &RawLine) -> Result<Line, Diagnostic> {
    let formula = parse_formula(&l.formula)
        .map_err(|e| Diagnostic::at(l.i, DiagnosticKind::Malformed, format!("formula: {e}")))?;
    let by = match &l.by {
        RawBy::Axiom { axiom, bind } => {
            let axiom: Axiom = axiom
                .parse()
                .map_err(|name| Diagnostic::at(l.i, DiagnosticKind::UnknownAxiom, format!("unknown axiom {name}")))?;
            let mut b = Bindings::new();
            for (k, v) in bind {
                if k == "a" {
                    b.agent = Some(v.clone());
                } else {
                    let g = parse_formula(v).map_err(|e| {
                        Diagnostic::at(l.i, DiagnosticKind::Malformed, format!("binding {k}: {e}"))
                    })?;
                    b.formulas.insert(k.clone(), g);
                }
            }
            Justification::Axiom { axiom, bind: b }
        }
        RawBy::Rule { rule, from, fresh } => Justification::Rule {
            rule: rule
                .parse()
                .map_err(|name| Diagnostic::at(l.i, DiagnosticKind::UnknownRule, format!("unknown rule {name}")))?,
            from: from.clone(),
            fresh: fresh.clone(),
        },
    };
    Ok(Line { index: l.i, formula, by })
}

/// Loads and checks a JSON derivation in one go.
pub fn check_json(text: &str) -> Result<Derivation, Vec<Diagnostic>> {
    let d = Derivation::from_json(text)?;
    check_derivation(&d)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn kinds(d: &Derivation) -> Vec<DiagnosticKind> {
        check_derivation(d).err().unwrap_or_default().into_iter().map(|x| x.kind).collect()
    }

    #[test]
    fn tautology_then_announcement() {
        let mut d = Derivation::new();
        let a = d.axiom(f("p | ~p"), Axiom::P);
        d.rule(f("[K a q](p | ~p)"), Rule::NecA, &[a]);
        assert_eq!(check_derivation(&d), Ok(()));
    }

    #[test]
    fn non_fresh_box_rule() {
        let mut d = Derivation::new();
        let a = d.axiom(f("p | ~p"), Axiom::P);
        let b = d.rule(f("[p](p | ~p)"), Rule::NecA, &[a]);
        let c = d.rule(f("[T][p](p | ~p)"), Rule::NecA, &[b]);
        let e = d.axiom(f("[T][p](p | ~p) -> (T -> [T][p](p | ~p))"), Axiom::P);
        let g = d.rule(f("T -> [T][p](p | ~p)"), Rule::MP, &[c, e]);
        d.rbox(f("T -> [T] A (p | ~p)"), g, "p");
        assert_eq!(kinds(&d), vec![DiagnosticKind::FreshnessViolation]);
    }

    #[test]
    fn references_must_point_back() {
        let mut d = Derivation::new();
        d.rule(f("K a p"), Rule::NecK, &[2]);
        d.axiom(f("p | ~p"), Axiom::P);
        assert_eq!(kinds(&d), vec![DiagnosticKind::BadPremiseRef]);
    }

    #[test]
    fn modus_ponens_shapes() {
        let mut d = Derivation::new();
        let a = d.axiom(f("p -> p"), Axiom::P);
        let b = d.axiom(f("(p -> p) -> (q -> q)"), Axiom::P);
        d.rule(f("q -> q"), Rule::MP, &[b, a]);
        d.rule(f("r -> r"), Rule::MP, &[a, b]);
        d.rule(f("q -> q"), Rule::MP, &[a, a]);
        assert_eq!(
            kinds(&d),
            vec![DiagnosticKind::ConclusionMismatch, DiagnosticKind::RulePremiseShape]
        );
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"lines":[
            {"i":1,"formula":"[q]r <-> (q -> r)","by":{"axiom":"AP","bind":{"phi":"q","p":"r"}}},
            {"i":2,"formula":"K b ([q]r <-> (q -> r))","by":{"rule":"NecK","from":[1]}},
            {"i":3,"formula":"K b ([q]r <-> (q -> r)) -> ([q]r <-> (q -> r))","by":{"axiom":"T","bind":{"a":"b"}}},
            {"i":4,"formula":"[q]r <-> (q -> r)","by":{"rule":"MP","from":[2,3]}}
        ]}"#;
        let d = check_json(text).unwrap();
        assert_eq!(d.lines.len(), 4);
        assert_eq!(Derivation::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn json_diagnostics() {
        let bad = r#"{"lines":[{"i":1,"formula":"p","by":{"axiom":"Q"}},{"i":2,"formula":"p &","by":{"rule":"MP","from":[1,1]}},{"i":3,"formula":"p","by":{"rule":"Cut","from":[1]}}]}"#;
        let kinds: Vec<_> = Derivation::from_json(bad).unwrap_err().into_iter().map(|d| d.kind).collect();
        assert_eq!(
            kinds,
            vec![DiagnosticKind::UnknownAxiom, DiagnosticKind::Malformed, DiagnosticKind::UnknownRule]
        );
        assert_eq!(Derivation::from_json("[1,2]").unwrap_err()[0].kind, DiagnosticKind::Malformed);
        let wrong_agent = r#"{"lines":[{"i":1,"formula":"K a p -> p","by":{"axiom":"T","bind":{"a":"b"}}}]}"#;
        assert_eq!(check_json(wrong_agent).unwrap_err()[0].kind, DiagnosticKind::SchemaMismatch);
        let unknown_meta = r#"{"lines":[{"i":1,"formula":"K a p -> p","by":{"axiom":"T","bind":{"chi":"p"}}}]}"#;
        assert_eq!(check_json(unknown_meta).unwrap_err()[0].kind, DiagnosticKind::Malformed);
        let decreasing = r#"{"lines":[{"i":2,"formula":"T","by":{"axiom":"P"}},{"i":1,"formula":"T","by":{"axiom":"P"}}]}"#;
        assert_eq!(check_json(decreasing).unwrap_err()[0].kind, DiagnosticKind::Malformed);
    }
}
