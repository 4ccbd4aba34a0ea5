//! Translation to arbitrary announcement normal form, announcement reduction
//! and the rewriting of necessity-form instances into the premise shape of
//! the box rule.

use std::fmt;

use crate::syntax::{Formula, NecessityForm};

/// Translates any formula into an equivalent one in which every box sits
/// directly under exactly one announcement.
///
/// Derived connectives are already primitive encodings, so implications are
/// handled by the negation and conjunction clauses. `[φ]T` is treated like the
/// atom clause.
pub fn to_aanf(formula: &Formula) -> Formula {
    match formula {
        Formula::Top | Formula::Atom(_) => formula.clone(),
        Formula::Not(f) => to_aanf(f).not(),
        Formula::And(l, r) => to_aanf(l).and(to_aanf(r)),
        Formula::Knows(a, f) => Formula::knows(a.clone(), to_aanf(f)),
        Formula::Arb(f) => Formula::announce(Formula::Top, Formula::arb(to_aanf(f))),
        Formula::Announce(ann, body) => aanf_announce(ann, body),
    }
}

fn aanf_announce(ann: &Formula, body: &Formula) -> Formula {
    let ann = ann.clone();
    match body {
        Formula::Top | Formula::Atom(_) => to_aanf(&ann.implies(body.clone())),
        Formula::Not(inner) => {
            let rest = Formula::announce(ann.clone(), inner.as_ref().clone()).not();
            to_aanf(&ann.implies(rest))
        }
        Formula::And(l, r) => to_aanf(
            &Formula::announce(ann.clone(), l.as_ref().clone())
                .and(Formula::announce(ann, r.as_ref().clone())),
        ),
        Formula::Knows(a, inner) => {
            let rest = Formula::knows(a.clone(), Formula::announce(ann.clone(), inner.as_ref().clone()));
            to_aanf(&ann.implies(rest))
        }
        Formula::Announce(next, inner) => {
            let merged = ann.clone().and(Formula::announce(ann, next.as_ref().clone()));
            to_aanf(&Formula::announce(merged, inner.as_ref().clone()))
        }
        Formula::Arb(inner) => Formula::announce(to_aanf(&ann), Formula::arb(to_aanf(inner))),
    }
}

/// Eliminates announcements over non-box bodies using the five reduction
/// equivalences, outermost first. On box-free input the result is epistemic.
pub fn pal_reduce(formula: &Formula) -> Formula {
    match formula {
        Formula::Top | Formula::Atom(_) => formula.clone(),
        Formula::Not(f) => pal_reduce(f).not(),
        Formula::And(l, r) => pal_reduce(l).and(pal_reduce(r)),
        Formula::Knows(a, f) => Formula::knows(a.clone(), pal_reduce(f)),
        Formula::Arb(f) => Formula::arb(pal_reduce(f)),
        Formula::Announce(ann, body) => {
            let ann = ann.as_ref().clone();
            match body.as_ref() {
                Formula::Top | Formula::Atom(_) => pal_reduce(&ann.implies(body.as_ref().clone())),
                Formula::Not(inner) => {
                    let rest = Formula::announce(ann.clone(), inner.as_ref().clone()).not();
                    pal_reduce(&ann.implies(rest))
                }
                Formula::And(l, r) => pal_reduce(
                    &Formula::announce(ann.clone(), l.as_ref().clone())
                        .and(Formula::announce(ann, r.as_ref().clone())),
                ),
                Formula::Knows(a, inner) => {
                    let rest =
                        Formula::knows(a.clone(), Formula::announce(ann.clone(), inner.as_ref().clone()));
                    pal_reduce(&ann.implies(rest))
                }
                Formula::Announce(next, inner) => {
                    let merged = ann.clone().and(Formula::announce(ann, next.as_ref().clone()));
                    pal_reduce(&Formula::announce(merged, inner.as_ref().clone()))
                }
                Formula::Arb(inner) => {
                    Formula::announce(pal_reduce(&ann), Formula::arb(pal_reduce(inner)))
                }
            }
        }
    }
}

/// Named rewrite step used while bringing a necessity-form instance into the
/// shape `ψ' -> [φ'][p]φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteKind {
    /// `φ -> (φ' -> ψ)` to `(φ & φ') -> ψ`
    MergeAntecedents,
    /// `[φ'](ψ' -> ψ)` to `[φ']ψ' -> [φ']ψ`
    AnnounceImplication,
    /// `[φ']K_a ψ` to `φ' -> K_a [φ']ψ`
    AnnounceKnows,
    /// `[φ'][ψ']ψ` to `[φ' & [φ']ψ']ψ`
    ComposeAnnouncements,
    /// `φ -> K_a ψ` to `Khat_a φ -> ψ`; preserves derivability, not truth
    /// at a state.
    DualizeKnows,
    /// Drops an outermost `K_a`; preserves derivability.
    StripKnows,
    /// Inserts a missing `T` antecedent or `[T]` announcement.
    PadTop,
}

impl RewriteKind {
    /// Whether the step is a truth-preserving equivalence at every pointed
    /// model (all others only preserve derivability).
    pub fn is_pointwise(self) -> bool {
        !matches!(self, RewriteKind::DualizeKnows | RewriteKind::StripKnows)
    }
}

impl fmt::Display for RewriteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RewriteKind::MergeAntecedents => "merge-antecedents",
            RewriteKind::AnnounceImplication => "announce-implication",
            RewriteKind::AnnounceKnows => "announce-knows",
            RewriteKind::ComposeAnnouncements => "compose-announcements",
            RewriteKind::DualizeKnows => "dualize-knows",
            RewriteKind::StripKnows => "strip-knows",
            RewriteKind::PadTop => "pad-top",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub kind: RewriteKind,
    /// The whole formula after this step.
    pub result: Formula,
}

/// Components of `antecedent -> [announcement][fresh]body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RBoxPremise {
    pub antecedent: Formula,
    pub announcement: Formula,
    pub fresh: String,
    pub body: Formula,
    /// The necessity form that was recognised in the input.
    pub form: NecessityForm,
    pub trace: Vec<RewriteStep>,
}

impl RBoxPremise {
    pub fn premise(&self) -> Formula {
        self.antecedent.clone().implies(Formula::announce(
            self.announcement.clone(),
            Formula::announce(Formula::atom(self.fresh.clone()), self.body.clone()),
        ))
    }

    /// `antecedent -> [announcement] A body`, the conclusion of the box rule.
    pub fn conclusion(&self) -> Formula {
        self.antecedent.clone().implies(Formula::announce(
            self.announcement.clone(),
            Formula::arb(self.body.clone()),
        ))
    }

    /// Whether every recorded step preserves truth at each state.
    pub fn is_pointwise(&self) -> bool {
        self.trace.iter().all(|s| s.kind.is_pointwise())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RBoxError {
    #[error("formula is not an instance of a necessity form with an atomic announcement hole")]
    NotNecessityInstance,
}

/// Rewrites an instance `ψ([p]φ)` of a necessity form into the shape
/// `ψ' -> [φ'][p]φ`. The hole is the deepest atomic announcement on the spine
/// (restricted to atom `fresh` when given).
pub fn to_rbox_premise(formula: &Formula, fresh: Option<&str>) -> Result<RBoxPremise, RBoxError> {
    let is_hole = |g: &Formula| match g {
        Formula::Announce(ann, _) => match ann.as_ref() {
            Formula::Atom(p) => fresh.map_or(true, |want| want == p),
            _ => false,
        },
        _ => false,
    };
    let (form, filler) =
        NecessityForm::decompose(formula, &is_hole).ok_or(RBoxError::NotNecessityInstance)?;
    let Formula::Announce(ann, body) = &filler else {
        return Err(RBoxError::NotNecessityInstance);
    };
    let Formula::Atom(atom) = ann.as_ref() else {
        return Err(RBoxError::NotNecessityInstance);
    };
    let mut state = Rewriter {
        antecedent: None,
        announcement: None,
        trace: Vec::new(),
    };
    state.run(&form, &filler);
    let antecedent = state.antecedent.clone().unwrap_or(Formula::Top);
    let announcement = state.announcement.clone().unwrap_or(Formula::Top);
    let needs_pad = state.antecedent.is_none() || state.announcement.is_none();
    let mut out = RBoxPremise {
        antecedent,
        announcement,
        fresh: atom.clone(),
        body: body.as_ref().clone(),
        form,
        trace: state.trace,
    };
    if needs_pad {
        let result = out.premise();
        out.trace.push(RewriteStep {
            kind: RewriteKind::PadTop,
            result,
        });
    }
    Ok(out)
}

// Invariant: the input is equivalent to
// `antecedent -> [announcement] rest(hole)`, where missing parts are absent
// rather than padded.
struct Rewriter {
    antecedent: Option<Formula>,
    announcement: Option<Formula>,
    trace: Vec<RewriteStep>,
}

impl Rewriter {
    fn current(&self, rest: &NecessityForm, hole: &Formula) -> Formula {
        let mut inner = rest.instantiate(hole.clone());
        if let Some(ann) = &self.announcement {
            inner = Formula::announce(ann.clone(), inner);
        }
        match &self.antecedent {
            Some(a) => a.clone().implies(inner),
            None => inner,
        }
    }

    fn record(&mut self, kind: RewriteKind, rest: &NecessityForm, hole: &Formula) {
        let result = self.current(rest, hole);
        self.trace.push(RewriteStep { kind, result });
    }

    fn conjoin(&mut self, extra: Formula) {
        self.antecedent = Some(match self.antecedent.take() {
            Some(a) => a.and(extra),
            None => extra,
        });
    }

    fn run(&mut self, form: &NecessityForm, hole: &Formula) {
        match form {
            NecessityForm::Hole => {}
            NecessityForm::Implies(chi, rest) => {
                match self.announcement.clone() {
                    None => {
                        let had = self.antecedent.is_some();
                        self.conjoin(chi.clone());
                        if had {
                            self.record(RewriteKind::MergeAntecedents, rest, hole);
                        }
                    }
                    Some(ann) => {
                        self.record_announce_split(&ann, chi, rest, hole);
                    }
                }
                self.run(rest, hole);
            }
            NecessityForm::Knows(agent, rest) => {
                match (self.antecedent.take(), self.announcement.clone()) {
                    (None, None) => {
                        self.record(RewriteKind::StripKnows, rest, hole);
                    }
                    (Some(a), None) => {
                        self.antecedent = Some(Formula::considers(agent.clone(), a));
                        self.record(RewriteKind::DualizeKnows, rest, hole);
                    }
                    (prior, Some(ann)) => {
                        // [ann]K_a X  ==>  ann -> K_a [ann] X, merge, then dualize
                        let joined = match prior {
                            Some(a) => a.and(ann.clone()),
                            None => ann.clone(),
                        };
                        let inner = Formula::knows(
                            agent.clone(),
                            Formula::announce(ann.clone(), rest.instantiate(hole.clone())),
                        );
                        self.trace.push(RewriteStep {
                            kind: RewriteKind::AnnounceKnows,
                            result: joined.clone().implies(inner),
                        });
                        self.antecedent = Some(Formula::considers(agent.clone(), joined));
                        self.record(RewriteKind::DualizeKnows, rest, hole);
                    }
                }
                self.run(rest, hole);
            }
            NecessityForm::Announce(chi, rest) => {
                match self.announcement.take() {
                    None => self.announcement = Some(chi.clone()),
                    Some(ann) => {
                        let composed = ann.clone().and(Formula::announce(ann, chi.clone()));
                        self.announcement = Some(composed);
                        self.record(RewriteKind::ComposeAnnouncements, rest, hole);
                    }
                }
                self.run(rest, hole);
            }
        }
    }

    fn record_announce_split(
        &mut self,
        ann: &Formula,
        chi: &Formula,
        rest: &NecessityForm,
        hole: &Formula,
    ) {
        // A -> [ann](chi -> R)  ==>  A -> ([ann]chi -> [ann]R)  ==>  (A & [ann]chi) -> [ann]R
        let announced_chi = Formula::announce(ann.clone(), chi.clone());
        let split = announced_chi
            .clone()
            .implies(Formula::announce(ann.clone(), rest.instantiate(hole.clone())));
        let result = match &self.antecedent {
            Some(a) => a.clone().implies(split),
            None => split,
        };
        self.trace.push(RewriteStep {
            kind: RewriteKind::AnnounceImplication,
            result,
        });
        let had = self.antecedent.is_some();
        self.conjoin(announced_chi);
        if had {
            self.record(RewriteKind::MergeAntecedents, rest, hole);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn box_gets_top_announcement() {
        assert_eq!(to_aanf(&f("A p")), f("[T] A p"));
    }

    #[test]
    fn atomic_announcement_becomes_implication() {
        assert_eq!(to_aanf(&f("[p] q")), f("p -> q"));
        assert_eq!(pal_reduce(&f("[p] q")), f("p -> q"));
    }

    #[test]
    fn nested_announcements_compose() {
        // [p][q]r => [p & [p]q] r => (p & (p -> q)) -> r
        assert_eq!(to_aanf(&f("[p][q]r")), f("(p & (p -> q)) -> r"));
    }

    #[test]
    fn announcement_over_knowledge() {
        assert_eq!(pal_reduce(&f("[p] K a q")), f("p -> K a (p -> q)"));
    }

    #[test]
    fn announcement_over_box_is_kept() {
        assert_eq!(to_aanf(&f("[p] A q")), f("[p] A q"));
        assert_eq!(to_aanf(&f("[[p]q] A A r")), f("[p -> q] A [T] A r"));
        assert_eq!(pal_reduce(&f("[p] A [q] r")), f("[p] A (q -> r)"));
    }

    #[test]
    fn bare_rbox_instance_is_padded() {
        let out = to_rbox_premise(&f("[p]r"), None).unwrap();
        assert_eq!(
            (out.antecedent.clone(), out.announcement.clone(), out.fresh.as_str(), out.body.clone()),
            (Formula::Top, Formula::Top, "p", f("r"))
        );
        assert_eq!(out.trace.last().unwrap().kind, RewriteKind::PadTop);
    }

    #[test]
    fn rbox_shape_is_identity() {
        let out = to_rbox_premise(&f("q -> [s][p]r"), None).unwrap();
        assert_eq!(out.premise(), f("q -> [s][p]r"));
        assert!(out.trace.is_empty());
    }

    #[test]
    fn knowledge_context_is_dualized() {
        let out = to_rbox_premise(&f("K a [q][p]r"), Some("p")).unwrap();
        assert_eq!(out.fresh, "p");
        assert_eq!(out.body, f("r"));
        assert_eq!(out.announcement, f("q"));
        assert_eq!(out.antecedent, Formula::Top);
        assert_eq!(out.trace[0].kind, RewriteKind::StripKnows);
        let out = to_rbox_premise(&f("s -> K a [q][p]r"), None).unwrap();
        assert_eq!(out.antecedent, f("Khat a s"));
        assert_eq!(out.announcement, f("q"));
    }

    #[test]
    fn non_instance_is_rejected() {
        assert_eq!(
            to_rbox_premise(&f("p & [p]q"), None),
            Err(RBoxError::NotNecessityInstance)
        );
        assert!(to_rbox_premise(&f("K a [q]r"), Some("p")).is_err());
    }
}
