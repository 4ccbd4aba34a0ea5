use super::Formula;

/// A one-hole context built from implication antecedents, knowledge and
/// announcements. The hole is always the rightmost leaf of the spine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NecessityForm {
    Hole,
    Implies(Formula, Box<NecessityForm>),
    Knows(String, Box<NecessityForm>),
    Announce(Formula, Box<NecessityForm>),
}

/// The dual context: conjunction, possibility and dual announcement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PossibilityForm {
    Hole,
    And(Formula, Box<PossibilityForm>),
    Considers(String, Box<PossibilityForm>),
    AnnounceDual(Formula, Box<PossibilityForm>),
}

impl NecessityForm {
    pub fn implies(antecedent: Formula, rest: NecessityForm) -> Self {
        NecessityForm::Implies(antecedent, Box::new(rest))
    }

    pub fn knows(agent: impl Into<String>, rest: NecessityForm) -> Self {
        NecessityForm::Knows(agent.into(), Box::new(rest))
    }

    pub fn announce(announcement: Formula, rest: NecessityForm) -> Self {
        NecessityForm::Announce(announcement, Box::new(rest))
    }

    /// Fills the hole with `filler`.
    pub fn instantiate(&self, filler: Formula) -> Formula {
        match self {
            NecessityForm::Hole => filler,
            NecessityForm::Implies(a, rest) => a.clone().implies(rest.instantiate(filler)),
            NecessityForm::Knows(agent, rest) => {
                Formula::knows(agent.clone(), rest.instantiate(filler))
            }
            NecessityForm::Announce(ann, rest) => {
                Formula::announce(ann.clone(), rest.instantiate(filler))
            }
        }
    }

    /// Replaces `->` by `&`, `K` by `Khat` and `[·]` by `<·>`.
    pub fn dual(&self) -> PossibilityForm {
        match self {
            NecessityForm::Hole => PossibilityForm::Hole,
            NecessityForm::Implies(a, rest) => {
                PossibilityForm::And(a.clone(), Box::new(rest.dual()))
            }
            NecessityForm::Knows(agent, rest) => {
                PossibilityForm::Considers(agent.clone(), Box::new(rest.dual()))
            }
            NecessityForm::Announce(ann, rest) => {
                PossibilityForm::AnnounceDual(ann.clone(), Box::new(rest.dual()))
            }
        }
    }

    /// Number of spine elements above the hole.
    pub fn depth(&self) -> usize {
        match self {
            NecessityForm::Hole => 0,
            NecessityForm::Implies(_, rest)
            | NecessityForm::Knows(_, rest)
            | NecessityForm::Announce(_, rest) => 1 + rest.depth(),
        }
    }

    /// Decomposes `formula` as `self(filler)` for the deepest spine position
    /// at which `is_filler` accepts the subformula.
    pub fn decompose(
        formula: &Formula,
        is_filler: &dyn Fn(&Formula) -> bool,
    ) -> Option<(NecessityForm, Formula)> {
        let deeper = if let Some((a, rest)) = formula.as_implication() {
            NecessityForm::decompose(rest, is_filler)
                .map(|(form, fill)| (NecessityForm::implies(a.clone(), form), fill))
        } else {
            match formula {
                Formula::Knows(agent, rest) => NecessityForm::decompose(rest, is_filler)
                    .map(|(form, fill)| (NecessityForm::knows(agent.clone(), form), fill)),
                Formula::Announce(ann, rest) => NecessityForm::decompose(rest, is_filler)
                    .map(|(form, fill)| (NecessityForm::announce(ann.as_ref().clone(), form), fill)),
                _ => None,
            }
        };
        deeper.or_else(|| is_filler(formula).then(|| (NecessityForm::Hole, formula.clone())))
    }
}

impl PossibilityForm {
    pub fn instantiate(&self, filler: Formula) -> Formula {
        match self {
            PossibilityForm::Hole => filler,
            PossibilityForm::And(a, rest) => a.clone().and(rest.instantiate(filler)),
            PossibilityForm::Considers(agent, rest) => {
                Formula::considers(agent.clone(), rest.instantiate(filler))
            }
            PossibilityForm::AnnounceDual(ann, rest) => {
                Formula::announce_dual(ann.clone(), rest.instantiate(filler))
            }
        }
    }
}

pub fn nf_instantiate(form: &NecessityForm, filler: Formula) -> Formula {
    form.instantiate(filler)
}

pub fn nf_dual(form: &NecessityForm) -> PossibilityForm {
    form.dual()
}

pub fn pf_instantiate(form: &PossibilityForm, filler: Formula) -> Formula {
    form.instantiate(filler)
}
