//! Model checking on finite models, with the arbitrary boolean announcement
//! box evaluated over definable extensions.

use std::collections::HashMap;

use thiserror::Error;

use crate::models::{unions_of_classes, FiniteModel, ModelError, StateSet, DEFAULT_CLASS_CAP};
use crate::syntax::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum McError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown state `{0}`")]
    UnknownState(String),
}

/// Evaluates formulas on submodels of one model. Submodels are identified by
/// their domain mask, so announcements never build new models.
pub struct Checker<'m> {
    model: &'m FiniteModel,
    cap: usize,
    memo: HashMap<(StateSet, *const Formula), StateSet>,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m FiniteModel) -> Checker<'m> {
        Checker::with_cap(model, DEFAULT_CLASS_CAP)
    }

    pub fn with_cap(model: &'m FiniteModel, cap: usize) -> Checker<'m> {
        Checker {
            model,
            cap,
            memo: HashMap::new(),
        }
    }

    pub fn model(&self) -> &FiniteModel {
        self.model
    }

    /// The states of the submodel with domain `mask` where `formula` holds.
    /// The memo is keyed by the formula's address, so it is only valid while
    /// the formulas passed in stay alive and unmodified; [`Checker::clear`]
    /// resets it.
    pub fn extension_within(
        &mut self,
        mask: StateSet,
        formula: &Formula,
    ) -> Result<StateSet, ModelError> {
        let key = (mask, formula as *const Formula);
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let result = match formula {
            Formula::Top => mask,
            Formula::Atom(p) => self.model.atom_extension(p) & mask,
            Formula::Not(f) => mask - self.extension_within(mask, f)?,
            Formula::And(l, r) => {
                let left = self.extension_within(mask, l)?;
                left & self.extension_within(mask, r)?
            }
            Formula::Knows(agent, f) => {
                let inner = self.extension_within(mask, f)?;
                match self.model.agent_index(agent) {
                    Some(a) => {
                        let mut out = StateSet::EMPTY;
                        for class in self.model.partition(a) {
                            let here = *class & mask;
                            if here.is_subset(inner) {
                                out |= here;
                            }
                        }
                        out
                    }
                    None => inner,
                }
            }
            Formula::Announce(ann, body) => {
                let kept = self.extension_within(mask, ann)?;
                if kept.is_empty() {
                    mask
                } else {
                    (mask - kept) | self.extension_within(kept, body)?
                }
            }
            Formula::Arb(body) => {
                let classes = self.model.valuation_classes_within(mask);
                let mut out = mask;
                for u in unions_of_classes(&classes, None, self.cap)? {
                    out = out - (u - self.extension_within(u, body)?);
                    if out.is_empty() {
                        break;
                    }
                }
                out
            }
        };
        self.memo.insert(key, result);
        Ok(result)
    }

    pub fn extension(&mut self, formula: &Formula) -> Result<StateSet, ModelError> {
        self.extension_within(self.model.domain(), formula)
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }
}

/// `[[φ]]_M`.
pub fn extension(model: &FiniteModel, formula: &Formula) -> Result<StateSet, McError> {
    Ok(Checker::new(model).extension(formula)?)
}

pub fn extension_with_cap(
    model: &FiniteModel,
    formula: &Formula,
    cap: usize,
) -> Result<StateSet, McError> {
    Ok(Checker::with_cap(model, cap).extension(formula)?)
}

/// `M_s ⊨ φ`.
pub fn eval(model: &FiniteModel, s: usize, formula: &Formula) -> Result<bool, McError> {
    Ok(extension(model, formula)?.contains(s))
}

/// `M_s ⊨ φ` with the state given by name.
pub fn eval_named(model: &FiniteModel, state: &str, formula: &Formula) -> Result<bool, McError> {
    let s = model
        .state_index(state)
        .ok_or_else(|| McError::UnknownState(state.to_string()))?;
    eval(model, s, formula)
}

/// Whether `φ` holds at every state.
pub fn holds_everywhere(model: &FiniteModel, formula: &Formula) -> Result<bool, McError> {
    Ok(extension(model, formula)? == model.domain())
}

/// Evaluates `A ψ` at `s` by trying every boolean in full disjunctive normal
/// form over the signature with at most `k` disjuncts, and checking `[β]ψ`.
/// With `k >= 2^|signature|` every denotation is covered.
pub fn eval_box_by_boolean_sweep(
    model: &FiniteModel,
    s: usize,
    body: &Formula,
    k: usize,
) -> Result<bool, McError> {
    let atoms = model.atoms();
    assert!(atoms.len() < 16, "boolean sweep needs a small signature");
    let minterms: Vec<Formula> = (0u32..1 << atoms.len())
        .map(|bits| {
            Formula::conjunction(atoms.iter().enumerate().map(|(i, p)| {
                let lit = Formula::atom(p.clone());
                if bits >> i & 1 == 1 {
                    lit
                } else {
                    lit.not()
                }
            }))
        })
        .collect();
    let mut chosen = Vec::new();
    sweep(model, s, body, &minterms, 0, k, &mut chosen)
}

fn sweep(
    model: &FiniteModel,
    s: usize,
    body: &Formula,
    minterms: &[Formula],
    from: usize,
    budget: usize,
    chosen: &mut Vec<usize>,
) -> Result<bool, McError> {
    if !chosen.is_empty() {
        let beta = Formula::disjunction(chosen.iter().map(|&i| minterms[i].clone()));
        if !eval(model, s, &Formula::announce(beta, body.clone()))? {
            return Ok(false);
        }
    }
    if budget == 0 {
        return Ok(true);
    }
    for i in from..minterms.len() {
        chosen.push(i);
        let ok = sweep(model, s, body, minterms, i + 1, budget - 1, chosen)?;
        chosen.pop();
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn distinguishing_formula() {
        let phi = f("E (K a p & ~K b K a p)");
        assert!(!eval(&fixtures::model_m(), 0, &phi).unwrap());
        assert!(eval_named(&fixtures::model_mprime(), "sprime", &phi).unwrap());
        assert!(eval_named(&fixtures::model_mprime(), "sprime", &f("<q> (K a p & ~K b K a p)")).unwrap());
    }

    #[test]
    fn extension_of_q() {
        let mp = fixtures::model_mprime();
        let ext = extension(&mp, &f("q")).unwrap();
        assert_eq!(mp.state_names(ext), ["sprime", "uprime", "vprime"]);
        assert_eq!(extension(&mp, &Formula::Top).unwrap(), mp.domain());
    }

    #[test]
    fn box_top_everywhere() {
        for m in [fixtures::model_m(), fixtures::model_mprime()] {
            assert!(holds_everywhere(&m, &f("A T")).unwrap());
        }
    }

    #[test]
    fn vacuous_announcement() {
        let m = fixtures::model_m();
        assert!(eval(&m, 1, &f("[p] F")).unwrap());
        assert!(!eval(&m, 0, &f("[p] F")).unwrap());
    }

    #[test]
    fn box_can_refute_by_announcement() {
        let mp = fixtures::model_mprime();
        let phi = f("A ~K a p");
        let t = mp.state_index("tprime").unwrap();
        assert_eq!(
            eval(&mp, t, &phi).unwrap(),
            eval_box_by_boolean_sweep(&mp, t, &f("~K a p"), 4).unwrap()
        );
        assert!(!eval(&mp, 0, &f("A ~K a p")).unwrap());
        assert!(!eval_box_by_boolean_sweep(&mp, 0, &f("~K a p"), 4).unwrap());
    }

    #[test]
    fn class_cap_is_reported() {
        let mp = fixtures::model_mprime();
        assert!(matches!(
            extension_with_cap(&mp, &f("A p"), 1),
            Err(McError::Model(ModelError::ClassCapExceeded { .. }))
        ));
    }

    #[test]
    fn unknown_agent_knows_the_actual_state() {
        let m = fixtures::model_m();
        assert!(eval(&m, 0, &f("K c p")).unwrap());
    }
}
