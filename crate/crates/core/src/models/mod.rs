//! Finite multi-agent S5 models over a declared atom signature.

mod json;
mod set;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::Formula;

pub use json::ModelSpec;
pub use set::{StateSet, MAX_STATES};

/// Default bound on the number of valuation classes over which boolean
/// announcements are enumerated.
pub const DEFAULT_CLASS_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Error)]
pub enum ModelViolation {
    #[error("model has no states")]
    NoStates,
    #[error("model has {0} states, more than the supported {MAX_STATES}")]
    TooManyStates(usize),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("invalid {kind} name `{name}`")]
    InvalidName { kind: &'static str, name: String },
    #[error("partition given for undeclared agent `{0}`")]
    UnknownAgent(String),
    #[error("no partition for agent `{0}`")]
    MissingPartition(String),
    #[error("partition of `{agent}` mentions unknown state `{state}`")]
    UnknownStateInPartition { agent: String, state: String },
    #[error("partition not covering: state `{state}` is in no class of `{agent}`")]
    PartitionNotCovering { agent: String, state: String },
    #[error("partition of `{agent}` places state `{state}` in more than one class")]
    PartitionOverlap { agent: String, state: String },
    #[error("partition of `{agent}` has an empty class")]
    EmptyClass { agent: String },
    #[error("valuation given for atom `{0}` outside the signature")]
    UnknownAtom(String),
    #[error("valuation of `{atom}` mentions unknown state `{state}`")]
    UnknownStateInValuation { atom: String, state: String },
    #[error("designated state `{0}` is not a state of the model")]
    UnknownDesignated(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("cannot restrict a model to the empty set")]
    EmptyRestriction,
    #[error("{classes} valuation classes exceed the cap of {cap}")]
    ClassCapExceeded { classes: usize, cap: usize },
    #[error("closure atom `{0}` has no mapping")]
    UnmappedClosureAtom(String),
    #[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ModelViolation>),
}

/// A finite epistemic model `(S, ~, V)` with an optional designated state.
/// States, atoms and agents are addressed by their index in the declared
/// ordered lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModel {
    atoms: Vec<String>,
    agents: Vec<String>,
    states: Vec<String>,
    partitions: Vec<Vec<StateSet>>,
    class_of: Vec<Vec<usize>>,
    valuation: Vec<StateSet>,
    designated: Option<usize>,
}

impl FiniteModel {
    /// Builds a model from index-level data. `partitions[i]` is the list of
    /// classes of `agents[i]`, `valuation[j]` the denotation of `atoms[j]`.
    pub fn from_parts(
        atoms: Vec<String>,
        agents: Vec<String>,
        states: Vec<String>,
        partitions: Vec<Vec<StateSet>>,
        valuation: Vec<StateSet>,
        designated: Option<usize>,
    ) -> Result<FiniteModel, Vec<ModelViolation>> {
        let mut errors = Vec::new();
        let n = states.len();
        if n == 0 {
            errors.push(ModelViolation::NoStates);
        }
        if n > MAX_STATES {
            errors.push(ModelViolation::TooManyStates(n));
            return Err(errors);
        }
        check_unique("state", &states, &mut errors);
        check_unique("atom", &atoms, &mut errors);
        check_unique("agent", &agents, &mut errors);
        let domain = StateSet::full(n);
        let mut class_of = Vec::with_capacity(agents.len());
        for (agent, classes) in agents.iter().zip(&partitions) {
            let mut owner = vec![usize::MAX; n];
            for (ci, class) in classes.iter().enumerate() {
                if class.is_empty() {
                    errors.push(ModelViolation::EmptyClass {
                        agent: agent.clone(),
                    });
                }
                for s in class.iter() {
                    if s >= n {
                        errors.push(ModelViolation::UnknownStateInPartition {
                            agent: agent.clone(),
                            state: format!("#{s}"),
                        });
                    } else if owner[s] != usize::MAX {
                        errors.push(ModelViolation::PartitionOverlap {
                            agent: agent.clone(),
                            state: states[s].clone(),
                        });
                    } else {
                        owner[s] = ci;
                    }
                }
            }
            for (s, o) in owner.iter().enumerate() {
                if *o == usize::MAX {
                    errors.push(ModelViolation::PartitionNotCovering {
                        agent: agent.clone(),
                        state: states[s].clone(),
                    });
                }
            }
            class_of.push(owner);
        }
        for agent in agents.iter().skip(partitions.len()) {
            errors.push(ModelViolation::MissingPartition(agent.clone()));
        }
        for (atom, set) in atoms.iter().zip(&valuation) {
            if !set.is_subset(domain) {
                errors.push(ModelViolation::UnknownStateInValuation {
                    atom: atom.clone(),
                    state: format!("#{}", (*set - domain).first().unwrap_or(0)),
                });
            }
        }
        let mut valuation = valuation;
        valuation.resize(atoms.len(), StateSet::EMPTY);
        if let Some(d) = designated {
            if d >= n {
                errors.push(ModelViolation::UnknownDesignated(format!("#{d}")));
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(FiniteModel {
            atoms,
            agents,
            states,
            partitions,
            class_of,
            valuation,
            designated,
        })
    }

    /// Builds a model from names, a per-agent label vector (`labels[i][s]` is
    /// the class index of state `s` for agent `i`) and the per-atom
    /// denotations.
    pub fn from_labels(
        atoms: Vec<String>,
        agents: Vec<String>,
        states: Vec<String>,
        labels: &[Vec<usize>],
        valuation: Vec<StateSet>,
        designated: Option<usize>,
    ) -> Result<FiniteModel, Vec<ModelViolation>> {
        let partitions = labels.iter().map(|l| partition_from_labels(l)).collect();
        FiniteModel::from_parts(atoms, agents, states, partitions, valuation, designated)
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn domain(&self) -> StateSet {
        StateSet::full(self.states.len())
    }

    pub fn designated(&self) -> Option<usize> {
        self.designated
    }

    pub fn with_designated(mut self, designated: Option<usize>) -> FiniteModel {
        assert!(designated.map_or(true, |d| d < self.states.len()));
        self.designated = designated;
        self
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|s| s == name)
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|s| s == name)
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_names(&self, set: StateSet) -> Vec<String> {
        set.iter().map(|s| self.states[s].clone()).collect()
    }

    pub fn partition(&self, agent: usize) -> &[StateSet] {
        &self.partitions[agent]
    }

    pub fn class_index(&self, agent: usize, s: usize) -> usize {
        self.class_of[agent][s]
    }

    /// The `~_agent` class of `s`.
    pub fn agent_class(&self, agent: usize, s: usize) -> StateSet {
        self.partitions[agent][self.class_of[agent][s]]
    }

    /// The `~_a` class of `s` for an agent given by name. Agents the model
    /// does not declare relate each state only to itself.
    pub fn class_for(&self, agent: &str, s: usize) -> StateSet {
        match self.agent_index(agent) {
            Some(i) => self.agent_class(i, s),
            None => StateSet::singleton(s),
        }
    }

    pub fn valuation(&self, atom: usize) -> StateSet {
        self.valuation[atom]
    }

    /// Denotation of an atom by name; empty outside the signature.
    pub fn atom_extension(&self, name: &str) -> StateSet {
        self.atom_index(name)
            .map_or(StateSet::EMPTY, |i| self.valuation[i])
    }

    /// The signature atoms true at `s`, as a bit vector over the signature.
    pub fn valuation_key(&self, s: usize) -> Vec<bool> {
        self.valuation.iter().map(|v| v.contains(s)).collect()
    }

    pub fn true_atoms(&self, s: usize) -> Vec<&str> {
        self.atoms
            .iter()
            .zip(&self.valuation)
            .filter(|(_, v)| v.contains(s))
            .map(|(a, _)| a.as_str())
            .collect()
    }

    /// Checks the model invariants.
    pub fn validate(&self) -> Result<(), Vec<ModelViolation>> {
        FiniteModel::from_parts(
            self.atoms.clone(),
            self.agents.clone(),
            self.states.clone(),
            self.partitions.clone(),
            self.valuation.clone(),
            self.designated,
        )
        .map(|_| ())
    }

    /// The submodel with domain `keep`, preserving declared orders.
    pub fn restrict(&self, keep: StateSet) -> Result<FiniteModel, ModelError> {
        let keep = keep & self.domain();
        if keep.is_empty() {
            return Err(ModelError::EmptyRestriction);
        }
        let old: Vec<usize> = keep.iter().collect();
        let mut new_index = vec![usize::MAX; self.num_states()];
        for (i, &s) in old.iter().enumerate() {
            new_index[s] = i;
        }
        let remap = |set: StateSet| -> StateSet { (set & keep).iter().map(|s| new_index[s]).collect() };
        let partitions = self
            .partitions
            .iter()
            .map(|classes| {
                classes
                    .iter()
                    .map(|c| remap(*c))
                    .filter(|c| !c.is_empty())
                    .collect()
            })
            .collect();
        let model = FiniteModel::from_parts(
            self.atoms.clone(),
            self.agents.clone(),
            old.iter().map(|&s| self.states[s].clone()).collect(),
            partitions,
            self.valuation.iter().map(|v| remap(*v)).collect(),
            self.designated
                .filter(|d| keep.contains(*d))
                .map(|d| new_index[d]),
        )
        .expect("restriction preserves model invariants");
        Ok(model)
    }

    /// States grouped by identical valuation over the signature, in order of
    /// first occurrence.
    pub fn valuation_classes(&self) -> Vec<StateSet> {
        self.valuation_classes_within(self.domain())
    }

    /// Valuation classes of the submodel with domain `mask`.
    pub fn valuation_classes_within(&self, mask: StateSet) -> Vec<StateSet> {
        let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut classes: Vec<StateSet> = Vec::new();
        for s in mask.iter() {
            let key = self.valuation_key(s);
            let next = classes.len();
            let ci = *index.entry(key).or_insert(next);
            if ci == classes.len() {
                classes.push(StateSet::EMPTY);
            }
            classes[ci].insert(s);
        }
        classes
    }

    /// All nonempty unions of valuation classes; with an anchor, only those
    /// containing the anchor. These are exactly the denotations of booleans
    /// over the signature.
    pub fn definable_extensions(
        &self,
        anchored_at: Option<usize>,
        cap: usize,
    ) -> Result<Vec<StateSet>, ModelError> {
        self.definable_extensions_within(self.domain(), anchored_at, cap)
    }

    pub fn definable_extensions_within(
        &self,
        mask: StateSet,
        anchored_at: Option<usize>,
        cap: usize,
    ) -> Result<Vec<StateSet>, ModelError> {
        let classes = self.valuation_classes_within(mask);
        unions_of_classes(&classes, anchored_at, cap)
    }

    /// A boolean over the signature true exactly at the states of `set`: the
    /// disjunction of the characteristic conjunctions of its valuation
    /// classes.
    pub fn characteristic_boolean(&self, set: StateSet) -> Formula {
        let mut seen = BTreeSet::new();
        let mut disjuncts = Vec::new();
        for s in set.iter() {
            if seen.insert(self.valuation_key(s)) {
                disjuncts.push(self.characteristic_conjunction(s));
            }
        }
        Formula::disjunction(disjuncts)
    }

    /// Conjunction of the signature literals true at `s`.
    pub fn characteristic_conjunction(&self, s: usize) -> Formula {
        Formula::conjunction(self.atoms.iter().zip(&self.valuation).map(|(a, v)| {
            if v.contains(s) {
                Formula::atom(a.clone())
            } else {
                Formula::atom(a.clone()).not()
            }
        }))
    }

    /// Adds one fresh atom per definable extension.
    pub fn boolean_closure(&self, cap: usize) -> Result<BooleanClosure, ModelError> {
        let extensions = self.definable_extensions(None, cap)?;
        let mut taken: BTreeSet<String> = self.atoms.iter().cloned().collect();
        let mut atoms = self.atoms.clone();
        let mut valuation = self.valuation.clone();
        let mut mapping = BTreeMap::new();
        for ext in extensions {
            let name = fresh_atom(CLOSURE_PREFIX, &mut taken);
            atoms.push(name.clone());
            valuation.push(ext);
            mapping.insert(
                name,
                ClosureAtom {
                    extension: ext,
                    boolean: self.characteristic_boolean(ext),
                },
            );
        }
        let model = FiniteModel::from_parts(
            atoms,
            self.agents.clone(),
            self.states.clone(),
            self.partitions.clone(),
            valuation,
            self.designated,
        )
        .map_err(ModelError::Invalid)?;
        Ok(BooleanClosure {
            model,
            base_atoms: self.atoms.iter().cloned().collect(),
            mapping,
        })
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec::from_model(self)
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, name) in self.states.iter().enumerate() {
            let mark = if self.designated == Some(s) { "*" } else { " " };
            writeln!(f, "{mark}{name} {{{}}}", self.true_atoms(s).join(","))?;
        }
        for (i, agent) in self.agents.iter().enumerate() {
            let classes: Vec<String> = self.partitions[i]
                .iter()
                .map(|c| format!("{{{}}}", self.state_names(*c).join(",")))
                .collect();
            writeln!(f, "{agent}: {}", classes.join(" "))?;
        }
        Ok(())
    }
}

/// All nonempty unions of the given disjoint classes, in binary counting
/// order; with an anchor, only those containing it.
pub fn unions_of_classes(
    classes: &[StateSet],
    anchored_at: Option<usize>,
    cap: usize,
) -> Result<Vec<StateSet>, ModelError> {
    let k = classes.len();
    if k > cap || k >= 64 {
        return Err(ModelError::ClassCapExceeded { classes: k, cap });
    }
    let anchor_class = anchored_at.map(|s| classes.iter().position(|c| c.contains(s)));
    let mut out = Vec::new();
    for bits in 1u64..(1u64 << k) {
        if let Some(anchor) = anchor_class {
            match anchor {
                Some(ci) if bits >> ci & 1 == 1 => {}
                _ => continue,
            }
        }
        let mut set = StateSet::EMPTY;
        for (ci, c) in classes.iter().enumerate() {
            if bits >> ci & 1 == 1 {
                set |= *c;
            }
        }
        out.push(set);
    }
    Ok(out)
}

/// Groups indices by label into classes ordered by first occurrence.
pub fn partition_from_labels(labels: &[usize]) -> Vec<StateSet> {
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<StateSet> = Vec::new();
    for (s, l) in labels.iter().enumerate() {
        let next = classes.len();
        let ci = *index.entry(*l).or_insert(next);
        if ci == classes.len() {
            classes.push(StateSet::EMPTY);
        }
        classes[ci].insert(s);
    }
    classes
}

/// Returns `prefix{i}` for the least `i` not yet taken, and marks it taken.
pub fn fresh_atom(prefix: &str, taken: &mut BTreeSet<String>) -> String {
    let mut i = 0;
    loop {
        let name = format!("{prefix}{i}");
        if taken.insert(name.clone()) {
            return name;
        }
        i += 1;
    }
}

const CLOSURE_PREFIX: &str = "bc";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureAtom {
    pub extension: StateSet,
    /// A boolean over the base signature denoting `extension`.
    pub boolean: Formula,
}

/// A model extended by one atom per definable extension.
#[derive(Clone, Debug)]
pub struct BooleanClosure {
    pub model: FiniteModel,
    pub base_atoms: BTreeSet<String>,
    pub mapping: BTreeMap<String, ClosureAtom>,
}

impl BooleanClosure {
    /// Replaces each closure atom by its representative boolean.
    pub fn tr_translate(&self, formula: &Formula) -> Result<Formula, ModelError> {
        let mut unmapped = None;
        for p in formula.vars() {
            if !self.mapping.contains_key(&p) && self.is_closure_name(&p) {
                unmapped = Some(p);
            }
        }
        if let Some(p) = unmapped {
            return Err(ModelError::UnmappedClosureAtom(p));
        }
        Ok(formula.map_atoms(&|p| match self.mapping.get(p) {
            Some(entry) => entry.boolean.clone(),
            None => Formula::atom(p),
        }))
    }

    fn is_closure_name(&self, p: &str) -> bool {
        !self.base_atoms.contains(p)
            && p.strip_prefix(CLOSURE_PREFIX)
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
    }
}

fn check_unique(kind: &'static str, names: &[String], errors: &mut Vec<ModelViolation>) {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            errors.push(ModelViolation::Duplicate {
                kind,
                name: name.clone(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(items: &[usize]) -> StateSet {
        items.iter().copied().collect()
    }

    #[test]
    fn paper_model_is_valid() {
        let m = fixtures::model_m();
        assert!(m.validate().is_ok());
        assert_eq!(m.valuation_classes(), vec![set(&[0]), set(&[1])]);
    }

    #[test]
    fn missing_state_in_partition_is_reported() {
        let err = FiniteModel::from_parts(
            vec!["p".into()],
            vec!["a".into()],
            vec!["s".into(), "t".into()],
            vec![vec![set(&[0])]],
            vec![set(&[0])],
            None,
        )
        .unwrap_err();
        assert!(err
            .iter()
            .any(|v| v.to_string().contains("partition not covering")));
    }

    #[test]
    fn anchored_extensions() {
        let m = fixtures::model_m();
        let ext = m.definable_extensions(Some(0), DEFAULT_CLASS_CAP).unwrap();
        assert_eq!(ext, vec![set(&[0]), set(&[0, 1])]);
        assert_eq!(m.definable_extensions(None, DEFAULT_CLASS_CAP).unwrap().len(), 3);
        assert!(matches!(
            m.definable_extensions(None, 1),
            Err(ModelError::ClassCapExceeded { classes: 2, cap: 1 })
        ));
    }

    #[test]
    fn single_class_model() {
        let m = FiniteModel::from_labels(
            vec!["p".into()],
            vec!["a".into()],
            vec!["x".into(), "y".into()],
            &[vec![0, 1]],
            vec![set(&[0, 1])],
            None,
        )
        .unwrap();
        assert_eq!(m.valuation_classes().len(), 1);
        assert_eq!(m.definable_extensions(None, 20).unwrap(), vec![set(&[0, 1])]);
    }

    #[test]
    fn restriction() {
        let m = fixtures::model_mprime();
        let q = m.atom_extension("q");
        let r = m.restrict(q).unwrap();
        assert_eq!(r.states(), ["sprime", "uprime", "vprime"]);
        assert!(r.validate().is_ok());
        assert_eq!(r.designated(), Some(0));
        assert_eq!(m.restrict(m.domain()).unwrap(), m);
        assert_eq!(m.restrict(StateSet::EMPTY), Err(ModelError::EmptyRestriction));
        let drop_designated = m.restrict(set(&[1, 2])).unwrap();
        assert_eq!(drop_designated.designated(), None);
    }

    #[test]
    fn boolean_closure_of_m() {
        let m = fixtures::model_m();
        let bc = m.boolean_closure(DEFAULT_CLASS_CAP).unwrap();
        assert_eq!(bc.mapping.len(), 3);
        assert_eq!(bc.model.atoms().len(), 4);
        let exts: Vec<StateSet> = bc.mapping.values().map(|c| c.extension).collect();
        assert_eq!(exts, vec![set(&[0]), set(&[1]), set(&[0, 1])]);
        let first = bc.mapping.keys().next().unwrap().clone();
        assert_eq!(
            bc.tr_translate(&Formula::atom(first)).unwrap(),
            Formula::atom("p")
        );
        assert_eq!(bc.tr_translate(&Formula::atom("p")).unwrap(), Formula::atom("p"));
        assert!(bc.tr_translate(&Formula::atom("bc17")).is_err());
    }

    #[test]
    fn unknown_agent_is_identity() {
        let m = fixtures::model_m();
        assert_eq!(m.class_for("c", 0), set(&[0]));
        assert_eq!(m.class_for("a", 0), set(&[0, 1]));
    }
}
