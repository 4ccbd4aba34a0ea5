use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{FiniteModel, ModelError, ModelViolation, StateSet, MAX_STATES};

/// The JSON model file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub atoms: Vec<String>,
    pub agents: Vec<String>,
    pub states: Vec<String>,
    pub partitions: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<String>,
}

fn is_identifier(name: &str) -> bool {
    let mut bytes = name.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<ModelSpec, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model spec serializes")
    }

    /// Lists every violated invariant; empty when the spec describes a model.
    pub fn validate(&self) -> Vec<ModelViolation> {
        match self.build_parts() {
            Ok(parts) => match parts.finish() {
                Ok(_) => Vec::new(),
                Err(errors) => errors,
            },
            Err(errors) => errors,
        }
    }

    pub fn to_model(&self) -> Result<FiniteModel, ModelError> {
        self.build_parts()
            .and_then(Parts::finish)
            .map_err(ModelError::Invalid)
    }

    fn build_parts(&self) -> Result<Parts<'_>, Vec<ModelViolation>> {
        let mut errors = Vec::new();
        if self.states.len() > MAX_STATES {
            return Err(vec![ModelViolation::TooManyStates(self.states.len())]);
        }
        for (kind, names) in [("atom", &self.atoms), ("agent", &self.agents)] {
            for name in names {
                if !is_identifier(name) {
                    errors.push(ModelViolation::InvalidName {
                        kind,
                        name: name.clone(),
                    });
                }
            }
        }
        let index: HashMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        for agent in self.partitions.keys() {
            if !self.agents.contains(agent) {
                errors.push(ModelViolation::UnknownAgent(agent.clone()));
            }
        }
        let mut partitions = Vec::new();
        for agent in &self.agents {
            let Some(classes) = self.partitions.get(agent) else {
                errors.push(ModelViolation::MissingPartition(agent.clone()));
                partitions.push(vec![StateSet::full(self.states.len())]);
                continue;
            };
            let mut sets = Vec::new();
            for class in classes {
                let mut set = StateSet::EMPTY;
                for state in class {
                    match index.get(state.as_str()) {
                        Some(&i) if set.contains(i) => {
                            errors.push(ModelViolation::PartitionOverlap {
                                agent: agent.clone(),
                                state: state.clone(),
                            });
                        }
                        Some(&i) => set.insert(i),
                        None => errors.push(ModelViolation::UnknownStateInPartition {
                            agent: agent.clone(),
                            state: state.clone(),
                        }),
                    }
                }
                sets.push(set);
            }
            partitions.push(sets);
        }
        for atom in self.valuation.keys() {
            if !self.atoms.contains(atom) {
                errors.push(ModelViolation::UnknownAtom(atom.clone()));
            }
        }
        let mut valuation = Vec::new();
        for atom in &self.atoms {
            let mut set = StateSet::EMPTY;
            for state in self.valuation.get(atom).into_iter().flatten() {
                match index.get(state.as_str()) {
                    Some(&i) => set.insert(i),
                    None => errors.push(ModelViolation::UnknownStateInValuation {
                        atom: atom.clone(),
                        state: state.clone(),
                    }),
                }
            }
            valuation.push(set);
        }
        let designated = match &self.designated {
            Some(d) => match index.get(d.as_str()) {
                Some(&i) => Some(i),
                None => {
                    errors.push(ModelViolation::UnknownDesignated(d.clone()));
                    None
                }
            },
            None => None,
        };
        let parts = Parts {
            spec: self,
            partitions,
            valuation,
            designated,
        };
        if errors.is_empty() {
            return Ok(parts);
        }
        if let Err(more) = parts.finish() {
            for v in more {
                if !errors.contains(&v) {
                    errors.push(v);
                }
            }
        }
        Err(errors)
    }

    pub fn from_model(model: &FiniteModel) -> ModelSpec {
        let partitions = model
            .agents()
            .iter()
            .enumerate()
            .map(|(i, agent)| {
                let classes = model
                    .partition(i)
                    .iter()
                    .map(|c| model.state_names(*c))
                    .collect();
                (agent.clone(), classes)
            })
            .collect();
        let valuation = model
            .atoms()
            .iter()
            .enumerate()
            .map(|(i, atom)| (atom.clone(), model.state_names(model.valuation(i))))
            .collect();
        ModelSpec {
            atoms: model.atoms().to_vec(),
            agents: model.agents().to_vec(),
            states: model.states().to_vec(),
            partitions,
            valuation,
            designated: model.designated().map(|d| model.state_name(d).to_string()),
        }
    }
}

struct Parts<'a> {
    spec: &'a ModelSpec,
    partitions: Vec<Vec<StateSet>>,
    valuation: Vec<StateSet>,
    designated: Option<usize>,
}

impl Parts<'_> {
    fn finish(self) -> Result<FiniteModel, Vec<ModelViolation>> {
        FiniteModel::from_parts(
            self.spec.atoms.clone(),
            self.spec.agents.clone(),
            self.spec.states.clone(),
            self.partitions,
            self.valuation,
            self.designated,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: &str = r#"{
        "atoms": ["p"],
        "agents": ["a", "b"],
        "states": ["s", "t"],
        "partitions": {"a": [["s", "t"]], "b": [["s"], ["t"]]},
        "valuation": {"p": ["s"]},
        "designated": "s"
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let spec = ModelSpec::from_json(M).unwrap();
        assert!(spec.validate().is_empty());
        let model = spec.to_model().unwrap();
        assert_eq!(model.designated(), Some(0));
        assert_eq!(ModelSpec::from_model(&model), spec);
        assert_eq!(ModelSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = M.replace("\"designated\"", "\"extra\": 1, \"designated\"");
        assert!(ModelSpec::from_json(&text).is_err());
    }

    #[test]
    fn violations_are_named() {
        let mut spec = ModelSpec::from_json(M).unwrap();
        spec.valuation.insert("p".into(), vec!["s".into(), "w".into()]);
        spec.partitions.insert("b".into(), vec![vec!["s".into()]]);
        let v = spec.validate();
        assert!(v.contains(&ModelViolation::UnknownStateInValuation {
            atom: "p".into(),
            state: "w".into()
        }));
        assert!(v.contains(&ModelViolation::PartitionNotCovering {
            agent: "b".into(),
            state: "t".into()
        }));
        let mut spec = ModelSpec::from_json(M).unwrap();
        spec.designated = Some("u".into());
        assert_eq!(spec.validate(), vec![ModelViolation::UnknownDesignated("u".into())]);
    }
}
