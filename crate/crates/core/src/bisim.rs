//! Bisimulation, n-bisimulation and bisimulation contraction.

use std::collections::{BTreeSet, HashMap};

use crate::models::{FiniteModel, StateSet};

/// A relation between the states of two models, as index pairs.
pub type Relation = Vec<(usize, usize)>;

fn default_atoms(m: &FiniteModel, n: &FiniteModel) -> BTreeSet<String> {
    m.atoms().iter().chain(n.atoms()).cloned().collect()
}

fn union_agents(m: &FiniteModel, n: &FiniteModel) -> Vec<String> {
    let mut agents: BTreeSet<String> = m.agents().iter().cloned().collect();
    agents.extend(n.agents().iter().cloned());
    agents.into_iter().collect()
}

fn q_key(model: &FiniteModel, s: usize, atoms: &BTreeSet<String>) -> Vec<bool> {
    atoms
        .iter()
        .map(|p| model.atom_extension(p).contains(s))
        .collect()
}

/// The largest Q-bisimulation between `m` and `n`, computed by partition
/// refinement on their disjoint union. `atoms` defaults to the union of both
/// signatures.
pub fn maximal_bisimulation(
    m: &FiniteModel,
    n: &FiniteModel,
    atoms: Option<&BTreeSet<String>>,
) -> Relation {
    let q = atoms.cloned().unwrap_or_else(|| default_atoms(m, n));
    let agents = union_agents(m, n);
    let block = refine(&[m, n], &q, &agents);
    let offset = m.num_states();
    let mut rel = Vec::new();
    for s in 0..m.num_states() {
        for t in 0..n.num_states() {
            if block[s] == block[offset + t] {
                rel.push((s, t));
            }
        }
    }
    rel
}

/// Stable partition of the disjoint union of `models`, returned as one block
/// id per state in concatenation order.
fn refine(models: &[&FiniteModel], atoms: &BTreeSet<String>, agents: &[String]) -> Vec<usize> {
    let mut states = Vec::new();
    for (mi, model) in models.iter().enumerate() {
        for s in 0..model.num_states() {
            states.push((mi, s));
        }
    }
    let offsets: Vec<usize> = models
        .iter()
        .scan(0, |acc, m| {
            let start = *acc;
            *acc += m.num_states();
            Some(start)
        })
        .collect();
    let mut block = renumber(
        states
            .iter()
            .map(|&(mi, s)| q_key(models[mi], s, atoms)),
    );
    let mut count = block.iter().max().map_or(0, |b| b + 1);
    loop {
        let signatures = states.iter().map(|&(mi, s)| {
            let model = models[mi];
            let mut sig = vec![block[offsets[mi] + s]];
            for agent in agents {
                let reach: BTreeSet<usize> = model
                    .class_for(agent, s)
                    .iter()
                    .map(|t| block[offsets[mi] + t])
                    .collect();
                sig.push(usize::MAX);
                sig.extend(reach);
            }
            sig
        });
        let next = renumber(signatures);
        let next_count = next.iter().max().map_or(0, |b| b + 1);
        block = next;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

fn renumber<K: std::hash::Hash + Eq, I: Iterator<Item = K>>(keys: I) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

/// Whether `m_s` and `n_t` are Q-bisimilar; on success returns the maximal
/// bisimulation as witness.
pub fn bisimilar(
    m: &FiniteModel,
    s: usize,
    n: &FiniteModel,
    t: usize,
    atoms: Option<&BTreeSet<String>>,
) -> Option<Relation> {
    let rel = maximal_bisimulation(m, n, atoms);
    rel.contains(&(s, t)).then_some(rel)
}

/// Checks atoms, forth and back for every pair of `relation`.
pub fn is_bisimulation(
    m: &FiniteModel,
    n: &FiniteModel,
    relation: &[(usize, usize)],
    atoms: Option<&BTreeSet<String>>,
) -> bool {
    let q = atoms.cloned().unwrap_or_else(|| default_atoms(m, n));
    let agents = union_agents(m, n);
    let related: BTreeSet<(usize, usize)> = relation.iter().copied().collect();
    related.iter().all(|&(s, t)| {
        q_key(m, s, &q) == q_key(n, t, &q)
            && agents.iter().all(|a| {
                let forth = m
                    .class_for(a, s)
                    .iter()
                    .all(|s2| n.class_for(a, t).iter().any(|t2| related.contains(&(s2, t2))));
                let back = n
                    .class_for(a, t)
                    .iter()
                    .all(|t2| m.class_for(a, s).iter().any(|s2| related.contains(&(s2, t2))));
                forth && back
            })
    })
}

/// Whether `m_s` and `n_t` are n-bisimilar, following the inductive
/// definition level by level.
pub fn n_bisimilar(
    m: &FiniteModel,
    s: usize,
    n: &FiniteModel,
    t: usize,
    depth: usize,
    atoms: Option<&BTreeSet<String>>,
) -> bool {
    n_bisimulation_levels(m, n, depth, atoms)[depth][s].contains(t)
}

/// `levels[k][s]` is the set of states of `n` that are k-bisimilar to state
/// `s` of `m`, for `k` in `0..=depth`.
pub fn n_bisimulation_levels(
    m: &FiniteModel,
    n: &FiniteModel,
    depth: usize,
    atoms: Option<&BTreeSet<String>>,
) -> Vec<Vec<StateSet>> {
    let q = atoms.cloned().unwrap_or_else(|| default_atoms(m, n));
    let agents = union_agents(m, n);
    let base: Vec<StateSet> = (0..m.num_states())
        .map(|s| {
            let key = q_key(m, s, &q);
            (0..n.num_states())
                .filter(|&t| q_key(n, t, &q) == key)
                .collect()
        })
        .collect();
    let mut levels = vec![base.clone()];
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let next: Vec<StateSet> = (0..m.num_states())
            .map(|s| {
                base[s]
                    .iter()
                    .filter(|&t| {
                        agents.iter().all(|a| {
                            let ms = m.class_for(a, s);
                            let nt = n.class_for(a, t);
                            let forth = ms.iter().all(|s2| prev[s2].intersects(nt));
                            let back = nt.iter().all(|t2| ms.iter().any(|s2| prev[s2].contains(t2)));
                            forth && back
                        })
                    })
                    .collect()
            })
            .collect();
        levels.push(next);
    }
    levels
}

/// A bisimulation contraction together with the class of each original
/// state.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub model: FiniteModel,
    pub class_of: Vec<usize>,
}

/// Merges states related by the maximal autobisimulation. Each class is named
/// after its first member.
pub fn quotient(m: &FiniteModel) -> Quotient {
    let atoms: BTreeSet<String> = m.atoms().iter().cloned().collect();
    let block = refine(&[m], &atoms, m.agents());
    let count = block.iter().max().map_or(0, |b| b + 1);
    let mut reps = vec![usize::MAX; count];
    for (s, &b) in block.iter().enumerate() {
        if reps[b] == usize::MAX {
            reps[b] = s;
        }
    }
    let states = reps.iter().map(|&r| m.state_name(r).to_string()).collect();
    let labels: Vec<Vec<usize>> = (0..m.agents().len())
        .map(|a| {
            let keys = reps.iter().map(|&r| {
                m.agent_class(a, r)
                    .iter()
                    .map(|t| block[t])
                    .collect::<BTreeSet<_>>()
            });
            renumber(keys)
        })
        .collect();
    let valuation = (0..m.atoms().len())
        .map(|p| {
            reps.iter()
                .enumerate()
                .filter(|(_, &r)| m.valuation(p).contains(r))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let model = FiniteModel::from_labels(
        m.atoms().to_vec(),
        m.agents().to_vec(),
        states,
        &labels,
        valuation,
        m.designated().map(|d| block[d]),
    )
    .expect("contraction of a valid model is valid");
    Quotient {
        model,
        class_of: block,
    }
}

/// Assigns canonical ids to bounded-depth bisimulation signatures so that
/// states of different models (and submodels) can be compared by id.
/// Two states receive the same id after `k` rounds iff they are
/// k-bisimilar over the interner's atoms and agents.
#[derive(Debug, Default)]
pub struct SignatureInterner {
    atoms: Vec<String>,
    agents: Vec<String>,
    table: HashMap<Vec<u32>, u32>,
}

impl SignatureInterner {
    pub fn new(atoms: Vec<String>, agents: Vec<String>) -> SignatureInterner {
        SignatureInterner {
            atoms,
            agents,
            table: HashMap::new(),
        }
    }

    fn intern(&mut self, sig: Vec<u32>) -> u32 {
        let next = self.table.len() as u32;
        *self.table.entry(sig).or_insert(next)
    }

    /// Round-`rounds` ids of the states of the submodel of `model` with domain
    /// `mask`. Entries for states outside `mask` are unspecified.
    pub fn keys(&mut self, model: &FiniteModel, mask: StateSet, rounds: usize) -> Vec<u32> {
        let n = model.num_states();
        let atom_sets: Vec<StateSet> = self.atoms.iter().map(|p| model.atom_extension(p)).collect();
        let classes: Vec<Vec<StateSet>> = self
            .agents
            .iter()
            .map(|a| (0..n).map(|s| model.class_for(a, s) & mask).collect())
            .collect();
        let mut key = vec![0u32; n];
        for s in mask.iter() {
            let mut sig = vec![0u32];
            sig.extend(atom_sets.iter().map(|v| v.contains(s) as u32));
            key[s] = self.intern(sig);
        }
        for round in 1..=rounds {
            let mut next = vec![0u32; n];
            for s in mask.iter() {
                let mut sig = vec![round as u32, key[s]];
                for agent_classes in &classes {
                    let mut reach: Vec<u32> = agent_classes[s].iter().map(|t| key[t]).collect();
                    reach.sort_unstable();
                    reach.dedup();
                    sig.push(u32::MAX);
                    sig.extend(reach);
                }
                next[s] = self.intern(sig);
            }
            key = next;
        }
        key
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn atoms(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn self_bisimilar() {
        let m = fixtures::model_mprime();
        for s in 0..m.num_states() {
            assert!(bisimilar(&m, s, &m, s, None).is_some());
        }
    }

    #[test]
    fn m_and_mprime_differ_only_in_q() {
        let m = fixtures::model_m();
        let mp = fixtures::model_mprime();
        let rel = bisimilar(&m, 0, &mp, 0, Some(&atoms(&["p"]))).unwrap();
        assert!(is_bisimulation(&m, &mp, &rel, Some(&atoms(&["p"]))));
        assert!(bisimilar(&m, 0, &mp, 0, Some(&atoms(&["p", "q"]))).is_none());
    }

    #[test]
    fn m_and_chain_are_bisimilar() {
        let m = fixtures::model_m();
        let n = fixtures::n_chain(12);
        let rel = bisimilar(&m, 0, &n, n.designated().unwrap(), None).unwrap();
        assert!(is_bisimulation(&m, &n, &rel, None));
    }

    #[test]
    fn broken_relation_is_not_a_bisimulation() {
        let m = fixtures::model_m();
        assert!(!is_bisimulation(&m, &m, &[(0, 1)], None));
        assert!(!is_bisimulation(&m, &m, &[(0, 0)], None));
        assert!(is_bisimulation(&m, &m, &[(0, 0), (1, 1)], None));
    }

    #[test]
    fn zero_bisimilarity_is_valuation() {
        let mp = fixtures::model_mprime();
        assert!(n_bisimilar(&mp, 0, &mp, 2, 0, None));
        assert!(!n_bisimilar(&mp, 0, &mp, 1, 0, None));
    }

    #[test]
    fn duplicated_states_collapse() {
        let m = fixtures::model_m();
        let q = quotient(&m);
        assert_eq!(q.model.num_states(), 2);
        let doubled = FiniteModel::from_labels(
            vec!["p".into()],
            vec!["a".into()],
            vec!["x".into(), "y".into()],
            &[vec![0, 0]],
            vec![StateSet::full(2)],
            Some(1),
        )
        .unwrap();
        let q = quotient(&doubled);
        assert_eq!(q.model.states(), ["x"]);
        assert_eq!(q.model.designated(), Some(0));
        let again = quotient(&q.model);
        assert_eq!(again.model, q.model);
    }

    #[test]
    fn interned_keys_match_refinement() {
        let m = fixtures::model_m();
        let n = fixtures::n_chain(8);
        let mut interner = SignatureInterner::new(vec!["p".into()], vec!["a".into(), "b".into()]);
        let rounds = m.num_states() + n.num_states();
        let km = interner.keys(&m, m.domain(), rounds);
        let kn = interner.keys(&n, n.domain(), rounds);
        for s in 0..m.num_states() {
            for t in 0..n.num_states() {
                assert_eq!(km[s] == kn[t], bisimilar(&m, s, &n, t, None).is_some());
            }
        }
    }
}
