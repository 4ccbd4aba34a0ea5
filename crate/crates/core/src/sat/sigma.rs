use std::collections::{BTreeSet, HashMap};

use crate::models::{fresh_atom, FiniteModel, StateSet};
use crate::syntax::Formula;

use super::closure::{Bits, Closure};
use super::SatError;

/// Default number of palette colors.
pub const DEFAULT_PALETTE: usize = 3;
/// Default bound on `|Σ|`.
pub const DEFAULT_SIGMA_CAP: usize = 64;

/// A maximal φ-set: a consistent choice of closure members (`part`) together
/// with a palette color standing in for the fresh atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaximalPhiSet {
    pub part: usize,
    pub color: usize,
}

/// The set `Σ_φ` together with the data needed to read its subsets as
/// models: agent profiles, witness obligations and valuations.
#[derive(Clone, Debug)]
pub struct SigmaSet {
    parts: Vec<Bits>,
    part_index: HashMap<Bits, usize>,
    elements: Vec<MaximalPhiSet>,
    var_atoms: Vec<String>,
    palette_atoms: Vec<String>,
    agents: Vec<String>,
    profile_masks: Vec<Vec<u64>>,
    witnesses: Vec<Vec<u64>>,
    valuation: Vec<u64>,
}

impl SigmaSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[MaximalPhiSet] {
        &self.elements
    }

    pub fn parts(&self) -> &[Bits] {
        &self.parts
    }

    pub fn palette(&self) -> usize {
        self.palette_atoms.len()
    }

    pub fn palette_atoms(&self) -> &[String] {
        &self.palette_atoms
    }

    pub fn var_atoms(&self) -> &[String] {
        &self.var_atoms
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    /// Whether closure member `member` belongs to element `e`.
    pub fn holds(&self, e: usize, member: usize) -> bool {
        self.parts[self.elements[e].part].get(member)
    }

    pub fn part_bits(&self, e: usize) -> &Bits {
        &self.parts[self.elements[e].part]
    }

    /// The element with the given part and color, if it is in `Σ`.
    pub fn find(&self, part: &Bits, color: usize) -> Option<usize> {
        let p = *self.part_index.get(part)?;
        (color < self.palette()).then(|| p * self.palette() + color)
    }

    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// Elements of `subset` that share `e`'s profile for agent `agent`.
    pub fn profile_mask(&self, agent: usize, e: usize) -> u64 {
        self.profile_masks[agent][e]
    }

    /// Valuation over the variables followed by the palette atoms, as bits.
    pub fn valuation_bits(&self, e: usize) -> u64 {
        self.valuation[e]
    }

    /// Whether every negated knowledge member of every element of `subset`
    /// has a witness inside `subset`.
    pub fn witnessed(&self, subset: u64) -> bool {
        iter_bits(subset).all(|e| self.witnesses[e].iter().all(|w| w & subset != 0))
    }

    pub fn witnessed_within(&self, e: usize, subset: u64) -> bool {
        self.witnesses[e].iter().all(|w| w & subset != 0)
    }

    /// Whether `subset` is connected through the agents' relations.
    pub fn connected(&self, subset: u64) -> bool {
        if subset == 0 {
            return false;
        }
        self.component(subset, subset.trailing_zeros() as usize) == subset
    }

    pub fn component(&self, subset: u64, start: usize) -> u64 {
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for e in iter_bits(frontier) {
                for masks in &self.profile_masks {
                    next |= masks[e] & subset;
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    /// The subset read as a model. States are named `s{e}` after their index
    /// in `Σ`.
    pub fn model(&self, subset: u64, designated: Option<usize>) -> FiniteModel {
        let members: Vec<usize> = iter_bits(subset).collect();
        let position = |e: usize| members.iter().position(|&m| m == e);
        let atoms: Vec<String> = self
            .var_atoms
            .iter()
            .chain(&self.palette_atoms)
            .cloned()
            .collect();
        let valuation = (0..atoms.len())
            .map(|i| {
                members
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| self.valuation[e] >> i & 1 == 1)
                    .map(|(k, _)| k)
                    .collect::<StateSet>()
            })
            .collect();
        let partitions = self
            .profile_masks
            .iter()
            .map(|masks| {
                let mut classes: Vec<StateSet> = Vec::new();
                let mut done = 0u64;
                for &e in &members {
                    if done >> e & 1 == 1 {
                        continue;
                    }
                    let class = masks[e] & subset;
                    done |= class;
                    classes.push(iter_bits(class).map(|f| position(f).unwrap()).collect());
                }
                classes
            })
            .collect();
        FiniteModel::from_parts(
            atoms,
            self.agents.clone(),
            members.iter().map(|e| format!("s{e}")).collect(),
            partitions,
            valuation,
            designated.and_then(position),
        )
        .expect("subsets of sigma are well-formed models")
    }
}

pub fn iter_bits(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(i)
    })
}

/// Consistent parts are found by depth-first search, so their number is
/// bounded rather than the number of independent members.
const MAX_PARTS: usize = 1 << 20;

#[derive(Clone, Copy)]
enum Node {
    Top,
    Not(usize),
    And(usize, usize),
    Knows(usize),
    Free,
}

/// Every truth assignment to the closure that respects negation,
/// conjunction and `K_a ψ -> ψ`, with `T` true.
pub fn consistent_parts(closure: &Closure) -> Result<Vec<Bits>, SatError> {
    let members = closure.members();
    let idx = |f: &Formula| closure.index_of(f).expect("closure is closed under subformulas");
    let nodes: Vec<Node> = members
        .iter()
        .map(|m| match m {
            Formula::Top => Node::Top,
            Formula::Not(f) => Node::Not(idx(f)),
            Formula::And(l, r) => Node::And(idx(l), idx(r)),
            Formula::Knows(_, f) => Node::Knows(idx(f)),
            Formula::Arb(_) => unreachable!("bare boxes are not closure members"),
            _ => Node::Free,
        })
        .collect();
    let mut parts = Vec::new();
    let mut bits = Bits::new(members.len());
    if extend(&nodes, 0, &mut bits, &mut parts) {
        Ok(parts)
    } else {
        Err(SatError::SigmaCap {
            size: None,
            cap: MAX_PARTS,
        })
    }
}

/// Assigns members from `i` on; false once `MAX_PARTS` is exceeded.
fn extend(nodes: &[Node], mut i: usize, bits: &mut Bits, out: &mut Vec<Bits>) -> bool {
    while i < nodes.len() {
        let forced = match nodes[i] {
            Node::Top => Some(true),
            Node::Not(f) => Some(!bits.get(f)),
            Node::And(l, r) => Some(bits.get(l) && bits.get(r)),
            Node::Knows(body) if !bits.get(body) => Some(false),
            Node::Knows(_) | Node::Free => None,
        };
        match forced {
            Some(v) => bits.set(i, v),
            None => {
                bits.set(i, true);
                if !extend(nodes, i + 1, &mut bits.clone(), out) {
                    return false;
                }
                bits.set(i, false);
            }
        }
        i += 1;
    }
    if out.len() >= MAX_PARTS {
        return false;
    }
    out.push(bits.clone());
    true
}

/// `(index of K_a ψ, agent, index of ψ)` for every knowledge member.
pub fn knowledge_members(closure: &Closure) -> Vec<(usize, &str, usize)> {
    closure
        .members()
        .iter()
        .enumerate()
        .filter_map(|(i, m)| match m {
            Formula::Knows(agent, body) => {
                Some((i, agent.as_str(), closure.index_of(body).expect("closed under subformulas")))
            }
            _ => None,
        })
        .collect()
}

/// Enumerates `Σ_φ`: the consistent parts crossed with `palette` colors.
pub fn enumerate_sigma(closure: &Closure, palette: usize, cap: usize) -> Result<SigmaSet, SatError> {
    let members = closure.members();
    let idx = |f: &Formula| closure.index_of(f).expect("closure is closed under subformulas");
    let knows: Vec<(usize, usize)> = knowledge_members(closure).into_iter().map(|(k, _, b)| (k, b)).collect();
    let parts = consistent_parts(closure)?;
    let palette = palette.max(1);
    let size = parts.len() * palette;
    if size > cap || size > 64 {
        return Err(SatError::SigmaCap {
            size: Some(size),
            cap,
        });
    }

    let var_atoms: Vec<String> = closure.formula().vars().into_iter().collect();
    let mut taken: BTreeSet<String> = var_atoms.iter().cloned().collect();
    let palette_atoms: Vec<String> = (0..palette).map(|_| fresh_atom("c", &mut taken)).collect();
    let agents: Vec<String> = closure.formula().agents().into_iter().collect();

    let elements: Vec<MaximalPhiSet> = (0..parts.len())
        .flat_map(|part| (0..palette).map(move |color| MaximalPhiSet { part, color }))
        .collect();
    let holds = |e: usize, m: usize| parts[elements[e].part].get(m);

    let mut profile_masks = Vec::new();
    for agent in &agents {
        let own: Vec<usize> = knows
            .iter()
            .filter(|(k, _)| matches!(&members[*k], Formula::Knows(a, _) if a == agent))
            .map(|&(k, _)| k)
            .collect();
        let masks: Vec<u64> = (0..elements.len())
            .map(|e| {
                (0..elements.len())
                    .filter(|&f| own.iter().all(|&k| holds(e, k) == holds(f, k)))
                    .fold(0u64, |acc, f| acc | 1 << f)
            })
            .collect();
        profile_masks.push(masks);
    }

    let witnesses = (0..elements.len())
        .map(|e| {
            knows
                .iter()
                .filter(|&&(k, _)| !holds(e, k))
                .map(|&(k, body)| {
                    let Formula::Knows(agent, _) = &members[k] else { unreachable!() };
                    let a = agents.iter().position(|x| x == agent).unwrap();
                    (0..elements.len())
                        .filter(|&f| profile_masks[a][e] >> f & 1 == 1 && !holds(f, body))
                        .fold(0u64, |acc, f| acc | 1 << f)
                })
                .collect()
        })
        .collect();

    let valuation = elements
        .iter()
        .map(|el| {
            let mut bits = 0u64;
            for (i, p) in var_atoms.iter().enumerate() {
                if parts[el.part].get(idx(&Formula::atom(p.clone()))) {
                    bits |= 1 << i;
                }
            }
            bits | 1 << (var_atoms.len() + el.color)
        })
        .collect();

    let part_index = parts.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    Ok(SigmaSet {
        parts,
        part_index,
        elements,
        var_atoms,
        palette_atoms,
        agents,
        profile_masks,
        witnesses,
        valuation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::closure::{closure_of, DEFAULT_CL_CAP};
    use crate::syntax::parse_formula;

    fn sigma(s: &str, palette: usize) -> (Closure, SigmaSet) {
        let c = closure_of(&parse_formula(s).unwrap(), DEFAULT_CL_CAP).unwrap();
        let sg = enumerate_sigma(&c, palette, 64).unwrap();
        (c, sg)
    }

    #[test]
    fn knowledge_parts() {
        // p, K a p, K a ~p with K a p -> p and K a ~p -> ~p.
        let (_, sg) = sigma("K a p", 1);
        assert_eq!(sg.len(), 4);
        let (_, sg) = sigma("K a p", 3);
        assert_eq!(sg.len(), 12);
    }

    #[test]
    fn every_element_is_consistent() {
        let (c, sg) = sigma("K a ~q | [q] A p", 1);
        for e in 0..sg.len() {
            for (i, m) in c.members().iter().enumerate() {
                let neg = c.index_of(&m.negated()).unwrap();
                assert_ne!(sg.holds(e, i), sg.holds(e, neg), "{m}");
                if let Formula::Knows(_, body) = m {
                    assert!(!sg.holds(e, i) || sg.holds(e, c.index_of(body).unwrap()));
                }
            }
            if let Some(top) = c.index_of(&Formula::Top) {
                assert!(sg.holds(e, top));
            }
        }
    }

    #[test]
    fn subsets_read_as_valid_models() {
        let (_, sg) = sigma("K a p & ~K b p", 2);
        let all = sg.full_mask();
        let m = sg.model(all, Some(0));
        assert!(m.validate().is_ok());
        assert_eq!(m.num_states(), sg.len());
        assert!(sg.witnessed(all));
    }

    #[test]
    fn cap_is_reported() {
        let c = closure_of(&parse_formula("K a p").unwrap(), DEFAULT_CL_CAP).unwrap();
        assert!(matches!(
            enumerate_sigma(&c, 3, 5),
            Err(SatError::SigmaCap { size: Some(12), cap: 5 })
        ));
    }
}
