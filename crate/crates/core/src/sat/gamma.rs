use std::collections::HashMap;

use crate::mc::Checker;

use super::closure::{as_announced_box, Bits, Closure};
use super::sigma::{iter_bits, SigmaSet};
use super::SatError;

/// Default bound on the number of connected candidate models kept per level.
pub const DEFAULT_CANDIDATE_CAP: usize = 1 << 16;
const MEMO_LIMIT: usize = 1 << 20;

/// Candidate models are subsets of `Σ`, given as bit masks. Only connected
/// subsets are kept: a pointed closure model is bisimilar to its component,
/// and components of closure models are closure models of the same level.
pub type Candidate = u64;

/// `Γ_0 ⊇ Γ_1 ⊇ ... ⊇ Γ_D`, each sorted by size and then by mask.
#[derive(Clone, Debug)]
pub struct GammaLevels {
    pub levels: Vec<Vec<Candidate>>,
}

impl GammaLevels {
    /// `C(φ) = Γ_D`.
    pub fn top(&self) -> &[Candidate] {
        self.levels.last().map_or(&[], Vec::as_slice)
    }
}

/// Bisimulation-class lookup keyed by round signatures shared across all
/// subsets of `Σ`, so equal keys mean bisimilar pointed subsets.
pub type Table = HashMap<u32, Bits>;

pub struct Gamma<'a> {
    closure: &'a Closure,
    sigma: &'a SigmaSet,
    rounds: usize,
    class_cap: usize,
    interner: HashMap<Vec<u32>, u32>,
    memo: HashMap<u64, Vec<u32>>,
    boxes: Vec<(usize, usize)>,
}

impl<'a> Gamma<'a> {
    pub fn new(closure: &'a Closure, sigma: &'a SigmaSet, class_cap: usize) -> Gamma<'a> {
        let boxes = closure.box_members();
        Gamma {
            closure,
            sigma,
            // Refinement of the disjoint union of two subsets stabilises
            // within their combined size.
            rounds: 2 * sigma.len(),
            class_cap,
            interner: HashMap::new(),
            memo: HashMap::new(),
            boxes: boxes.into_iter().map(|i| (i, closure.members()[i].quantifier_depth())).collect(),
        }
    }

    fn intern(&mut self, sig: Vec<u32>) -> u32 {
        let next = self.interner.len() as u32;
        *self.interner.entry(sig).or_insert(next)
    }

    /// Bisimulation keys of the elements of `subset`, indexed by element.
    pub fn keys(&mut self, subset: u64) -> Vec<u32> {
        if let Some(hit) = self.memo.get(&subset) {
            return hit.clone();
        }
        let sigma = self.sigma;
        let members: Vec<usize> = iter_bits(subset).collect();
        let mut key = vec![0u32; sigma.len()];
        for &e in &members {
            let v = sigma.valuation_bits(e);
            key[e] = self.intern(vec![0, v as u32, (v >> 32) as u32]);
        }
        for round in 1..=self.rounds {
            let mut next = key.clone();
            for &e in &members {
                let mut sig = vec![round as u32, key[e]];
                for a in 0..sigma.agents().len() {
                    let mut reach: Vec<u32> =
                        iter_bits(sigma.profile_mask(a, e) & subset).map(|f| key[f]).collect();
                    reach.sort_unstable();
                    reach.dedup();
                    sig.push(u32::MAX);
                    sig.extend(reach);
                }
                next[e] = self.intern(sig);
            }
            key = next;
        }
        if self.memo.len() >= MEMO_LIMIT {
            self.memo.clear();
        }
        self.memo.insert(subset, key.clone());
        key
    }

    /// Connected subsets of `Σ` meeting the witness condition. Connected
    /// subsets are grown from their least element, each reached once.
    pub fn level_zero(&self, cap: usize) -> Result<Vec<Candidate>, SatError> {
        let sigma = self.sigma;
        let neighbours: Vec<u64> = (0..sigma.len())
            .map(|e| (0..sigma.agents().len()).fold(0, |acc, a| acc | sigma.profile_mask(a, e)) & !(1 << e))
            .collect();
        let mut out = Vec::new();
        let mut visited = 0usize;
        for v in 0..sigma.len() {
            let above = sigma.full_mask() & !((1u64 << v) | ((1u64 << v) - 1));
            let mut stack = vec![(1u64 << v, neighbours[v] & above)];
            while let Some((set, mut ext)) = stack.pop() {
                visited += 1;
                if visited > cap {
                    return Err(SatError::CandidateCap { level: 0, cap });
                }
                if sigma.witnessed(set) {
                    out.push(set);
                }
                let closed = iter_bits(set).fold(set, |acc, e| acc | neighbours[e]);
                while ext != 0 {
                    let w = ext.trailing_zeros() as usize;
                    ext &= ext - 1;
                    let fresh = neighbours[w] & above & !closed;
                    stack.push((set | 1 << w, ext | fresh));
                }
            }
        }
        out.sort_by_key(|&s| (s.count_ones(), s));
        Ok(out)
    }

    /// For each key occurring in `models`, the members shared by every
    /// element carrying that key.
    pub fn table(&mut self, models: &[Candidate]) -> Table {
        let mut table = Table::new();
        for &m in models {
            let keys = self.keys(m);
            for e in iter_bits(m) {
                let part = self.sigma.part_bits(e);
                table
                    .entry(keys[e])
                    .and_modify(|b| b.and_assign(part))
                    .or_insert_with(|| part.clone());
            }
        }
        table
    }

    /// Whether `candidate` satisfies the announcement condition for every
    /// `[α] A ψ` of depth at most `x`, looking up `ψ` in `table` (built from
    /// level `x - 1`).
    pub fn satisfies(&mut self, candidate: Candidate, x: usize, table: &Table) -> Result<bool, SatError> {
        Ok(self.first_violation(candidate, x, table)?.is_none())
    }

    /// The first element and box member where the condition fails.
    pub fn first_violation(
        &mut self,
        candidate: Candidate,
        x: usize,
        table: &Table,
    ) -> Result<Option<(usize, usize)>, SatError> {
        let sigma = self.sigma;
        let closure = self.closure;
        let members: Vec<usize> = iter_bits(candidate).collect();
        let model = sigma.model(candidate, None);
        let mut checker = Checker::with_cap(&model, self.class_cap);
        let boxes: Vec<usize> = self
            .boxes
            .iter()
            .filter(|&&(_, d)| d <= x)
            .map(|&(i, _)| i)
            .collect();
        for j in boxes {
            let (ann, body) = as_announced_box(&closure.members()[j]).expect("box member");
            let psi = closure.index_of(body).expect("box body is a closure member");
            let kept = checker.extension(ann).map_err(SatError::from_model)?;
            let kept: u64 = kept.iter().fold(0, |acc, pos| acc | 1 << members[pos]);
            let classes = valuation_classes(sigma, kept);
            for &e in &members {
                let expected = if kept >> e & 1 == 0 {
                    true
                } else {
                    self.all_restrictions_keep(e, &classes, psi, table)?
                };
                if expected != sigma.holds(e, j) {
                    return Ok(Some((e, j)));
                }
            }
        }
        Ok(None)
    }

    fn all_restrictions_keep(
        &mut self,
        e: usize,
        classes: &[u64],
        psi: usize,
        table: &Table,
    ) -> Result<bool, SatError> {
        let anchor = classes.iter().position(|c| c >> e & 1 == 1).expect("element has a class");
        let others: Vec<u64> = classes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != anchor)
            .map(|(_, &c)| c)
            .collect();
        if others.len() >= self.class_cap.min(63) {
            return Err(SatError::ClassCap {
                classes: classes.len(),
                cap: self.class_cap,
            });
        }
        for pick in 0u64..1 << others.len() {
            let u = iter_bits(pick).fold(classes[anchor], |acc, i| acc | others[i]);
            let key = self.keys(u)[e];
            if let Some(shared) = table.get(&key) {
                if !shared.get(psi) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// All levels up to `D(φ)`.
    pub fn fixpoint(&mut self, cap: usize) -> Result<GammaLevels, SatError> {
        let mut levels = vec![self.level_zero(cap)?];
        for x in 1..=self.closure.depth() {
            let table = self.table(levels.last().unwrap());
            let mut next = Vec::new();
            for &m in levels.last().unwrap() {
                if self.satisfies(m, x, &table)? {
                    next.push(m);
                }
            }
            levels.push(next);
        }
        Ok(GammaLevels { levels })
    }
}

/// Classes of equal valuation (variables and palette) within `mask`.
pub fn valuation_classes(sigma: &SigmaSet, mask: u64) -> Vec<u64> {
    let mut classes: Vec<(u64, u64)> = Vec::new();
    for e in iter_bits(mask) {
        let v = sigma.valuation_bits(e);
        match classes.iter_mut().find(|(w, _)| *w == v) {
            Some((_, c)) => *c |= 1 << e,
            None => classes.push((v, 1 << e)),
        }
    }
    classes.into_iter().map(|(_, c)| c).collect()
}
