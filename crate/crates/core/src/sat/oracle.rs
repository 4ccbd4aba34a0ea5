use std::collections::BTreeSet;

use crate::mc::{Checker, McError};
use crate::models::{fresh_atom, partition_from_labels, FiniteModel, StateSet};
use crate::syntax::Formula;

/// Default bound on the number of states tried by the oracle.
pub const DEFAULT_MAX_STATES: usize = 4;
/// Default number of atoms outside `var(φ)` the oracle may use.
pub const DEFAULT_EXTRA_ATOMS: usize = 2;

/// Restricted growth strings of length `n` with at most `max_blocks` blocks;
/// each one is a set partition of `0..n`.
pub fn restricted_growth_strings(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    rgs(n, max_blocks, 0, &mut current, &mut out);
    out
}

fn rgs(n: usize, max_blocks: usize, used: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    let limit = if current.is_empty() { 1 } else { (used + 1).min(max_blocks) };
    for b in 0..limit {
        current.push(b);
        rgs(n, max_blocks, used.max(b + 1), current, out);
        current.pop();
    }
}

/// Nondecreasing sequences of length `n` over `0..values`.
fn sorted_sequences(n: usize, values: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn go(n: usize, values: usize, from: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in from..values {
            current.push(v);
            go(n, values, v, current, out);
            current.pop();
        }
    }
    go(n, values, 0, &mut current, &mut out);
    out
}

/// Searches models with up to `max_states` states over `var(φ)` and
/// `extra_atoms` further atoms for a state satisfying `φ`. States are put in
/// order of their valuation of `var(φ)`, and the further atoms only matter
/// through the partition they induce, which cuts the search down without losing
/// any model up to isomorphism. The first hit is returned with its state
/// designated.
pub fn oracle_search(
    formula: &Formula,
    max_states: usize,
    extra_atoms: usize,
) -> Result<Option<FiniteModel>, McError> {
    let vars: Vec<String> = formula.vars().into_iter().collect();
    let agents: Vec<String> = formula.agents().into_iter().collect();
    let mut taken: BTreeSet<String> = vars.iter().cloned().collect();
    let extras: Vec<String> = (0..extra_atoms).map(|_| fresh_atom("x", &mut taken)).collect();
    let atoms: Vec<String> = vars.iter().chain(&extras).cloned().collect();
    let extra_patterns = 1usize << extras.len();
    for n in 1..=max_states {
        let partitions: Vec<Vec<StateSet>> = restricted_growth_strings(n, n)
            .iter()
            .map(|labels| partition_from_labels(labels))
            .collect();
        let var_sequences = sorted_sequences(n, 1 << vars.len());
        let extra_blocks = restricted_growth_strings(n, extra_patterns);
        let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let mut choice = vec![0usize; agents.len()];
        loop {
            let parts: Vec<Vec<StateSet>> = choice.iter().map(|&c| partitions[c].clone()).collect();
            for vs in &var_sequences {
                for blocks in &extra_blocks {
                    let valuation: Vec<StateSet> = (0..atoms.len())
                        .map(|i| {
                            (0..n)
                                .filter(|&s| {
                                    if i < vars.len() {
                                        vs[s] >> i & 1 == 1
                                    } else {
                                        blocks[s] >> (i - vars.len()) & 1 == 1
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    let model = FiniteModel::from_parts(
                        atoms.clone(),
                        agents.clone(),
                        names.clone(),
                        parts.clone(),
                        valuation,
                        None,
                    )
                    .expect("enumerated models are well-formed");
                    let ext = Checker::new(&model).extension(formula)?;
                    if let Some(s) = ext.first() {
                        return Ok(Some(model.with_designated(Some(s))));
                    }
                }
            }
            if !advance(&mut choice, partitions.len()) {
                break;
            }
        }
    }
    Ok(None)
}

fn advance(choice: &mut [usize], base: usize) -> bool {
    for c in choice.iter_mut() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::eval;
    use crate::syntax::parse_formula;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=5).map(|n| restricted_growth_strings(n, n).len()).collect();
        assert_eq!(counts, [1, 2, 5, 15, 52]);
        assert_eq!(restricted_growth_strings(4, 2).len(), 8);
        assert_eq!(sorted_sequences(4, 4).len(), 35);
    }

    #[test]
    fn finds_and_verifies() {
        let phi = parse_formula("p & ~K a p & K b p").unwrap();
        let m = oracle_search(&phi, 3, 0).unwrap().unwrap();
        assert!(eval(&m, m.designated().unwrap(), &phi).unwrap());
        assert_eq!(m.num_states(), 2);
    }

    #[test]
    fn extra_atoms_join_the_signature() {
        let phi = parse_formula("E (K a p & ~K b K a p)").unwrap();
        let m = oracle_search(&phi, 4, 1).unwrap().unwrap();
        assert_eq!(m.atoms(), ["p", "x0"]);
        assert!(eval(&m, m.designated().unwrap(), &phi).unwrap());
    }

    #[test]
    fn contradiction_has_no_model() {
        let phi = parse_formula("K a p & ~p").unwrap();
        assert!(oracle_search(&phi, 3, 1).unwrap().is_none());
    }
}
