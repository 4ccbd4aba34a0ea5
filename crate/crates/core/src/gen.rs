//! Random formulas and models for property tests and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::models::{FiniteModel, StateSet};
use crate::syntax::Formula;

#[derive(Clone, Debug)]
pub struct FormulaConfig {
    pub atoms: Vec<String>,
    pub agents: Vec<String>,
    /// Upper bound on `Formula::size`.
    pub max_size: usize,
    /// Upper bound on the nesting depth of `A`.
    pub max_box_depth: usize,
    pub announcements: bool,
    pub top: bool,
}

impl FormulaConfig {
    pub fn new(atoms: &[&str], agents: &[&str], max_size: usize) -> FormulaConfig {
        FormulaConfig {
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            agents: agents.iter().map(|s| s.to_string()).collect(),
            max_size,
            max_box_depth: 2,
            announcements: true,
            top: true,
        }
    }

    pub fn box_depth(mut self, depth: usize) -> FormulaConfig {
        self.max_box_depth = depth;
        self
    }

    pub fn without_announcements(mut self) -> FormulaConfig {
        self.announcements = false;
        self
    }
}

/// A random formula of size between 1 and `config.max_size`.
pub fn formula<R: Rng + ?Sized>(rng: &mut R, config: &FormulaConfig) -> Formula {
    let size = rng.gen_range(1..=config.max_size.max(1));
    sized(rng, config, size, config.max_box_depth)
}

/// A random formula of size exactly `size`.
pub fn sized<R: Rng + ?Sized>(rng: &mut R, config: &FormulaConfig, size: usize, boxes: usize) -> Formula {
    if size <= 1 {
        return leaf(rng, config);
    }
    let mut options: Vec<u8> = vec![0, 0, 2];
    if !config.agents.is_empty() {
        options.extend([1, 1]);
    }
    if boxes > 0 {
        options.push(4);
    }
    if size >= 3 {
        options.extend([3, 3, 3]);
        if config.announcements {
            options.extend([5, 5]);
        }
    }
    match *options.choose(rng).unwrap() {
        0 => sized(rng, config, size - 1, boxes).not(),
        1 => {
            let agent = config.agents.choose(rng).unwrap().clone();
            Formula::knows(agent, sized(rng, config, size - 1, boxes))
        }
        2 => sized(rng, config, size - 1, boxes).not(),
        4 => Formula::arb(sized(rng, config, size - 1, boxes - 1)),
        op => {
            let left = rng.gen_range(1..size - 1);
            let l = sized(rng, config, left, boxes);
            let r = sized(rng, config, size - 1 - left, boxes);
            if op == 3 {
                l.and(r)
            } else {
                Formula::announce(l, r)
            }
        }
    }
}

fn leaf<R: Rng + ?Sized>(rng: &mut R, config: &FormulaConfig) -> Formula {
    if config.atoms.is_empty() || (config.top && rng.gen_bool(0.1)) {
        Formula::Top
    } else {
        Formula::atom(config.atoms.choose(rng).unwrap().clone())
    }
}

/// A random boolean over `atoms` of size at most `max_size`.
pub fn boolean<R: Rng + ?Sized>(rng: &mut R, atoms: &[&str], max_size: usize) -> Formula {
    let config = FormulaConfig::new(atoms, &[], max_size)
        .box_depth(0)
        .without_announcements();
    formula(rng, &config)
}

/// A random model with between 1 and `max_states` states, every agent's
/// partition and the valuation chosen uniformly. The first state is
/// designated.
pub fn model<R: Rng + ?Sized>(rng: &mut R, atoms: &[&str], agents: &[&str], max_states: usize) -> FiniteModel {
    let n = rng.gen_range(1..=max_states.max(1));
    let labels: Vec<Vec<usize>> = agents
        .iter()
        .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let valuation = atoms
        .iter()
        .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect::<StateSet>())
        .collect();
    FiniteModel::from_labels(
        atoms.iter().map(|s| s.to_string()).collect(),
        agents.iter().map(|s| s.to_string()).collect(),
        (0..n).map(|i| format!("w{i}")).collect(),
        &labels,
        valuation,
        Some(0),
    )
    .expect("generated model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn respects_bounds() {
        let mut rng = StdRng::seed_from_u64(7);
        let config = FormulaConfig::new(&["p", "q"], &["a", "b"], 25).box_depth(1);
        for _ in 0..300 {
            let f = formula(&mut rng, &config);
            assert!(f.size() <= 25);
            assert!(f.quantifier_depth() <= 1);
        }
        for _ in 0..50 {
            assert!(boolean(&mut rng, &["p"], 9).is_boolean());
            let m = model(&mut rng, &["p", "q"], &["a"], 5);
            assert!(m.validate().is_ok());
            assert!(m.num_states() <= 5);
        }
    }
}

/// Every formula in arbitrary announcement normal form of size at most
/// `max_size` with at most `max_box_depth` nested `[α] A`, over the given
/// atoms and agents, with `T` as an extra leaf. Listed by size.
pub fn aanf_formulas(atoms: &[&str], agents: &[&str], max_size: usize, max_box_depth: usize) -> Vec<Formula> {
    // by_size[n][d]: formulas of size n and quantifier depth exactly d.
    let mut by_size: Vec<Vec<Vec<Formula>>> = vec![vec![Vec::new(); max_box_depth + 1]; max_size + 1];
    if max_size == 0 {
        return Vec::new();
    }
    by_size[1][0].push(Formula::Top);
    by_size[1][0].extend(atoms.iter().map(|p| Formula::atom(*p)));
    for n in 2..=max_size {
        for d in 0..=max_box_depth {
            let mut out = Vec::new();
            for f in &by_size[n - 1][d] {
                out.push(f.clone().not());
                for a in agents {
                    out.push(Formula::knows(*a, f.clone()));
                }
            }
            for left in 1..n - 1 {
                let right = n - 1 - left;
                for dl in 0..=d {
                    for dr in 0..=d {
                        if dl.max(dr) != d {
                            continue;
                        }
                        for l in &by_size[left][dl] {
                            for r in &by_size[right][dr] {
                                out.push(l.clone().and(r.clone()));
                            }
                        }
                    }
                }
            }
            // [α] A ψ has size |α| + |ψ| + 2.
            if d >= 1 && n >= 4 {
                for left in 1..n - 2 {
                    let right = n - 2 - left;
                    for dl in 0..d {
                        for dr in 0..d {
                            if dl.max(dr) != d - 1 {
                                continue;
                            }
                            for l in &by_size[left][dl] {
                                for r in &by_size[right][dr] {
                                    out.push(Formula::announce(l.clone(), Formula::arb(r.clone())));
                                }
                            }
                        }
                    }
                }
            }
            by_size[n][d] = out;
        }
    }
    by_size.into_iter().flatten().flatten().collect()
}

#[cfg(test)]
mod enumeration_tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        // Size 1: T p. Size 2: ~T ~p K a T K a p.
        assert_eq!(aanf_formulas(&["p"], &["a"], 2, 1).len(), 2 + 4);
        let all = aanf_formulas(&["p", "q"], &["a", "b"], 5, 1);
        assert!(all.iter().all(|f| f.is_aanf() && f.quantifier_depth() <= 1 && f.size() <= 5));
        let distinct: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all.contains(&crate::syntax::parse_formula("[p] A q").unwrap()));
    }
}
