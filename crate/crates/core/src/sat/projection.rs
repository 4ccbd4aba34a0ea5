use std::collections::BTreeSet;

use crate::mc::Checker;
use crate::models::{FiniteModel, StateSet};

use super::closure::{Bits, Closure};
use super::sigma::SigmaSet;
use super::SatError;

/// The φ-projection of a model: each state is sent to its closure part and a
/// color read off the atoms whose extensions look alike through the closure.
#[derive(Clone, Debug)]
pub struct Projection {
    /// States are Σ elements named `s{e}`; an agent relates two of them when
    /// some related pair of original states maps onto them, closed under
    /// transitivity.
    pub model: FiniteModel,
    /// The Σ element of each projected state.
    pub elements: Vec<usize>,
    /// The same elements as a candidate mask.
    pub subset: u64,
    /// Projected state of each original state.
    pub image: Vec<usize>,
    pub colors_used: usize,
}

pub fn project(model: &FiniteModel, closure: &Closure, sigma: &SigmaSet) -> Result<Projection, SatError> {
    let n = model.num_states();
    let mut checker = Checker::new(model);
    let mut parts = vec![Bits::new(closure.len()); n];
    for (i, member) in closure.members().iter().enumerate() {
        let ext = checker.extension(member).map_err(SatError::from_model)?;
        for s in ext.iter() {
            parts[s].set(i, true);
        }
    }

    let mut shapes: Vec<BTreeSet<Bits>> = Vec::new();
    let mut atom_shape = Vec::new();
    for a in 0..model.atoms().len() {
        let shape: BTreeSet<Bits> = model.valuation(a).iter().map(|s| parts[s].clone()).collect();
        let k = match shapes.iter().position(|x| *x == shape) {
            Some(k) => k,
            None => {
                shapes.push(shape);
                shapes.len() - 1
            }
        };
        atom_shape.push(k);
    }
    let mut patterns: Vec<BTreeSet<usize>> = Vec::new();
    let mut color = Vec::with_capacity(n);
    for s in 0..n {
        let pattern: BTreeSet<usize> = (0..model.atoms().len())
            .filter(|&a| model.valuation(a).contains(s))
            .map(|a| atom_shape[a])
            .collect();
        let c = match patterns.iter().position(|x| *x == pattern) {
            Some(c) => c,
            None => {
                patterns.push(pattern);
                patterns.len() - 1
            }
        };
        color.push(c);
    }
    if patterns.len() > sigma.palette() {
        return Err(SatError::PaletteTooSmall {
            needed: patterns.len(),
            palette: sigma.palette(),
        });
    }

    let mut elements = Vec::new();
    let mut image = Vec::with_capacity(n);
    for s in 0..n {
        let e = sigma
            .find(&parts[s], color[s])
            .expect("true closure parts are maximal φ-sets");
        let pos = match elements.iter().position(|&x| x == e) {
            Some(pos) => pos,
            None => {
                elements.push(e);
                elements.len() - 1
            }
        };
        image.push(pos);
    }

    let k = elements.len();
    let mut partitions = Vec::new();
    for agent in sigma.agents() {
        let mut parent: Vec<usize> = (0..k).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for s in 0..n {
            for t in model.class_for(agent, s).iter() {
                let (x, y) = (root(&mut parent, image[s]), root(&mut parent, image[t]));
                parent[x] = y;
            }
        }
        let mut classes: Vec<(usize, StateSet)> = Vec::new();
        for x in 0..k {
            let r = root(&mut parent, x);
            match classes.iter_mut().find(|(root, _)| *root == r) {
                Some((_, c)) => c.insert(x),
                None => classes.push((r, StateSet::singleton(x))),
            }
        }
        partitions.push(classes.into_iter().map(|(_, c)| c).collect());
    }
    let atoms: Vec<String> = sigma
        .var_atoms()
        .iter()
        .chain(sigma.palette_atoms())
        .cloned()
        .collect();
    let valuation = (0..atoms.len())
        .map(|i| {
            (0..k)
                .filter(|&x| sigma.valuation_bits(elements[x]) >> i & 1 == 1)
                .collect()
        })
        .collect();
    let projected = FiniteModel::from_parts(
        atoms,
        sigma.agents().to_vec(),
        elements.iter().map(|e| format!("s{e}")).collect(),
        partitions,
        valuation,
        model.designated().map(|d| image[d]),
    )
    .expect("projections are well-formed models");
    Ok(Projection {
        model: projected,
        subset: elements.iter().fold(0, |acc, &e| acc | 1 << e),
        elements,
        image,
        colors_used: patterns.len(),
    })
}
