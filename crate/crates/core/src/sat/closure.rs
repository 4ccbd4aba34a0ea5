use std::collections::{BTreeSet, HashMap};

use crate::syntax::Formula;

use super::SatError;

/// Default bound on the number of closure members.
pub const DEFAULT_CL_CAP: usize = 200;

/// A fixed-width bit vector indexed by closure member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn new(len: usize) -> Bits {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    pub fn ones(len: usize) -> Bits {
        let mut b = Bits::new(len);
        for i in 0..len {
            b.set(i, true);
        }
        b
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.0[i / 64] |= 1 << (i % 64);
        } else {
            self.0[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }
}

/// The closure `cl(φ)` of a formula in arbitrary announcement normal form,
/// ordered by size and then structurally.
#[derive(Clone, Debug)]
pub struct Closure {
    formula: Formula,
    members: Vec<Formula>,
    index: HashMap<Formula, usize>,
    depth: usize,
}

impl Closure {
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn members(&self) -> &[Formula] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, formula: &Formula) -> bool {
        self.index.contains_key(formula)
    }

    pub fn index_of(&self, formula: &Formula) -> Option<usize> {
        self.index.get(formula).copied()
    }

    /// `D(φ)`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `cl_x(φ)`: the members of quantifier depth at most `x`.
    pub fn level(&self, x: usize) -> Vec<&Formula> {
        self.members
            .iter()
            .filter(|f| f.quantifier_depth() <= x)
            .collect()
    }

    /// Indices of the members of shape `[α] A ψ`.
    pub fn box_members(&self) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| as_announced_box(&self.members[i]).is_some())
            .collect()
    }
}

/// Splits `[α] A ψ` into `(α, ψ)`.
pub fn as_announced_box(formula: &Formula) -> Option<(&Formula, &Formula)> {
    match formula {
        Formula::Announce(ann, body) => match body.as_ref() {
            Formula::Arb(inner) => Some((ann, inner)),
            _ => None,
        },
        _ => None,
    }
}

/// Subformulas in the normal-form sense: `[α] A ψ` contributes itself and
/// the subformulas of `α` and `ψ`, but not `A ψ`.
pub fn aanf_subformulas(formula: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(formula, &mut out);
    out
}

fn collect_subformulas(formula: &Formula, out: &mut BTreeSet<Formula>) {
    if !out.insert(formula.clone()) {
        return;
    }
    match formula {
        Formula::Top | Formula::Atom(_) => {}
        Formula::Not(f) | Formula::Knows(_, f) | Formula::Arb(f) => collect_subformulas(f, out),
        Formula::And(l, r) => {
            collect_subformulas(l, out);
            collect_subformulas(r, out);
        }
        Formula::Announce(ann, body) => {
            collect_subformulas(ann, out);
            match body.as_ref() {
                Formula::Arb(inner) => collect_subformulas(inner, out),
                other => collect_subformulas(other, out),
            }
        }
    }
}

/// Computes `cl(φ)`, refusing once it exceeds `cap` members.
pub fn closure_of(formula: &Formula, cap: usize) -> Result<Closure, SatError> {
    if !formula.is_aanf() {
        return Err(SatError::NotAanf(formula.clone()));
    }
    let mut memo = HashMap::new();
    let set = cl(formula, cap, &mut memo)?;
    let mut members: Vec<Formula> = set.into_iter().collect();
    members.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    let index = members
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    Ok(Closure {
        depth: formula.quantifier_depth(),
        formula: formula.clone(),
        members,
        index,
    })
}

fn cl(
    formula: &Formula,
    cap: usize,
    memo: &mut HashMap<Formula, BTreeSet<Formula>>,
) -> Result<BTreeSet<Formula>, SatError> {
    if let Some(hit) = memo.get(formula) {
        return Ok(hit.clone());
    }
    let subs = aanf_subformulas(formula);
    let mut out = BTreeSet::new();
    for psi in &subs {
        out.insert(psi.clone());
        out.insert(psi.negated());
    }
    if formula.modal_depth() > 0 {
        for psi in &subs {
            if let Formula::Knows(agent, body) = psi {
                for inner in cl(body, cap, memo)? {
                    let k = Formula::knows(agent.clone(), inner);
                    out.insert(k.negated());
                    out.insert(k);
                }
                if out.len() > cap {
                    return Err(SatError::ClosureCap { size: out.len(), cap });
                }
            }
        }
    }
    if out.len() > cap {
        return Err(SatError::ClosureCap { size: out.len(), cap });
    }
    memo.insert(formula.clone(), out.clone());
    Ok(out)
}

/// Whether `|cl(φ)| <= |φ| * 4^|φ|`, compared without overflow.
pub fn within_size_bound(formula: &Formula, closure_len: usize) -> bool {
    let n = formula.size() as u32;
    if n >= 31 {
        return true;
    }
    (closure_len as u128) <= (n as u128) * 4u128.pow(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn example_memberships() {
        let phi = f("p -> K a K b [q] A r");
        let c = closure_of(&phi, DEFAULT_CL_CAP).unwrap();
        assert!(c.contains(&f("~K a K b r")));
        assert!(!c.contains(&f("~K b K a r")));
        assert!(!c.contains(&f("K a p")));
        assert!(!c.contains(&f("A r")));
        assert!(!c.contains(&f("K a A r")));
        assert!(c.contains(&f("[q] A r")));
        assert!(within_size_bound(&phi, c.len()));
    }

    #[test]
    fn atom_closure() {
        let c = closure_of(&f("p"), DEFAULT_CL_CAP).unwrap();
        assert_eq!(c.members(), [f("p"), f("~p")]);
    }

    #[test]
    fn closed_under_negation() {
        let c = closure_of(&f("K a (p & ~K b q)"), DEFAULT_CL_CAP).unwrap();
        for m in c.members() {
            assert!(c.contains(&m.negated()), "{m}");
        }
    }

    #[test]
    fn non_aanf_and_cap_are_rejected() {
        assert!(matches!(closure_of(&f("A p"), 200), Err(SatError::NotAanf(_))));
        assert!(matches!(
            closure_of(&f("K a K b (p & q)"), 5),
            Err(SatError::ClosureCap { .. })
        ));
    }

    #[test]
    fn levels_grow() {
        let c = closure_of(&f("[p] A [q] A r"), DEFAULT_CL_CAP).unwrap();
        assert_eq!(c.depth(), 2);
        assert!(c.level(0).len() < c.level(1).len());
        assert!(c.level(1).len() < c.level(2).len());
        assert_eq!(c.level(2).len(), c.len());
    }
}
