use crate::normalform::{to_rbox_premise, RewriteKind};
use crate::syntax::Formula;

use super::{is_tautology, Axiom, Bindings, Derivation, Justification, Rule};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConvertError {
    #[error("no line {0}")]
    MissingLine(usize),
    #[error("premise is not a necessity-form instance with hole [{0}]phi")]
    NotNecessityInstance(String),
    #[error("{0} occurs outside the hole")]
    NotFresh(String),
    #[error("step {0} has no mechanical derivation")]
    StepNotMechanized(RewriteKind),
}

/// Turns one application of the necessity-form box rule, from line `premise`
/// `ψ([p]φ)` to `ψ(□φ)`, into plain lines ending in an `RBox` step, and
/// returns the index of the line holding `ψ(□φ)`.
///
/// Each rewrite step of the normal-form trace is derived from its
/// predecessor on the way in and reversed on the way out. `AnnounceImplication`,
/// `AnnounceKnows`, `DualizeKnows` and a padded `[T]` need congruence
/// reasoning under modalities and are reported as not mechanized.
pub fn convert_rbox_one(target: &mut Derivation, premise: usize, fresh: &str) -> Result<usize, ConvertError> {
    let start = target.formula(premise).ok_or(ConvertError::MissingLine(premise))?.clone();
    let rb = to_rbox_premise(&start, Some(fresh)).map_err(|_| ConvertError::NotNecessityInstance(fresh.into()))?;
    let hole = Formula::announce(Formula::atom(fresh), rb.body.clone());
    let boxed = Formula::arb(rb.body.clone());
    if count(&start, &hole) != 1 || occurs_outside(&start, &hole, fresh) || rb.body.vars().contains(fresh) {
        return Err(ConvertError::NotFresh(fresh.into()));
    }
    let mut work = target.clone();
    let d = &mut work;

    let mut chain = vec![start];
    chain.extend(rb.trace.iter().map(|s| s.result.clone()));
    let mut line = premise;
    for (k, step) in rb.trace.iter().enumerate() {
        line = derive_step(d, line, &chain[k], &chain[k + 1], step.kind)?;
    }
    debug_assert_eq!(chain.last(), Some(&rb.premise()));
    line = d.rbox(rb.conclusion(), line, fresh);
    let back: Vec<Formula> = chain.iter().map(|f| replace(f, &hole, &boxed)).collect();
    for (k, step) in rb.trace.iter().enumerate().rev() {
        line = derive_step(d, line, &back[k + 1], &back[k], step.kind)?;
    }
    *target = work;
    Ok(line)
}

fn derive_step(d: &mut Derivation, line: usize, from: &Formula, to: &Formula, kind: RewriteKind) -> Result<usize, ConvertError> {
    if let Formula::Knows(_, body) = to {
        if body.as_ref() == from {
            return Ok(d.rule(to.clone(), Rule::NecK, &[line]));
        }
    }
    if let Formula::Knows(agent, body) = from {
        if body.as_ref() == to {
            let t = d.push(
                from.clone().implies(to.clone()),
                Justification::Axiom {
                    axiom: Axiom::T,
                    bind: Bindings::new().with_agent(agent),
                },
            );
            return Ok(d.rule(to.clone(), Rule::MP, &[line, t]));
        }
    }
    let direct = from.clone().implies(to.clone());
    if is_tautology(&direct) == Some(true) {
        let p = d.axiom(direct, Axiom::P);
        return Ok(d.rule(to.clone(), Rule::MP, &[line, p]));
    }
    if let Some(instance) = first_difference(from, to).and_then(|(x, y)| composition(x, y).or_else(|| composition(y, x))) {
        let bridge = from.clone().implies(instance.clone().implies(to.clone()));
        if is_tautology(&bridge) == Some(true) {
            let aa = d.axiom(instance.clone(), Axiom::AA);
            let p = d.axiom(bridge, Axiom::P);
            let mid = d.rule(instance.implies(to.clone()), Rule::MP, &[line, p]);
            return Ok(d.rule(to.clone(), Rule::MP, &[aa, mid]));
        }
    }
    Err(ConvertError::StepNotMechanized(kind))
}

/// `[x][y]z <-> [x & [x]y]z` when `nested` and `merged` have those shapes.
fn composition(nested: &Formula, merged: &Formula) -> Option<Formula> {
    let Formula::Announce(x, inner) = nested else { return None };
    let Formula::Announce(y, z) = inner.as_ref() else { return None };
    let want = Formula::announce(
        x.as_ref().clone().and(Formula::announce(x.as_ref().clone(), y.as_ref().clone())),
        z.as_ref().clone(),
    );
    (&want == merged).then(|| nested.clone().iff(want))
}

/// The outermost pair of corresponding subformulas where `a` and `b` part ways.
fn first_difference<'a>(a: &'a Formula, b: &'a Formula) -> Option<(&'a Formula, &'a Formula)> {
    if a == b {
        return None;
    }
    let pair = match (a, b) {
        (Formula::Not(x), Formula::Not(y)) | (Formula::Arb(x), Formula::Arb(y)) => Some((x, y)),
        (Formula::Knows(p, x), Formula::Knows(q, y)) if p == q => Some((x, y)),
        (Formula::And(xl, xr), Formula::And(yl, yr)) | (Formula::Announce(xl, xr), Formula::Announce(yl, yr)) => {
            match (xl == yl, xr == yr) {
                (true, false) => Some((xr, yr)),
                (false, true) => Some((xl, yl)),
                _ => None,
            }
        }
        _ => None,
    };
    match pair {
        Some((x, y)) => first_difference(x, y),
        None => Some((a, b)),
    }
}

fn replace(f: &Formula, from: &Formula, to: &Formula) -> Formula {
    if f == from {
        return to.clone();
    }
    match f {
        Formula::Top | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => replace(g, from, to).not(),
        Formula::And(l, r) => replace(l, from, to).and(replace(r, from, to)),
        Formula::Knows(a, g) => Formula::knows(a.clone(), replace(g, from, to)),
        Formula::Announce(l, r) => Formula::announce(replace(l, from, to), replace(r, from, to)),
        Formula::Arb(g) => Formula::arb(replace(g, from, to)),
    }
}

fn count(f: &Formula, target: &Formula) -> usize {
    if f == target {
        return 1;
    }
    match f {
        Formula::Top | Formula::Atom(_) => 0,
        Formula::Not(g) | Formula::Knows(_, g) | Formula::Arb(g) => count(g, target),
        Formula::And(l, r) | Formula::Announce(l, r) => count(l, target) + count(r, target),
    }
}

fn occurs_outside(f: &Formula, hole: &Formula, atom: &str) -> bool {
    replace(f, hole, &Formula::Top).vars().contains(atom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check_derivation;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn converts_strip_and_pad() {
        let mut d = Derivation::new();
        // an unchecked assumption line is enough to exercise the conversion shape
        let start = d.axiom(f("K a [q][p](r -> r)"), Axiom::P);
        let end = convert_rbox_one(&mut d, start, "p").unwrap();
        assert_eq!(d.formula(end), Some(&f("K a [q] A (r -> r)")));
        let errors = check_derivation(&d).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].line, Some(start));
    }

    #[test]
    fn rejects_unsupported_steps() {
        let mut d = Derivation::new();
        let start = d.axiom(f("[q](s -> [p] r)"), Axiom::P);
        assert_eq!(
            convert_rbox_one(&mut d, start, "p"),
            Err(ConvertError::StepNotMechanized(RewriteKind::AnnounceImplication))
        );
        let start = d.axiom(f("[p] p"), Axiom::P);
        assert_eq!(convert_rbox_one(&mut d, start, "p"), Err(ConvertError::NotFresh("p".into())));
        assert_eq!(convert_rbox_one(&mut d, 99, "p"), Err(ConvertError::MissingLine(99)));
    }

    #[test]
    fn difference_and_composition() {
        let a = f("s -> [q][u][p] r");
        let b = f("s -> [q & [q]u][p] r");
        let (x, y) = first_difference(&a, &b).unwrap();
        assert_eq!(composition(x, y), Some(f("[q][u][p] r <-> [q & [q]u][p] r")));
        assert_eq!(composition(y, x), None);
    }
}
