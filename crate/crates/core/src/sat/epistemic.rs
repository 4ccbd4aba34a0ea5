use std::collections::HashMap;

use crate::models::{partition_from_labels, FiniteModel, ModelError, StateSet, MAX_STATES};
use crate::syntax::Formula;

use super::closure::Closure;
use super::sigma::{consistent_parts, knowledge_members};
use super::SatError;

/// Level-zero closure models containing `target`, found by eliminating
/// consistent parts that lack witnesses. Each candidate is a small witnessed
/// set grown from one surviving part, returned with that part designated.
pub fn level_zero_candidates(closure: &Closure, target: usize) -> Result<Vec<FiniteModel>, SatError> {
    let parts = consistent_parts(closure)?;
    let knows = knowledge_members(closure);
    let agents: Vec<String> = closure.formula().agents().into_iter().collect();
    let profile = |e: usize, a: &str| -> Vec<bool> {
        knows
            .iter()
            .filter(|(_, ag, _)| *ag == a)
            .map(|&(k, _, _)| parts[e].get(k))
            .collect()
    };
    let profiles: Vec<Vec<Vec<bool>>> = (0..parts.len())
        .map(|e| agents.iter().map(|a| profile(e, a)).collect())
        .collect();
    // Obligations: (agent index, body) for each false K_a body.
    let obligations: Vec<Vec<(usize, usize)>> = (0..parts.len())
        .map(|e| {
            knows
                .iter()
                .filter(|&&(k, _, _)| !parts[e].get(k))
                .map(|&(_, ag, body)| (agents.iter().position(|a| a == ag).unwrap(), body))
                .collect()
        })
        .collect();
    let mut groups: HashMap<(usize, &Vec<bool>), Vec<usize>> = HashMap::new();
    for (e, per_agent) in profiles.iter().enumerate() {
        for (a, p) in per_agent.iter().enumerate() {
            groups.entry((a, p)).or_default().push(e);
        }
    }
    let mut alive = vec![true; parts.len()];
    let witness = |alive: &[bool], e: usize, (a, body): (usize, usize)| -> Option<usize> {
        groups[&(a, &profiles[e][a])]
            .iter()
            .copied()
            .find(|&f| alive[f] && !parts[f].get(body))
    };
    loop {
        let mut changed = false;
        for e in 0..parts.len() {
            if alive[e] && obligations[e].iter().any(|&o| witness(&alive, e, o).is_none()) {
                alive[e] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let vars: Vec<String> = closure.formula().vars().into_iter().collect();
    let mut out = Vec::new();
    for e in 0..parts.len() {
        if !alive[e] || !parts[e].get(target) {
            continue;
        }
        let mut chosen = vec![e];
        let mut i = 0;
        while i < chosen.len() {
            let x = chosen[i];
            for &o in &obligations[x] {
                let f = witness(&alive, x, o).expect("survivors are witnessed");
                if !chosen.contains(&f) {
                    chosen.push(f);
                }
            }
            i += 1;
        }
        if chosen.len() > MAX_STATES {
            return Err(SatError::from_model(ModelError::Invalid(vec![
                crate::models::ModelViolation::TooManyStates(chosen.len()),
            ])));
        }
        let partitions = (0..agents.len())
            .map(|a| {
                let mut labels = Vec::new();
                let mut seen: Vec<&Vec<bool>> = Vec::new();
                for &x in &chosen {
                    let p = &profiles[x][a];
                    let l = seen.iter().position(|q| *q == p).unwrap_or_else(|| {
                        seen.push(p);
                        seen.len() - 1
                    });
                    labels.push(l);
                }
                partition_from_labels(&labels)
            })
            .collect();
        let valuation: Vec<StateSet> = vars
            .iter()
            .map(|p| {
                let i = closure.index_of(&Formula::atom(p.clone())).expect("atoms are closure members");
                (0..chosen.len()).filter(|&k| parts[chosen[k]].get(i)).collect()
            })
            .collect();
        let model = FiniteModel::from_parts(
            vars.clone(),
            agents.clone(),
            chosen.iter().map(|x| format!("s{x}")).collect(),
            partitions,
            valuation,
            Some(0),
        )
        .expect("witnessed sets are well-formed models");
        out.push(model);
    }
    Ok(out)
}
