//! Satisfiability through closure models, with a bounded model search as a
//! fast path and cross-check.

mod closure;
mod epistemic;
mod gamma;
mod oracle;
mod projection;
mod sigma;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use closure::{aanf_subformulas, as_announced_box, closure_of, within_size_bound, Bits, Closure, DEFAULT_CL_CAP};
pub use epistemic::level_zero_candidates;
pub use gamma::{valuation_classes, Candidate, Gamma, GammaLevels, Table, DEFAULT_CANDIDATE_CAP};
pub use oracle::{oracle_search, restricted_growth_strings, DEFAULT_EXTRA_ATOMS, DEFAULT_MAX_STATES};
pub use projection::{project, Projection};
pub use sigma::{enumerate_sigma, iter_bits, MaximalPhiSet, SigmaSet, DEFAULT_PALETTE, DEFAULT_SIGMA_CAP};

use crate::mc::{eval, McError};
use crate::models::{FiniteModel, ModelError, DEFAULT_CLASS_CAP};
use crate::normalform::to_aanf;
use crate::syntax::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("formula is not in arbitrary announcement normal form: {0}")]
    NotAanf(Formula),
    #[error("closure has {size} members, above the cap of {cap}")]
    ClosureCap { size: usize, cap: usize },
    #[error("{}", match size { Some(n) => format!("sigma has {n} elements, above the cap of {cap}"), None => format!("more than {cap} consistent parts") })]
    SigmaCap { size: Option<usize>, cap: usize },
    #[error("more than {cap} candidate models at level {level}")]
    CandidateCap { level: usize, cap: usize },
    #[error("{classes} valuation classes, above the cap of {cap}")]
    ClassCap { classes: usize, cap: usize },
    #[error("projection needs {needed} colors but the palette has {palette}")]
    PaletteTooSmall { needed: usize, palette: usize },
    #[error(transparent)]
    Check(#[from] McError),
}

impl SatError {
    pub(crate) fn from_model(e: ModelError) -> SatError {
        match e {
            ModelError::ClassCapExceeded { classes, cap } => SatError::ClassCap { classes, cap },
            other => SatError::Check(McError::Model(other)),
        }
    }

    /// Whether the error only reflects a configured bound.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            SatError::ClosureCap { .. }
                | SatError::SigmaCap { .. }
                | SatError::CandidateCap { .. }
                | SatError::ClassCap { .. }
                | SatError::Check(McError::Model(ModelError::ClassCapExceeded { .. }))
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Closure models first, bounded search when they are inconclusive.
    Auto,
    /// Closure models only.
    Faithful,
    /// Bounded search only.
    Oracle,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "auto" => Ok(Mode::Auto),
            "faithful" => Ok(Mode::Faithful),
            "oracle" => Ok(Mode::Oracle),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SatConfig {
    pub mode: Mode,
    pub max_states: usize,
    pub extra_atoms: usize,
    pub palette: usize,
    pub cl_cap: usize,
    pub sigma_cap: usize,
    pub candidate_cap: usize,
    pub class_cap: usize,
}

impl Default for SatConfig {
    fn default() -> SatConfig {
        SatConfig {
            mode: Mode::Auto,
            max_states: DEFAULT_MAX_STATES,
            extra_atoms: DEFAULT_EXTRA_ATOMS,
            palette: DEFAULT_PALETTE,
            cl_cap: DEFAULT_CL_CAP,
            sigma_cap: DEFAULT_SIGMA_CAP,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            class_cap: DEFAULT_CLASS_CAP,
        }
    }
}

impl SatConfig {
    pub fn with_mode(mut self, mode: Mode) -> SatConfig {
        self.mode = mode;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    ResourceExceeded,
    /// Neither a verified model nor a refutation: the bounded search came up
    /// empty, or closure models claimed satisfiability but none survived
    /// model checking.
    Inconclusive,
}

impl Verdict {
    pub fn is_conclusive(self) -> bool {
        matches!(self, Verdict::Sat | Verdict::Unsat)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::ResourceExceeded => "resource-exceeded",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SatReport {
    pub verdict: Verdict,
    /// A model whose designated state satisfies the formula; always checked.
    pub witness: Option<FiniteModel>,
    pub diagnostics: Vec<String>,
}

impl SatReport {
    fn new(verdict: Verdict) -> SatReport {
        SatReport {
            verdict,
            witness: None,
            diagnostics: Vec::new(),
        }
    }

    fn note(mut self, message: impl Into<String>) -> SatReport {
        self.diagnostics.push(message.into());
        self
    }
}

pub fn decide_sat(formula: &Formula, config: &SatConfig) -> SatReport {
    match config.mode {
        Mode::Oracle => oracle_sat(formula, config),
        Mode::Faithful => faithful_sat(formula, config),
        Mode::Auto => {
            let first = faithful_sat(formula, config);
            if first.verdict.is_conclusive() {
                return first;
            }
            let mut report = oracle_sat(formula, config);
            if report.verdict != Verdict::Sat {
                report.verdict = first.verdict;
            }
            let mut diagnostics = first.diagnostics;
            diagnostics.append(&mut report.diagnostics);
            report.diagnostics = diagnostics;
            report
        }
    }
}

pub fn oracle_sat(formula: &Formula, config: &SatConfig) -> SatReport {
    match oracle_search(formula, config.max_states, config.extra_atoms) {
        Ok(Some(model)) => SatReport {
            verdict: Verdict::Sat,
            witness: Some(model),
            diagnostics: vec!["model found by bounded search".into()],
        },
        Ok(None) => SatReport::new(Verdict::Inconclusive).note(format!(
            "no model with at most {} states and {} extra atoms",
            config.max_states, config.extra_atoms
        )),
        Err(e) => resource_or_error(SatError::Check(e)),
    }
}

fn resource_or_error(e: SatError) -> SatReport {
    let verdict = if e.is_resource() {
        Verdict::ResourceExceeded
    } else {
        Verdict::Inconclusive
    };
    SatReport::new(verdict).note(e.to_string())
}

/// Decides satisfiability from closure models alone. A closure model
/// containing the formula is only reported once model checking confirms it.
pub fn faithful_sat(formula: &Formula, config: &SatConfig) -> SatReport {
    match faithful(formula, config) {
        Ok(report) => report,
        Err(e) => resource_or_error(e),
    }
}

fn faithful(formula: &Formula, config: &SatConfig) -> Result<SatReport, SatError> {
    let normal = to_aanf(formula);
    let closure = closure_of(&normal, config.cl_cap)?;
    let target = closure.index_of(&normal).expect("formula is in its closure");
    let mut diagnostics = vec![format!("closure size {}", closure.len())];
    let mut unverified = 0usize;
    let mut verify = |model: FiniteModel, diagnostics: &mut Vec<String>| -> Result<Option<FiniteModel>, SatError> {
        let s = model.designated().expect("candidates are pointed");
        if eval(&model, s, formula)? {
            return Ok(Some(model));
        }
        unverified += 1;
        if unverified <= 3 {
            diagnostics.push(format!(
                "closure model on {{{}}} holds the formula at {} but model checking disagrees",
                model.states().join(", "),
                model.state_name(s)
            ));
        }
        Ok(None)
    };

    let depth = closure.depth();
    if depth == 0 {
        // Without arbitrary announcements the fresh atoms are never
        // consulted, and level zero is closed under unions, so elimination
        // finds every closure model.
        for model in level_zero_candidates(&closure, target)? {
            if let Some(w) = verify(model, &mut diagnostics)? {
                return Ok(found(w, diagnostics));
            }
        }
        return Ok(finish(unverified, diagnostics));
    }

    let sigma = enumerate_sigma(&closure, config.palette, config.sigma_cap)?;
    diagnostics.push(format!(
        "sigma size {}; a palette of {} colors stands in for the fresh atoms",
        sigma.len(),
        sigma.palette()
    ));
    let mut gamma = Gamma::new(&closure, &sigma, config.class_cap);
    let mut current = gamma.level_zero(config.candidate_cap)?;
    diagnostics.push(format!("level 0 has {} connected candidates", current.len()));
    for x in 1..depth {
        let table = gamma.table(&current);
        let mut next = Vec::new();
        for &m in &current {
            if gamma.satisfies(m, x, &table)? {
                next.push(m);
            }
        }
        current = next;
        diagnostics.push(format!("level {x} has {} connected candidates", current.len()));
    }
    let table = gamma.table(&current);
    for &m in &current {
        let holders: Vec<usize> = iter_bits(m).filter(|&e| sigma.holds(e, target)).collect();
        if holders.is_empty() || !gamma.satisfies(m, depth, &table)? {
            continue;
        }
        for e in holders {
            if let Some(w) = verify(sigma.model(m, Some(e)), &mut diagnostics)? {
                let colors: BTreeSet<usize> = iter_bits(m).map(|e| sigma.elements()[e].color).collect();
                diagnostics.push(format!("witness uses {} of {} colors", colors.len(), sigma.palette()));
                return Ok(found(w, diagnostics));
            }
        }
    }
    Ok(finish(unverified, diagnostics))
}

fn found(witness: FiniteModel, diagnostics: Vec<String>) -> SatReport {
    SatReport {
        verdict: Verdict::Sat,
        witness: Some(witness),
        diagnostics,
    }
}

fn finish(unverified: usize, mut diagnostics: Vec<String>) -> SatReport {
    if unverified == 0 {
        return SatReport {
            verdict: Verdict::Unsat,
            witness: None,
            diagnostics,
        };
    }
    diagnostics.push(format!("{unverified} closure-model states failed model checking"));
    SatReport {
        verdict: Verdict::Inconclusive,
        witness: None,
        diagnostics,
    }
}

/// Both procedures run side by side.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub oracle: SatReport,
    pub faithful: SatReport,
}

impl CrossCheck {
    /// A bounded-search model against a closure-model refutation.
    pub fn contradictory(&self) -> bool {
        self.oracle.verdict == Verdict::Sat && self.faithful.verdict == Verdict::Unsat
    }

    pub fn disagreement(&self) -> Option<String> {
        self.contradictory().then(|| {
            "disagreement: bounded search found a model but closure models refute the formula".to_string()
        })
    }
}

pub fn cross_check(formula: &Formula, config: &SatConfig) -> CrossCheck {
    let mut faithful = faithful_sat(formula, config);
    let oracle = oracle_sat(formula, config);
    let out = CrossCheck { oracle, faithful: faithful.clone() };
    if let Some(d) = out.disagreement() {
        faithful.diagnostics.push(d);
        return CrossCheck { faithful, ..out };
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid,
    ResourceExceeded,
    Inconclusive,
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validity::Valid => "valid",
            Validity::Invalid => "invalid",
            Validity::ResourceExceeded => "resource-exceeded",
            Validity::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ValidityReport {
    pub verdict: Validity,
    /// A model whose designated state refutes the formula.
    pub countermodel: Option<FiniteModel>,
    pub diagnostics: Vec<String>,
}

/// `φ` is valid iff `¬φ` is unsatisfiable.
pub fn decide_valid(formula: &Formula, config: &SatConfig) -> ValidityReport {
    let report = decide_sat(&formula.clone().not(), config);
    ValidityReport {
        verdict: match report.verdict {
            Verdict::Sat => Validity::Invalid,
            Verdict::Unsat => Validity::Valid,
            Verdict::ResourceExceeded => Validity::ResourceExceeded,
            Verdict::Inconclusive => Validity::Inconclusive,
        },
        countermodel: report.witness,
        diagnostics: report.diagnostics,
    }
}
