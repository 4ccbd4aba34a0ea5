//! Command-line front end.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bisim::n_bisimilar;
use crate::models::{FiniteModel, ModelSpec, DEFAULT_CLASS_CAP};
use crate::normalform::{pal_reduce, to_aanf};
use crate::proof::{check_derivation, Derivation};
use crate::sat::{
    closure_of, decide_sat, decide_valid, Mode, SatConfig, DEFAULT_CANDIDATE_CAP, DEFAULT_CL_CAP,
    DEFAULT_EXTRA_ATOMS, DEFAULT_MAX_STATES, DEFAULT_PALETTE, DEFAULT_SIGMA_CAP,
};
use crate::syntax::{parse_formula, Formula};
use crate::{bisim, fixtures, mc};

#[derive(Parser, Debug)]
#[command(name = "bapal", version, about = "Boolean arbitrary public announcement logic toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula at a state of a model file.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// Defaults to the model's designated state.
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        class_cap: usize,
    },
    /// Decide satisfiability.
    Sat {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        caps: Caps,
    },
    /// Decide validity.
    Valid {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        caps: Caps,
    },
    /// Print the arbitrary announcement normal form.
    Aanf {
        #[arg(long)]
        formula: String,
    },
    /// Eliminate announcements from an announcement-box-free formula.
    Reduce {
        #[arg(long)]
        formula: String,
    },
    /// Compare two pointed models up to (n-)bisimulation.
    Bisim {
        #[arg(long)]
        model1: PathBuf,
        #[arg(long)]
        model2: PathBuf,
        #[arg(long)]
        state1: String,
        #[arg(long)]
        state2: String,
        /// Check n-bisimilarity instead of full bisimilarity.
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated atoms to compare; defaults to all shared atoms.
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
    },
    /// List the closure of a formula.
    Closure {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = DEFAULT_CL_CAP)]
        cl_cap: usize,
    },
    /// Check a derivation file.
    Prove {
        #[arg(long)]
        derivation: PathBuf,
    },
    /// Built-in fixture models.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand, Debug)]
enum FixtureAction {
    List,
    /// Print a fixture model as JSON, or write it to `--out`.
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Caps {
    /// auto, faithful or oracle.
    #[arg(long, default_value = "auto")]
    mode: String,
    /// Largest model tried by the bounded search.
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    /// Atoms beyond the formula's own that the bounded search may use.
    #[arg(long, default_value_t = DEFAULT_EXTRA_ATOMS)]
    extra_atoms: usize,
    /// Colors available to closure models.
    #[arg(long, default_value_t = DEFAULT_PALETTE)]
    palette: usize,
    #[arg(long, default_value_t = DEFAULT_CL_CAP)]
    cl_cap: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA_CAP)]
    sigma_cap: usize,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    candidate_cap: usize,
    #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
    class_cap: usize,
}

impl Caps {
    fn config(&self) -> Result<SatConfig, String> {
        Ok(SatConfig {
            mode: self.mode.parse::<Mode>()?,
            max_states: self.max_states,
            extra_atoms: self.extra_atoms,
            palette: self.palette,
            cl_cap: self.cl_cap,
            sigma_cap: self.sigma_cap,
            candidate_cap: self.candidate_cap,
            class_cap: self.class_cap,
        })
    }
}

/// What a subcommand produced: exit code, verdict, witness and notes.
struct Outcome {
    code: i32,
    verdict: String,
    witness: Value,
    diagnostics: Vec<String>,
    /// Human output shows only the witness.
    bare: bool,
}

impl Outcome {
    fn new(code: i32, verdict: impl Into<String>) -> Outcome {
        Outcome {
            code,
            verdict: verdict.into(),
            witness: Value::Null,
            diagnostics: Vec::new(),
            bare: false,
        }
    }

    fn bare(witness: Value) -> Outcome {
        Outcome {
            witness,
            bare: true,
            ..Outcome::new(0, "ok")
        }
    }

    fn error(message: impl Into<String>) -> Outcome {
        Outcome {
            diagnostics: vec![message.into()],
            ..Outcome::new(2, "error")
        }
    }
}

/// Runs the command line `argv` (program name first), writing the report to
/// `out`, and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = dispatch(cli.command).unwrap_or_else(Outcome::error);
    let written = match cli.format {
        Format::Json => writeln!(
            out,
            "{}",
            json!({
                "verdict": outcome.verdict,
                "witness": outcome.witness,
                "diagnostics": outcome.diagnostics,
            })
        ),
        Format::Human => write_human(out, &outcome),
    };
    if written.is_err() {
        return 2;
    }
    outcome.code
}

fn write_human(out: &mut dyn Write, o: &Outcome) -> std::io::Result<()> {
    if !o.bare {
        writeln!(out, "{}", o.verdict)?;
    }
    match &o.witness {
        Value::Null => {}
        Value::String(s) => writeln!(out, "{s}")?,
        Value::Array(items) if items.iter().all(Value::is_string) => {
            for item in items {
                writeln!(out, "{}", item.as_str().unwrap_or_default())?;
            }
        }
        other => writeln!(out, "{}", serde_json::to_string_pretty(other).unwrap_or_default())?,
    }
    if !o.bare {
        for d in &o.diagnostics {
            writeln!(out, "# {d}")?;
        }
    }
    Ok(())
}

fn formula(text: &str) -> Result<Formula, String> {
    parse_formula(text).map_err(|e| format!("cannot parse formula: {e}"))
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<FiniteModel, String> {
    let spec = ModelSpec::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    spec.to_model().map_err(|e| format!("{}: {e}", path.display()))
}

fn state_of(model: &FiniteModel, name: Option<&str>) -> Result<usize, String> {
    match name {
        Some(n) => model.state_index(n).ok_or_else(|| format!("no state named {n}")),
        None => model
            .designated()
            .ok_or_else(|| "no --state given and the model designates none".to_string()),
    }
}

fn model_value(model: &FiniteModel) -> Value {
    serde_json::to_value(ModelSpec::from_model(model)).unwrap_or(Value::Null)
}

fn dispatch(command: Command) -> Result<Outcome, String> {
    match command {
        Command::Check {
            model,
            state,
            formula: text,
            class_cap,
        } => {
            let m = load_model(&model)?;
            let s = state_of(&m, state.as_deref())?;
            let phi = formula(&text)?;
            let ext = mc::extension_with_cap(&m, &phi, class_cap).map_err(|e| e.to_string())?;
            Ok(if ext.contains(s) {
                Outcome::new(0, "true")
            } else {
                Outcome::new(1, "false")
            })
        }
        Command::Sat { formula: text, caps } => {
            let report = decide_sat(&formula(&text)?, &caps.config()?);
            let code = match report.verdict {
                crate::sat::Verdict::Sat => 0,
                crate::sat::Verdict::Unsat => 1,
                _ => 2,
            };
            Ok(Outcome {
                witness: report.witness.as_ref().map_or(Value::Null, model_value),
                diagnostics: report.diagnostics,
                ..Outcome::new(code, report.verdict.to_string())
            })
        }
        Command::Valid { formula: text, caps } => {
            let report = decide_valid(&formula(&text)?, &caps.config()?);
            let code = match report.verdict {
                crate::sat::Validity::Valid => 0,
                crate::sat::Validity::Invalid => 1,
                _ => 2,
            };
            Ok(Outcome {
                witness: report.countermodel.as_ref().map_or(Value::Null, model_value),
                diagnostics: report.diagnostics,
                ..Outcome::new(code, report.verdict.to_string())
            })
        }
        Command::Aanf { formula: text } => Ok(Outcome::bare(Value::String(to_aanf(&formula(&text)?).to_string()))),
        Command::Reduce { formula: text } => {
            let phi = formula(&text)?;
            if phi.quantifier_depth() > 0 {
                return Err("reduce takes formulas without the announcement box".into());
            }
            Ok(Outcome::bare(Value::String(pal_reduce(&phi).to_string())))
        }
        Command::Bisim {
            model1,
            model2,
            state1,
            state2,
            n,
            atoms,
        } => {
            let (m, k) = (load_model(&model1)?, load_model(&model2)?);
            let s = state_of(&m, Some(&state1))?;
            let t = state_of(&k, Some(&state2))?;
            let atoms: Option<BTreeSet<String>> = atoms.map(|a| a.into_iter().collect());
            let related = match n {
                Some(depth) => n_bisimilar(&m, s, &k, t, depth, atoms.as_ref()),
                None => bisim::bisimilar(&m, s, &k, t, atoms.as_ref()).is_some(),
            };
            Ok(if related {
                Outcome::new(0, "true")
            } else {
                Outcome::new(1, "false")
            })
        }
        Command::Closure { formula: text, cl_cap } => {
            let phi = formula(&text)?;
            let cl = closure_of(&phi, cl_cap).map_err(|e| e.to_string())?;
            Ok(Outcome {
                diagnostics: vec![format!("{} members", cl.len())],
                ..Outcome::bare(Value::Array(cl.members().iter().map(|m| Value::String(m.to_string())).collect()))
            })
        }
        Command::Prove { derivation } => {
            let d = match Derivation::from_json(&read(&derivation)?) {
                Ok(d) => d,
                Err(errors) => {
                    return Ok(Outcome {
                        diagnostics: errors.iter().map(ToString::to_string).collect(),
                        ..Outcome::new(2, "malformed")
                    })
                }
            };
            Ok(match check_derivation(&d) {
                Ok(()) => Outcome {
                    witness: d.last().map_or(Value::Null, |l| Value::String(l.formula.to_string())),
                    diagnostics: vec![format!("{} lines checked", d.lines.len())],
                    ..Outcome::new(0, "accepted")
                },
                Err(errors) => Outcome {
                    diagnostics: errors.iter().map(ToString::to_string).collect(),
                    ..Outcome::new(1, "rejected")
                },
            })
        }
        Command::Fixtures { action } => match action {
            FixtureAction::List => Ok(Outcome::bare(Value::Array(
                fixtures::list().into_iter().map(Value::String).collect(),
            ))),
            FixtureAction::Emit { name, out } => {
                let model = fixtures::by_name(&name).ok_or_else(|| format!("no fixture named {name}"))?;
                let spec = ModelSpec::from_model(&model);
                match out {
                    Some(path) => {
                        std::fs::write(&path, spec.to_json())
                            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                        Ok(Outcome {
                            diagnostics: vec![format!("wrote {}", path.display())],
                            ..Outcome::new(0, "ok")
                        })
                    }
                    None => Ok(Outcome::bare(model_value(&model))),
                }
            }
        },
    }
}
