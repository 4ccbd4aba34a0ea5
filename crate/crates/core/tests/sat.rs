use bapal::mc::eval;
use bapal::sat::{
    closure_of, cross_check, decide_sat, decide_valid, enumerate_sigma, project, Gamma, Mode, SatConfig, Validity,
    Verdict,
};
use bapal::{fixtures, parse_formula, FiniteModel, Formula};

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

const PROJECTED: &[&str] = &["[T] A K a p", "[p] A K a p", "[T] A K b p", "~K a p & [q] A p", "[p] A q"];

fn fixture_models() -> Vec<(&'static str, FiniteModel)> {
    vec![("m", fixtures::model_m()), ("mprime", fixtures::model_mprime())]
}

#[test]
fn projections_preserve_closure_truth() {
    for text in PROJECTED {
        let phi = f(text);
        let cl = closure_of(&phi, 200).unwrap();
        for (name, m) in fixture_models() {
            let projected = (1..=4).find_map(|palette| {
                let sigma = enumerate_sigma(&cl, palette, 64).ok()?;
                let p = project(&m, &cl, &sigma).ok()?;
                Some((sigma, p))
            });
            let (sigma, p) = projected.unwrap_or_else(|| panic!("{text} on {name}: no palette up to 4 fits"));
            for s in 0..m.num_states() {
                for psi in cl.members() {
                    assert_eq!(
                        eval(&m, s, psi).unwrap(),
                        eval(&p.model, p.image[s], psi).unwrap(),
                        "{text} on {name}: {psi} at {}",
                        m.state_name(s)
                    );
                }
            }
            // Related images have equal knowledge profiles; the converse can fail.
            let profile = sigma.model(p.subset, None);
            let at = |pos: usize| profile.state_index(p.model.state_name(pos)).unwrap();
            for a in 0..sigma.agents().len() {
                for s in 0..m.num_states() {
                    for t in m.class_for(&sigma.agents()[a], s).iter() {
                        let (x, y) = (at(p.image[s]), at(p.image[t]));
                        assert!(profile.agent_class(a, x).contains(y), "{text} on {name}: agent {a}");
                    }
                }
            }
            // The profile-closed model on the same elements still agrees on the closure.
            for s in 0..m.num_states() {
                for psi in cl.members() {
                    assert_eq!(
                        eval(&m, s, psi).unwrap(),
                        eval(&profile, at(p.image[s]), psi).unwrap(),
                        "{text} on {name}: {psi} in the profile-closed model"
                    );
                }
            }
        }
    }
}

#[test]
fn projections_land_in_every_level() {
    let m = fixtures::model_m();
    for text in PROJECTED {
        let phi = f(text);
        let cl = closure_of(&phi, 200).unwrap();
        let Ok(sigma) = enumerate_sigma(&cl, 2, 20) else { continue };
        let Ok(p) = project(&m, &cl, &sigma) else { continue };
        let mut gamma = Gamma::new(&cl, &sigma, 20);
        let levels = gamma.fixpoint(1 << 20).unwrap();
        for (x, level) in levels.levels.iter().enumerate() {
            let mut rest = p.subset;
            while rest != 0 {
                let c = sigma.component(p.subset, rest.trailing_zeros() as usize);
                rest &= !c;
                assert!(level.contains(&c), "{text}: component {c:#b} missing from level {x}");
            }
        }
    }
}

#[test]
fn regression_verdicts() {
    let cfg = SatConfig {
        palette: 2,
        ..SatConfig::default()
    };
    for text in ["p & ~p", "K a p & ~p", "~p & A p", "[p] A q & p & ~q"] {
        assert_eq!(decide_sat(&f(text), &cfg).verdict, Verdict::Unsat, "{text}");
    }
    for text in ["p & ~K a p", "[p] A q & ~p", "E K a p & ~K a p"] {
        let r = decide_sat(&f(text), &cfg);
        assert_eq!(r.verdict, Verdict::Sat, "{text}");
        let w = r.witness.unwrap();
        assert!(eval(&w, w.designated().unwrap(), &f(text)).unwrap());
    }
    assert_eq!(decide_valid(&f("A p -> A A p"), &cfg).verdict, Validity::Valid);
    let report = decide_valid(&f("K a p -> K b p"), &cfg);
    assert_eq!(report.verdict, Validity::Invalid);
    let w = report.countermodel.unwrap();
    assert!(!eval(&w, w.designated().unwrap(), &f("K a p -> K b p")).unwrap());
}

#[test]
fn modes_never_contradict_on_small_boxes() {
    let cfg = SatConfig {
        palette: 1,
        ..SatConfig::default().with_mode(Mode::Auto)
    };
    for text in ["[p] A K a q", "~[p] A K a p", "[T] A ~K b K a p & K a p", "[q] A p & ~p & q"] {
        let c = cross_check(&f(text), &cfg);
        assert!(!c.contradictory(), "{text}: {:?}", c.disagreement());
    }
}
