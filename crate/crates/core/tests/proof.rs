use bapal::fixtures;
use bapal::mc::holds_everywhere;
use bapal::proof::examples::{accepted, axiom_instances, mutations};
use bapal::proof::{check_derivation, check_json, Axiom, Derivation};
use bapal::sat::{decide_valid, Mode, SatConfig, Validity};

#[test]
fn accepted_lines_hold_on_fixture_models() {
    let models = [fixtures::model_m(), fixtures::model_mprime(), fixtures::o_chain(3)];
    for (name, d) in accepted() {
        for line in &d.lines {
            for m in &models {
                assert!(holds_everywhere(m, &line.formula).unwrap(), "{name} line {}", line.index);
            }
        }
    }
}

#[test]
fn accepted_lines_are_valid_where_caps_allow() {
    let cfg = SatConfig {
        palette: 1,
        mode: Mode::Faithful,
        ..SatConfig::default()
    };
    let mut decided = 0;
    for (name, d) in accepted() {
        for line in &d.lines {
            let report = decide_valid(&line.formula, &cfg);
            assert_ne!(report.verdict, Validity::Invalid, "{name} line {}: {}", line.index, line.formula);
            decided += usize::from(report.verdict == Validity::Valid);
        }
    }
    assert!(decided > 0);
}

#[test]
fn fixtures_survive_json() {
    for (name, d) in accepted() {
        let back = check_json(&d.to_json()).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        assert_eq!(back, d);
    }
    for m in mutations() {
        let back = Derivation::from_json(&m.derivation.to_json()).unwrap();
        assert_eq!(check_derivation(&back).unwrap_err()[0].kind, m.expected, "{}", m.name);
    }
}

#[test]
fn every_schema_has_accepted_and_rejected_instances() {
    let accepted: Vec<Axiom> = axiom_instances().into_iter().map(|(a, _)| a).collect();
    let rejected: Vec<&str> = mutations().iter().map(|m| m.target).collect();
    for axiom in Axiom::ALL {
        assert!(accepted.contains(&axiom), "{axiom}");
        assert!(rejected.contains(&axiom.name()), "{axiom}");
    }
    for rule in ["MP", "NecK", "NecA", "RBox"] {
        assert!(rejected.contains(&rule), "{rule}");
    }
}
