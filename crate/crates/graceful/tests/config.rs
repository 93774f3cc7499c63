use std::fs;

use graceful::config::{load, parse, save, to_toml};
use graceful::Error;
use graceful_core::scenario::default_intersection;
use graceful_core::StrategyKind;
use proptest::prelude::*;

#[test]
fn empty_file_is_the_default_intersection() {
    let loaded = parse("").unwrap();
    assert_eq!(loaded.config, default_intersection());
    assert!(loaded.warnings.is_empty());
}

#[test]
fn aggressive_h_override() {
    let loaded = parse("[h]\nintent = 1e9\n").unwrap();
    assert_eq!(loaded.config, default_intersection().with_intents(1.0, 1e9));
    assert_eq!(loaded.warnings.len(), 1);
    assert!(loaded.warnings[0].contains("not in the decoding set"));
}

#[test]
fn syntax_errors_carry_a_location() {
    match parse("horizon = 100\ncandidates = [1, 2\n") {
        Err(Error::Parse { line, column, .. }) => {
            assert_eq!(line, 2);
            assert!(column >= 1);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    match parse("[m]\nintent = = 2\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn unknown_keys_and_bad_types_are_schema_errors() {
    assert!(matches!(parse("horizn = 3\n"), Err(Error::Schema { .. })));
    match parse("[m]\nintent = \"fast\"\n") {
        Err(Error::Schema { message, .. }) => assert!(message.contains("invalid type"), "{message}"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn every_violation_is_listed() {
    match parse("candidates = []\nhorizon = 0\n") {
        Err(Error::Validation(v)) => {
            assert!(v.iter().any(|e| e == "empty candidate set"));
            assert!(v.iter().any(|e| e.contains("horizon")));
        }
        other => panic!("expected validation errors, got {other:?}"),
    }
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let mut s = default_intersection().with_strategies(StrategyKind::SociallyAware { beta: 0.3 }, StrategyKind::Proactive);
    s.m.empathetic = false;
    s.exit_margin = Some(0.5);
    save(&s, &path).unwrap();
    assert_eq!(load(&path).unwrap().config, s);
    assert!(matches!(load(&dir.path().join("missing.toml")), Err(Error::Io { .. })));
    fs::write(&path, "sim_ticks = 7\n").unwrap();
    assert_eq!(load(&path).unwrap().config.sim_ticks, 7);
}

fn strategy() -> impl Strategy<Value = StrategyKind> {
    prop_oneof![
        Just(StrategyKind::Reactive),
        Just(StrategyKind::Proactive),
        (0.0f64..10.0).prop_map(|beta| StrategyKind::SociallyAware { beta }),
    ]
}

proptest! {
    #[test]
    fn serialised_scenarios_load_back_exactly(
        m in strategy(), h in strategy(),
        c_m in prop_oneof![Just(1.0), Just(1e3), Just(1e9), 0.01f64..1e6],
        c_h in prop_oneof![Just(1.0), Just(1e3), Just(1e9), 0.01f64..1e6],
        ticks in 1usize..500, a in 0.1f64..20.0, half in 0.1f64..5.0,
        empathetic in any::<bool>(),
    ) {
        let mut s = default_intersection().with_strategies(m, h).with_intents(c_m, c_h);
        s.sim_ticks = ticks;
        s.loss.a = a;
        s.loss.interaction_region = graceful_core::Rect::centered_square(half);
        s.h.empathetic = empathetic;
        prop_assert_eq!(parse(&to_toml(&s)).unwrap().config, s);
    }
}
