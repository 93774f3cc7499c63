use graceful::experiments::{run_beta_sweep, run_full_matrix, run_matrix, ExperimentMatrix};
use graceful::table::{Outcome, ResultRow, ResultTable, CSV_COLUMNS};
use graceful::trace::{read_trace, write_trace, MetricsDocument};
use graceful_core::error::AgentId;
use graceful_core::scenario::default_intersection;
use graceful_core::simulation::{run, Efficiency};
use graceful_core::StrategyKind;

fn short() -> graceful_core::ScenarioConfig {
    let mut s = default_intersection();
    s.sim_ticks = 12;
    s
}

fn sample() -> ResultTable {
    let s = default_intersection();
    ResultTable::new(
        "matrix",
        vec![
            ResultRow::keyed(
                &s,
                Outcome::Finished {
                    q_grace: 0.1 + 0.2,
                    q_eff: Efficiency::Never,
                    right_of_way: None,
                    ticks: 100,
                },
            ),
            ResultRow::keyed(
                &s.clone().with_strategies(StrategyKind::SociallyAware { beta: 0.15 }, StrategyKind::Reactive),
                Outcome::Finished {
                    q_grace: 6.666666666666667e-5,
                    q_eff: Efficiency::Tick(44),
                    right_of_way: Some(AgentId::H),
                    ticks: 61,
                },
            ),
            ResultRow::keyed(
                &s.with_intents(1.0, 1e9),
                Outcome::Fault {
                    error: "agent M failed at tick 3: no feasible candidate motion".into(),
                },
            ),
        ],
    )
}

#[test]
fn csv_round_trips_and_uses_the_fixed_columns() {
    let t = sample();
    let text = t.to_csv();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert!(text.lines().nth(1).unwrap().contains(",inf,none,"));
    assert_eq!(ResultTable::read_csv("matrix", text.as_bytes()).unwrap(), t);
}

#[test]
fn json_round_trips_with_inf_as_a_token() {
    let t = sample();
    let text = t.to_json();
    assert!(text.contains("\"q_eff\": \"inf\""));
    assert!(text.contains("\"schema_version\": 1"));
    assert_eq!(ResultTable::from_json(&text).unwrap(), t);
}

#[test]
fn bad_csv_is_rejected() {
    assert!(ResultTable::read_csv("matrix", "a,b\n1,2\n".as_bytes()).is_err());
    let mut text = sample().to_csv();
    text = text.replace(",inf,", ",never,");
    assert!(ResultTable::read_csv("matrix", text.as_bytes()).is_err());
}

#[test]
fn matrix_has_nine_cells_per_intent_setting() {
    let runs = run_matrix(&short());
    assert_eq!(runs.len(), 9);
    let (table, _) = run_full_matrix(&short(), &ExperimentMatrix::default());
    assert_eq!(table.rows.len(), 18);
    assert_eq!(table.rows[9].c_h, 1e9);
    let text = table.to_csv();
    assert_eq!(ResultTable::read_csv("matrix", text.as_bytes()).unwrap(), table);
}

#[test]
fn cells_match_standalone_runs() {
    let runs = run_matrix(&short());
    for cell in &runs {
        let alone = run(cell.scenario.clone());
        assert_eq!(&alone, &cell.result);
    }
}

#[test]
fn faulting_cells_do_not_abort_the_matrix() {
    let mut base = short();
    // H is boxed in, so every cell faults at the first planned tick
    let start = base.h.start;
    base.h.bounds = Some(graceful_core::Rect {
        min: start,
        max: start,
    });
    base.candidates = vec![1.0, 2.0];
    base.m.initial_motion = 1.0;
    base.h.initial_motion = 1.0;
    let runs = run_matrix(&base);
    assert_eq!(runs.len(), 9);
    for cell in &runs {
        let row = cell.row();
        assert!(matches!(row.outcome, Outcome::Fault { .. }), "{row:?}");
    }
}

#[test]
fn single_beta_gives_one_row() {
    let (table, _) = run_beta_sweep(&short(), &[0.3]);
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0].beta, Some(0.3));
    assert_eq!(table.rows[0].m_strategy, "social");
    assert_eq!(table.rows[0].h_strategy, "reactive");
}

#[test]
fn traces_round_trip_line_by_line() {
    let trace = run(short()).unwrap();
    let mut buf = Vec::new();
    write_trace(&trace, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), trace.records.len());
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["tick", "states", "motions", "actions", "inference", "wanted_by_h", "agreement"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(read_trace(text.as_bytes()).unwrap(), trace.records);
}

#[test]
fn documents_carry_the_schema_fields() {
    let trace = run(short()).unwrap();
    let doc = serde_json::to_value(MetricsDocument::new(&trace)).unwrap();
    let tick = serde_json::to_value(&trace.records[1]).unwrap();
    let table = serde_json::to_value(sample()).unwrap();
    for (schema, value) in [
        (graceful::schema::METRICS, &doc),
        (graceful::schema::TRACE_RECORD, &tick),
        (graceful::schema::RESULTS, &table),
    ] {
        let schema: serde_json::Value = serde_json::from_str(schema).unwrap();
        for key in schema["required"].as_array().unwrap() {
            assert!(value.get(key.as_str().unwrap()).is_some(), "missing {key}");
        }
    }
    assert_eq!(doc["schema_version"], graceful::schema::SCHEMA_VERSION);
}
