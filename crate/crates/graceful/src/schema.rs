//! Versioned JSON Schemas of the documents the CLI writes.

/// Bumped whenever a field of an emitted JSON document changes meaning or
/// disappears.
pub const SCHEMA_VERSION: u32 = 1;

pub const METRICS: &str = include_str!("../schema/metrics.schema.json");
pub const RESULTS: &str = include_str!("../schema/results.schema.json");
pub const ABLATION: &str = include_str!("../schema/ablation.schema.json");
pub const TRACE_RECORD: &str = include_str!("../schema/trace-record.schema.json");

/// `(file name, schema text)` of every schema.
pub const ALL: [(&str, &str); 4] = [
    ("metrics.schema.json", METRICS),
    ("results.schema.json", RESULTS),
    ("ablation.schema.json", ABLATION),
    ("trace-record.schema.json", TRACE_RECORD),
];
