//! Line-delimited JSON traces and the metrics document.

use std::io::{BufRead, Write};

use graceful_core::error::AgentId;
use graceful_core::simulation::{metrics, Efficiency, TickRecord};
use graceful_core::{ScenarioConfig, SimulationTrace};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::SCHEMA_VERSION;

/// One [`TickRecord`] per line, in tick order.
pub fn write_trace<W: Write>(trace: &SimulationTrace, mut out: W) -> Result<()> {
    for r in &trace.records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(Error::io("<trace>"))?;
    }
    out.flush().map_err(Error::io("<trace>"))
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TickRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line.map_err(Error::io("<trace>"))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub schema_version: u32,
    pub scenario: ScenarioConfig,
    pub executed_ticks: usize,
    pub q_grace: f64,
    /// `q_grace` in thousandths.
    pub q_grace_e3: f64,
    pub q_eff: Efficiency,
    pub right_of_way: Option<AgentId>,
    /// Gracefulness increment of every record, tick 0 included.
    pub grace_increments: Vec<f64>,
}

impl MetricsDocument {
    pub fn new(trace: &SimulationTrace) -> Self {
        let m = metrics(trace);
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: trace.scenario.clone(),
            executed_ticks: trace.executed_ticks(),
            q_grace: m.q_grace,
            q_grace_e3: m.q_grace * 1e3,
            q_eff: m.q_eff,
            right_of_way: m.right_of_way,
            grace_increments: m.grace_increments,
        }
    }
}
