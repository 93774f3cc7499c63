//! Result tables of the experiment runs and their CSV and JSON forms.
//!
//! CSV columns, in order:
//!
//! | column | content |
//! |---|---|
//! | `m_strategy`, `h_strategy` | `reactive`, `proactive` or `social` |
//! | `beta` | gracefulness weight of a social M, empty otherwise |
//! | `c_m`, `c_h` | true intents |
//! | `q_grace` | accumulated gracefulness |
//! | `q_grace_e3` | `q_grace` in thousandths |
//! | `q_eff` | first agreement tick, or `inf` |
//! | `right_of_way` | `M`, `H` or `none` |
//! | `ticks` | executed ticks |
//! | `error` | fault message; the metric columns are empty when set |
//!
//! Numbers use the shortest representation that parses back exactly.

use std::io::{Read, Write};

use graceful_core::error::AgentId;
use graceful_core::simulation::{metrics, Efficiency};
use graceful_core::{ScenarioConfig, SimulationTrace, StrategyKind};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::SCHEMA_VERSION;

pub const CSV_COLUMNS: [&str; 11] = [
    "m_strategy",
    "h_strategy",
    "beta",
    "c_m",
    "c_h",
    "q_grace",
    "q_grace_e3",
    "q_eff",
    "right_of_way",
    "ticks",
    "error",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub m_strategy: String,
    pub h_strategy: String,
    pub beta: Option<f64>,
    pub c_m: f64,
    pub c_h: f64,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Finished {
        q_grace: f64,
        q_eff: Efficiency,
        right_of_way: Option<AgentId>,
        ticks: usize,
    },
    Fault {
        error: String,
    },
}

impl ResultRow {
    /// Row keys of a scenario, without an outcome yet.
    pub fn keyed(scenario: &ScenarioConfig, outcome: Outcome) -> Self {
        let beta = match scenario.m.strategy {
            StrategyKind::SociallyAware { beta } => Some(beta),
            _ => None,
        };
        Self {
            m_strategy: scenario.m.strategy.name().to_string(),
            h_strategy: scenario.h.strategy.name().to_string(),
            beta,
            c_m: scenario.m.intent,
            c_h: scenario.h.intent,
            outcome,
        }
    }

    pub fn from_run(scenario: &ScenarioConfig, run: &std::result::Result<SimulationTrace, graceful_core::Error>) -> Self {
        let outcome = match run {
            Ok(trace) => {
                let m = metrics(trace);
                Outcome::Finished {
                    q_grace: m.q_grace,
                    q_eff: m.q_eff,
                    right_of_way: m.right_of_way,
                    ticks: trace.executed_ticks(),
                }
            }
            Err(e) => Outcome::Fault { error: e.to_string() },
        };
        Self::keyed(scenario, outcome)
    }

    pub fn q_grace(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Finished { q_grace, .. } => Some(q_grace),
            Outcome::Fault { .. } => None,
        }
    }

    pub fn q_eff(&self) -> Option<Efficiency> {
        match self.outcome {
            Outcome::Finished { q_eff, .. } => Some(q_eff),
            Outcome::Fault { .. } => None,
        }
    }

    pub fn right_of_way(&self) -> Option<AgentId> {
        match self.outcome {
            Outcome::Finished { right_of_way, .. } => right_of_way,
            Outcome::Fault { .. } => None,
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        let num = |x: f64| format!("{x:?}");
        let mut f = vec![
            self.m_strategy.clone(),
            self.h_strategy.clone(),
            self.beta.map(num).unwrap_or_default(),
            num(self.c_m),
            num(self.c_h),
        ];
        match &self.outcome {
            Outcome::Finished {
                q_grace,
                q_eff,
                right_of_way,
                ticks,
            } => f.extend([
                num(*q_grace),
                num(q_grace * 1e3),
                q_eff.to_string(),
                right_of_way.map_or_else(|| "none".to_string(), |a| a.to_string()),
                ticks.to_string(),
                String::new(),
            ]),
            Outcome::Fault { error } => {
                f.extend(std::iter::repeat_n(String::new(), 5));
                f.push(error.clone());
            }
        }
        f
    }

    fn from_csv_fields(r: &csv::StringRecord) -> Result<Self> {
        let get = |k: usize| r.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            get(k)
                .parse()
                .map_err(|_| Error::Table(format!("column {} is not a number: {:?}", CSV_COLUMNS[k], get(k))))
        };
        let outcome = if !get(10).is_empty() {
            Outcome::Fault {
                error: get(10).to_string(),
            }
        } else {
            let q_eff = match get(7) {
                "inf" => Efficiency::Never,
                t => Efficiency::Tick(t.parse().map_err(|_| Error::Table(format!("bad q_eff {t:?}")))?),
            };
            let right_of_way = match get(8) {
                "M" => Some(AgentId::M),
                "H" => Some(AgentId::H),
                "none" => None,
                v => return Err(Error::Table(format!("bad right_of_way {v:?}"))),
            };
            Outcome::Finished {
                q_grace: num(5)?,
                q_eff,
                right_of_way,
                ticks: get(9).parse().map_err(|_| Error::Table(format!("bad ticks {:?}", get(9))))?,
            }
        };
        Ok(Self {
            m_strategy: get(0).to_string(),
            h_strategy: get(1).to_string(),
            beta: if get(2).is_empty() { None } else { Some(num(2)?) },
            c_m: num(3)?,
            c_h: num(4)?,
            outcome,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub schema_version: u32,
    /// `matrix` or `beta_sweep`.
    pub kind: String,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(kind: &str, rows: Vec<ResultRow>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            rows,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.csv_fields())?;
        }
        w.flush().map_err(Error::io("<csv>"))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// The kind is not part of the CSV form and must be supplied.
    pub fn read_csv<R: Read>(kind: &str, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().ne(CSV_COLUMNS) {
            return Err(Error::Table(format!("unexpected header {:?}", header)));
        }
        let rows = r
            .records()
            .map(|rec| ResultRow::from_csv_fields(&rec?))
            .collect::<Result<_>>()?;
        Ok(Self::new(kind, rows))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
