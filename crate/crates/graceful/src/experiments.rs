//! Strategy matrix, gracefulness-weight sweep and empathy ablation.

use std::thread;

use graceful_core::error::AgentId;
use graceful_core::game::{AgentState, Intent};
use graceful_core::scenario::{all_strategies, DEFAULT_BETA};
use graceful_core::simulation::{metrics, run, MetricsReport};
use graceful_core::{ScenarioConfig, SimulationTrace, StrategyKind, World};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::schema::SCHEMA_VERSION;
use crate::table::{ResultRow, ResultTable};

pub const SWEEP_BETAS: [f64; 6] = [0.05, 0.10, 0.15, 0.30, 0.50, 0.70];

/// Strategy pairs, intent settings and sweep weights. One cell is one
/// scenario override of a base configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentMatrix {
    pub strategies: Vec<StrategyKind>,
    /// `(c_M, c_H)` settings, one matrix run each.
    pub intents: Vec<(f64, f64)>,
    pub betas: Vec<f64>,
}

impl Default for ExperimentMatrix {
    fn default() -> Self {
        Self {
            strategies: all_strategies().to_vec(),
            intents: vec![(1.0, 1.0), (1.0, 1e9)],
            betas: SWEEP_BETAS.to_vec(),
        }
    }
}

impl ExperimentMatrix {
    /// Every `(P_M, P_H)` override of `base`, M-major.
    pub fn cells(&self, base: &ScenarioConfig) -> Vec<ScenarioConfig> {
        let mut out = Vec::with_capacity(self.strategies.len() * self.strategies.len());
        for &m in &self.strategies {
            for &h in &self.strategies {
                out.push(base.clone().with_strategies(m, h));
            }
        }
        out
    }
}

/// A finished or faulted cell with its keys.
#[derive(Clone, Debug)]
pub struct CellRun {
    pub scenario: ScenarioConfig,
    pub result: std::result::Result<SimulationTrace, graceful_core::Error>,
}

impl CellRun {
    pub fn row(&self) -> ResultRow {
        ResultRow::from_run(&self.scenario, &self.result)
    }
}

/// Runs independent scenarios on scoped threads; the output order is the
/// input order.
pub fn run_cells(scenarios: Vec<ScenarioConfig>) -> Vec<CellRun> {
    thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .into_iter()
            .map(|scenario| {
                s.spawn(move || {
                    let result = run(scenario.clone());
                    CellRun { scenario, result }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("cell thread panicked")).collect()
    })
}

/// The 3 x 3 strategy cells at the intents of `base`.
pub fn run_matrix(base: &ScenarioConfig) -> Vec<CellRun> {
    run_cells(ExperimentMatrix::default().cells(base))
}

/// Matrix rows for each intent setting, in order.
pub fn run_full_matrix(base: &ScenarioConfig, matrix: &ExperimentMatrix) -> (ResultTable, Vec<CellRun>) {
    let scenarios: Vec<ScenarioConfig> = matrix
        .intents
        .iter()
        .flat_map(|&(c_m, c_h)| matrix.cells(&base.clone().with_intents(c_m, c_h)))
        .collect();
    let runs = run_cells(scenarios);
    (ResultTable::new("matrix", runs.iter().map(CellRun::row).collect()), runs)
}

/// Social M against reactive H for each weight, at the intents of `base`.
pub fn run_beta_sweep(base: &ScenarioConfig, betas: &[f64]) -> (ResultTable, Vec<CellRun>) {
    let scenarios = betas
        .iter()
        .map(|&beta| {
            base.clone()
                .with_strategies(StrategyKind::SociallyAware { beta }, StrategyKind::Reactive)
        })
        .collect();
    let runs = run_cells(scenarios);
    (ResultTable::new("beta_sweep", runs.iter().map(CellRun::row).collect()), runs)
}

/// Reactive M and H with `c_M = 1`, `c_H = 1e3`: the ablation setting.
pub fn ablation_scenario() -> ScenarioConfig {
    graceful_core::scenario::default_intersection()
        .with_strategies(StrategyKind::Reactive, StrategyKind::Reactive)
        .with_intents(1.0, 1e3)
}

/// Social strategy with the default weight, for CLI defaults.
pub fn default_social() -> StrategyKind {
    StrategyKind::SociallyAware { beta: DEFAULT_BETA }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefRow {
    pub tick: usize,
    /// M's `p̄(ĉ_H)` with and without empathy.
    pub empathetic_c_h: Vec<f64>,
    pub non_empathetic_c_h: Vec<f64>,
    /// H's `p̄(ĉ_M)`; H is empathetic in both runs.
    pub empathetic_c_m: Vec<f64>,
    pub non_empathetic_c_m: Vec<f64>,
    /// Executed `xi` of M and H in each run.
    pub empathetic_motions: [f64; 2],
    pub non_empathetic_motions: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRow {
    pub c_m: f64,
    pub c_h: f64,
    /// `(xi_M, xi_H)` pure equilibria.
    pub pairs: Vec<(f64, f64)>,
}

/// Equilibrium sets of M's game at the states M inferred from at `tick`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumDump {
    pub tick: usize,
    pub states: [AgentState; 2],
    pub rows: Vec<EquilibriumRow>,
}

impl EquilibriumDump {
    pub fn row(&self, c_m: f64, c_h: f64) -> Option<&EquilibriumRow> {
        self.rows.iter().find(|r| r.c_m == c_m && r.c_h == c_h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub schema_version: u32,
    /// Decoding intents, the support of every belief vector.
    pub intents: Vec<f64>,
    pub empathetic: MetricsReport,
    pub non_empathetic: MetricsReport,
    pub beliefs: Vec<BeliefRow>,
    /// First tick at which the two M beliefs are point masses on different
    /// intents.
    pub divergence_tick: Option<usize>,
    /// Dump for the empathetic run at the divergence tick.
    pub equilibria: Option<EquilibriumDump>,
}

#[derive(Clone, Debug)]
pub struct Ablation {
    pub report: AblationReport,
    pub empathetic: SimulationTrace,
    pub non_empathetic: SimulationTrace,
}

/// Runs `base` twice, once with an empathetic and once with a
/// non-empathetic M. H keeps its configured setting.
pub fn run_empathy_ablation(base: &ScenarioConfig) -> Result<Ablation> {
    let mut emp = base.clone();
    emp.m.empathetic = true;
    let mut non = base.clone();
    non.m.empathetic = false;
    let mut runs = run_cells(vec![emp, non]).into_iter();
    let empathetic = runs.next().unwrap().result?;
    let non_empathetic = runs.next().unwrap().result?;

    let beliefs: Vec<BeliefRow> = empathetic
        .records
        .iter()
        .zip(&non_empathetic.records)
        .filter_map(|(e, n)| {
            let (e_snap, n_snap) = (e.inference.as_ref()?, n.inference.as_ref()?);
            Some(BeliefRow {
                tick: e.tick,
                empathetic_c_h: e_snap[0].joint.other_marginal(),
                non_empathetic_c_h: n_snap[0].joint.other_marginal(),
                empathetic_c_m: e_snap[1].joint.other_marginal(),
                non_empathetic_c_m: n_snap[1].joint.other_marginal(),
                empathetic_motions: e.motions,
                non_empathetic_motions: n.motions,
            })
        })
        .collect();

    let divergence_tick = beliefs.iter().find_map(|b| {
        match (point_mass(&b.empathetic_c_h), point_mass(&b.non_empathetic_c_h)) {
            (Some(x), Some(y)) if x != y => Some(b.tick),
            _ => None,
        }
    });
    let equilibria = match divergence_tick {
        Some(t) => Some(equilibrium_dump(&empathetic, t)?),
        None => None,
    };

    Ok(Ablation {
        report: AblationReport {
            schema_version: SCHEMA_VERSION,
            intents: base.intents.clone(),
            empathetic: metrics(&empathetic),
            non_empathetic: metrics(&non_empathetic),
            beliefs,
            divergence_tick,
            equilibria,
        },
        empathetic,
        non_empathetic,
    })
}

/// Index of the intent holding all the mass, if any.
pub fn point_mass(p: &[f64]) -> Option<usize> {
    let k = p.iter().position(|&x| (x - 1.0).abs() <= 1e-12)?;
    p.iter().enumerate().all(|(j, &x)| j == k || x.abs() <= 1e-12).then_some(k)
}

/// Equilibrium sets, for every pair of decoding intents, of the game M
/// solved when inferring at `tick` (the states of the previous record).
pub fn equilibrium_dump(trace: &SimulationTrace, tick: usize) -> Result<EquilibriumDump> {
    let states = trace.records[tick.saturating_sub(1)].states;
    let world = World::new(trace.scenario.clone())?;
    let table = world.table(AgentId::M, &states);
    let mut rows = Vec::new();
    for &c_m in &trace.scenario.intents {
        for &c_h in &trace.scenario.intents {
            let set = table.nash_set(Intent(c_m), Intent(c_h))?;
            rows.push(EquilibriumRow {
                c_m,
                c_h,
                pairs: set
                    .pairs
                    .iter()
                    .map(|&(a, b)| (table.candidates_i[a], table.candidates_j[b]))
                    .collect(),
            });
        }
    }
    Ok(EquilibriumDump { tick, states, rows })
}
