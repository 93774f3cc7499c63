//! Closed-loop interaction of the two agents and the interaction metrics.
//!
//! Tick 0 executes the configured initial motions. At every later tick each
//! agent infers from the opponent's previous action (taken from the previous
//! states), folds the result into its history belief, plans from the current
//! states and commits the first action of its plan. Both actions are applied
//! simultaneously.

use core::fmt;

use alloc::boxed::Box;
use alloc::vec::Vec;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::equilibrium::GameTable;
use crate::error::{AgentId, Error};
use crate::game::{AgentAction, AgentGeometry, AgentState, Intent, Motion, Player, StateBounds};
use crate::inference::{self, IntentDistribution, MotionDistribution, PerceivedGames, SolutionSet};
use crate::planning::{self, PlanContext, StrategyKind};
use crate::scenario::{AgreementRule, ScenarioConfig};

/// Per-agent runtime: geometry, true intent, strategy and the `ĉ_j` belief
/// carried between ticks.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentRuntime {
    pub id: AgentId,
    pub geometry: AgentGeometry,
    pub bounds: StateBounds,
    pub intent: Intent,
    pub strategy: StrategyKind,
    pub empathetic: bool,
    /// `p̄(ĉ_j; t-1)`.
    pub belief: alloc::vec::Vec<f64>,
}

/// What one agent inferred and decided at one tick.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSnapshot {
    pub solutions: SolutionSet,
    /// `p(c̃_i, ĉ_j; t)` from the single-step problem.
    pub step_joint: IntentDistribution,
    /// `p̄(c̃_i, ĉ_j; t)` after the history update.
    pub joint: IntentDistribution,
    /// `p̄(ξ̂_j; t)`.
    pub other_motion: MotionDistribution,
    /// `p(ξ̃_i; t)`: what the opponent expects this agent to do.
    pub expected_self_motion: MotionDistribution,
    /// `p̄(ξ_i^j; t)`: motions of this agent the opponent wants.
    pub wanted_motion: Option<MotionDistribution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: usize,
    /// Positions of M and H at the start of the tick.
    pub states: [AgentState; 2],
    /// Chosen `xi` of M and H.
    pub motions: [f64; 2],
    pub actions: [AgentAction; 2],
    /// Absent at tick 0, which replays the initial motions.
    pub inference: Option<[AgentSnapshot; 2]>,
    /// Distribution of M's motions that H, with its true intent, wants.
    pub wanted_by_h: Option<MotionDistribution>,
    pub agreement: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub scenario: ScenarioConfig,
    pub records: Vec<TickRecord>,
}

impl SimulationTrace {
    pub fn executed_ticks(&self) -> usize {
        self.records.len().saturating_sub(1)
    }
}

/// Tick of first agreement, or never.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Efficiency {
    Tick(usize),
    Never,
}

impl Efficiency {
    pub fn tick(self) -> Option<usize> {
        match self {
            Efficiency::Tick(t) => Some(t),
            Efficiency::Never => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Efficiency::Tick(_))
    }
}

impl fmt::Display for Efficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Efficiency::Tick(t) => write!(f, "{t}"),
            Efficiency::Never => f.write_str("inf"),
        }
    }
}

impl Serialize for Efficiency {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Efficiency::Tick(t) => s.serialize_u64(*t as u64),
            Efficiency::Never => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Efficiency {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Efficiency;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a tick index or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Efficiency, E> {
                Ok(Efficiency::Tick(v as usize))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Efficiency, E> {
                usize::try_from(v)
                    .map(Efficiency::Tick)
                    .map_err(|_| E::custom("negative tick"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Efficiency, E> {
                if v == "inf" {
                    Ok(Efficiency::Never)
                } else {
                    Err(E::custom("expected \"inf\""))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub q_grace: f64,
    pub q_eff: Efficiency,
    pub right_of_way: Option<AgentId>,
    pub grace_increments: Vec<f64>,
}

pub struct World {
    pub scenario: ScenarioConfig,
    pub agents: [AgentRuntime; 2],
    intents: Vec<Intent>,
    /// Positions at the start of the next tick.
    states: [AgentState; 2],
    /// Positions and actions of the previous tick.
    previous_states: [AgentState; 2],
    previous_actions: [AgentAction; 2],
    trace: SimulationTrace,
}

fn players<'a>(agents: &'a [AgentRuntime; 2], states: &[AgentState; 2], id: AgentId) -> (Player<'a>, Player<'a>) {
    let (i, j) = (id.index(), id.other().index());
    (
        Player {
            geometry: &agents[i].geometry,
            state: states[i],
            bounds: &agents[i].bounds,
        },
        Player {
            geometry: &agents[j].geometry,
            state: states[j],
            bounds: &agents[j].bounds,
        },
    )
}

impl World {
    /// Validates the scenario and executes tick 0.
    pub fn new(scenario: ScenarioConfig) -> Result<Self, Error> {
        let scenario = scenario.validated()?;
        let intents = scenario.decoding_intents();
        let uniform = 1.0 / intents.len() as f64;
        let mut agents = Vec::with_capacity(2);
        for id in AgentId::BOTH {
            let cfg = scenario.agent(id);
            agents.push(AgentRuntime {
                id,
                geometry: cfg.geometry(scenario.car_length)?,
                bounds: cfg.state_bounds(),
                intent: Intent(cfg.intent),
                strategy: cfg.strategy,
                empathetic: cfg.empathetic,
                belief: alloc::vec![uniform; intents.len()],
            });
        }
        let agents: [AgentRuntime; 2] = [agents[0].clone(), agents[1].clone()];
        let states = [agents[0].geometry.start_state(), agents[1].geometry.start_state()];
        let motions = [scenario.m.initial_motion, scenario.h.initial_motion];
        let actions = [
            Motion::new(motions[0], scenario.horizon).action(&agents[0].geometry),
            Motion::new(motions[1], scenario.horizon).action(&agents[1].geometry),
        ];
        let record = TickRecord {
            tick: 0,
            states,
            motions,
            actions,
            inference: None,
            wanted_by_h: None,
            agreement: false,
        };
        Ok(Self {
            trace: SimulationTrace {
                scenario: scenario.clone(),
                records: alloc::vec![record],
            },
            scenario,
            agents,
            intents,
            states: [states[0].apply(actions[0]), states[1].apply(actions[1])],
            previous_states: states,
            previous_actions: actions,
        })
    }

    pub fn tick(&self) -> usize {
        self.trace.records.len()
    }

    pub fn states(&self) -> [AgentState; 2] {
        self.states
    }

    pub fn trace(&self) -> &SimulationTrace {
        &self.trace
    }

    pub fn into_trace(self) -> SimulationTrace {
        self.trace
    }

    /// The game between `id` (rows) and its opponent (columns).
    pub fn table(&self, id: AgentId, states: &[AgentState; 2]) -> GameTable {
        let (i, j) = players(&self.agents, states, id);
        GameTable::build(
            &i,
            &j,
            &self.scenario.candidates,
            &self.scenario.candidates,
            self.scenario.horizon,
            &self.scenario.loss,
        )
    }

    fn self_intents(&self, id: AgentId) -> Vec<Intent> {
        let agent = &self.agents[id.index()];
        if agent.empathetic {
            self.intents.clone()
        } else {
            alloc::vec![agent.intent]
        }
    }

    fn think(&self, id: AgentId) -> Result<(AgentSnapshot, usize, Vec<f64>), Error> {
        let agent = &self.agents[id.index()];
        let other = &self.agents[id.other().index()];
        let past = PerceivedGames::new(
            self.table(id, &self.previous_states),
            &self.self_intents(id),
            &self.intents,
        )?
        .with_tie(self.scenario.tie);
        let observed = self.previous_actions[id.other().index()];
        let step = inference::infer_step(&past, observed, &other.geometry)?;
        let joint = inference::update_history(&agent.belief, &step.joint);
        let other_motion = inference::infer_motion_marginal(&joint, &past)?;
        let expected_self_motion = match self.scenario.agreement {
            AgreementRule::SelfHistory => inference::infer_expected_self_motion(&joint, &past)?,
            _ => inference::infer_expected_self_motion(&step.joint, &past)?,
        };

        let now = self.table(id, &self.states);
        let ctx = PlanContext {
            own_intent: agent.intent,
            table: &now,
            joint: &joint,
            other_motion: &other_motion,
            distance: self.scenario.distance,
        };
        let choice = planning::plan(&ctx, agent.strategy)?;
        let wanted_motion = planning::wanted_motion_distribution(&ctx).ok();
        let belief = joint.other_marginal();
        Ok((
            AgentSnapshot {
                solutions: step.solutions,
                step_joint: step.joint,
                joint,
                other_motion,
                expected_self_motion,
                wanted_motion,
            },
            choice,
            belief,
        ))
    }

    /// What H, using its true intent and its belief about M's intent,
    /// wants M to do from the current states.
    fn wanted_by_h(&self, h_snapshot: &AgentSnapshot) -> Option<MotionDistribution> {
        let belief_about_m = h_snapshot.joint.other_marginal();
        let joint = IntentDistribution {
            self_support: h_snapshot.joint.other_support.clone(),
            other_support: alloc::vec![self.agents[AgentId::H.index()].intent.value()],
            joint: belief_about_m,
            conflict_reset: false,
        };
        planning::wanted_motions(&self.table(AgentId::M, &self.states), &joint).ok()
    }

    /// One closed-loop tick.
    pub fn step(&mut self) -> Result<(), Error> {
        let tick = self.tick();
        let fault = |agent: AgentId| move |e: Error| Error::SimulationFault {
            tick,
            agent,
            source: Box::new(e),
        };
        let (snap_m, choice_m, belief_m) = self.think(AgentId::M).map_err(fault(AgentId::M))?;
        let (snap_h, choice_h, belief_h) = self.think(AgentId::H).map_err(fault(AgentId::H))?;
        let wanted_by_h = self.wanted_by_h(&snap_h);

        let motions = [self.scenario.candidates[choice_m], self.scenario.candidates[choice_h]];
        let actions = [
            Motion::new(motions[0], self.scenario.horizon).action(&self.agents[0].geometry),
            Motion::new(motions[1], self.scenario.horizon).action(&self.agents[1].geometry),
        ];
        let agreement = match self.scenario.agreement {
            AgreementRule::OpponentPrediction => {
                snap_h.other_motion.is_point_mass_on(choice_m) && snap_m.other_motion.is_point_mass_on(choice_h)
            }
            _ => {
                snap_m.expected_self_motion.is_point_mass_on(choice_m)
                    && snap_h.expected_self_motion.is_point_mass_on(choice_h)
            }
        };

        self.agents[0].belief = belief_m;
        self.agents[1].belief = belief_h;
        self.trace.records.push(TickRecord {
            tick,
            states: self.states,
            motions,
            actions,
            inference: Some([snap_m, snap_h]),
            wanted_by_h,
            agreement,
        });
        self.previous_states = self.states;
        self.previous_actions = actions;
        self.states = [self.states[0].apply(actions[0]), self.states[1].apply(actions[1])];
        Ok(())
    }

    /// Both agents are past the far edge of the interaction region by the
    /// exit margin.
    pub fn finished(&self) -> bool {
        let region = &self.scenario.loss.interaction_region;
        let margin = self.scenario.exit_margin();
        self.agents.iter().zip(&self.states).all(|(a, s)| {
            a.geometry.progress(s) > region.far_edge(a.geometry.travel_direction) + margin
        })
    }
}

/// Runs `sim_ticks` steps or until both agents have cleared the region.
pub fn run(scenario: ScenarioConfig) -> Result<SimulationTrace, Error> {
    let ticks = scenario.sim_ticks;
    let mut world = World::new(scenario)?;
    for _ in 0..ticks {
        if world.finished() {
            break;
        }
        world.step()?;
    }
    Ok(world.into_trace())
}

/// Expected squared gap between M's executed action and the actions H
/// wants from M, per tick. Ticks without a wanted distribution add zero.
pub fn grace_increments(trace: &SimulationTrace) -> Vec<f64> {
    let horizon = trace.scenario.horizon;
    let Ok(geometry) = trace.scenario.m.geometry(trace.scenario.car_length) else {
        return Vec::new();
    };
    trace
        .records
        .iter()
        .map(|r| match &r.wanted_by_h {
            Some(wanted) => {
                let executed = r.actions[AgentId::M.index()];
                wanted.expectation(|k| {
                    Motion::new(wanted.support[k], horizon)
                        .action(&geometry)
                        .squared_distance(executed)
                })
            }
            None => 0.0,
        })
        .collect()
}

pub fn gracefulness(trace: &SimulationTrace) -> f64 {
    grace_increments(trace).iter().sum()
}

/// First tick at which both agents act as the opponent expects.
pub fn efficiency(trace: &SimulationTrace) -> Efficiency {
    trace
        .records
        .iter()
        .find(|r| r.agreement)
        .map_or(Efficiency::Never, |r| Efficiency::Tick(r.tick))
}

/// The agent that first leaves the interaction region on its far side.
pub fn right_of_way(trace: &SimulationTrace) -> Option<AgentId> {
    let scenario = &trace.scenario;
    let region = &scenario.loss.interaction_region;
    let geometries: Vec<AgentGeometry> = AgentId::BOTH
        .iter()
        .filter_map(|&id| scenario.agent(id).geometry(scenario.car_length).ok())
        .collect();
    if geometries.len() != 2 {
        return None;
    }
    // positions after each executed action
    for r in &trace.records {
        let mut exited = [false; 2];
        for id in AgentId::BOTH {
            let g = &geometries[id.index()];
            let next = r.states[id.index()].apply(r.actions[id.index()]);
            exited[id.index()] = g.progress(&next) > region.far_edge(g.travel_direction);
        }
        match exited {
            [true, false] => return Some(AgentId::M),
            [false, true] => return Some(AgentId::H),
            [true, true] => {
                // simultaneous exit: the one further along wins
                let pm = geometries[0].progress(&r.states[0].apply(r.actions[0]));
                let ph = geometries[1].progress(&r.states[1].apply(r.actions[1]));
                return Some(if pm >= ph { AgentId::M } else { AgentId::H });
            }
            [false, false] => {}
        }
    }
    None
}

pub fn metrics(trace: &SimulationTrace) -> MetricsReport {
    let grace_increments = grace_increments(trace);
    MetricsReport {
        q_grace: grace_increments.iter().sum(),
        q_eff: efficiency(trace),
        right_of_way: right_of_way(trace),
        grace_increments,
    }
}
