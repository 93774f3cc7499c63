//! Scenario configuration and the default two-road intersection.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{AgentId, Error};
use crate::game::{AgentGeometry, Intent, LossParams, Rect, StateBounds, Vec2};
use crate::inference::ArgmaxTie;
use crate::planning::{MotionDistance, StrategyKind};

pub const CAR_LENGTH: f64 = 1.33;
pub const HORIZON: u32 = 100;
pub const SIM_TICKS: usize = 100;
pub const DEFAULT_BETA: f64 = 0.1;
pub const CANDIDATE_MOTIONS: [f64; 7] = [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
pub const DECODING_INTENTS: [f64; 2] = [1.0, 1e3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub start: Vec2,
    pub direction: Vec2,
    /// True intent; may lie outside the decoding set.
    pub intent: f64,
    pub strategy: StrategyKind,
    /// When false the agent assumes its opponent knows its true intent.
    #[serde(default = "yes")]
    pub empathetic: bool,
    /// Motion executed at tick 0.
    pub initial_motion: f64,
    #[serde(default)]
    pub bounds: Option<Rect>,
}

fn yes() -> bool {
    true
}

impl AgentConfig {
    pub fn geometry(&self, car_length: f64) -> Result<AgentGeometry, Error> {
        AgentGeometry::new(self.direction, self.start, car_length)
    }

    pub fn state_bounds(&self) -> StateBounds {
        StateBounds {
            region: self.bounds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub m: AgentConfig,
    pub h: AgentConfig,
    pub car_length: f64,
    /// Candidate motion distances `Ξ`, shared by both agents.
    pub candidates: Vec<f64>,
    /// Decoding intent set `C`.
    pub intents: Vec<f64>,
    /// Planning horizon `T` in ticks.
    pub horizon: u32,
    /// Simulation length `T_s` in ticks.
    pub sim_ticks: usize,
    pub loss: LossParams,
    pub distance: MotionDistance,
    /// Stop once both agents are this far past the far edge of the
    /// interaction region; `None` uses one car length.
    pub exit_margin: Option<f64>,
    pub tie: ArgmaxTie,
    pub agreement: AgreementRule,
}

/// Which expectation an agent's chosen motion is checked against when
/// deciding whether the agents agree at a tick.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementRule {
    /// The self-motion distribution each agent infers from the latest
    /// observation alone.
    #[default]
    SelfStep,
    /// The self-motion distribution under the history-updated belief.
    SelfHistory,
    /// The opponent's history-updated prediction of the agent's motion.
    OpponentPrediction,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        default_intersection()
    }
}

/// M drives north from `(0, -2)`, H drives west from `(2, 0)`; both start
/// with `xi = 5` and are non-aggressive reactive planners unless overridden.
pub fn default_intersection() -> ScenarioConfig {
    let agent = |start: Vec2, direction: Vec2| AgentConfig {
        start,
        direction,
        intent: 1.0,
        strategy: StrategyKind::Reactive,
        empathetic: true,
        initial_motion: 5.0,
        bounds: None,
    };
    ScenarioConfig {
        m: agent(Vec2::new(0.0, -2.0), Vec2::new(0.0, 1.0)),
        h: agent(Vec2::new(2.0, 0.0), Vec2::new(-1.0, 0.0)),
        car_length: CAR_LENGTH,
        candidates: CANDIDATE_MOTIONS.to_vec(),
        intents: DECODING_INTENTS.to_vec(),
        horizon: HORIZON,
        sim_ticks: SIM_TICKS,
        loss: LossParams {
            a: 5.0,
            b: 1.5 * CAR_LENGTH * CAR_LENGTH,
            task_offset: 0.4,
            interaction_region: Rect::centered_square(CAR_LENGTH),
        },
        distance: MotionDistance::ActionSequence,
        exit_margin: None,
        tie: ArgmaxTie::default(),
        agreement: AgreementRule::default(),
    }
}

impl ScenarioConfig {
    pub fn agent(&self, id: AgentId) -> &AgentConfig {
        match id {
            AgentId::M => &self.m,
            AgentId::H => &self.h,
        }
    }

    pub fn agent_mut(&mut self, id: AgentId) -> &mut AgentConfig {
        match id {
            AgentId::M => &mut self.m,
            AgentId::H => &mut self.h,
        }
    }

    pub fn decoding_intents(&self) -> Vec<Intent> {
        self.intents.iter().map(|&c| Intent(c)).collect()
    }

    pub fn exit_margin(&self) -> f64 {
        self.exit_margin.unwrap_or(self.car_length)
    }

    /// Every violated invariant, empty when the configuration is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.candidates.is_empty() {
            v.push(String::from("empty candidate set"));
        }
        if self.candidates.iter().any(|x| !x.is_finite()) {
            v.push(String::from("candidate motions must be finite"));
        }
        if self.candidates.windows(2).any(|w| !(w[0] < w[1])) {
            v.push(String::from("candidate motions must be strictly ascending"));
        }
        if self.intents.is_empty() {
            v.push(String::from("empty intent set"));
        }
        if self.intents.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            v.push(String::from("decoding intents must be positive"));
        }
        if self.intents.windows(2).any(|w| !(w[0] < w[1])) {
            v.push(String::from("decoding intents must be strictly ascending"));
        }
        if self.horizon == 0 {
            v.push(String::from("planning horizon must be at least one tick"));
        }
        if self.sim_ticks == 0 {
            v.push(String::from("simulation must run at least one tick"));
        }
        if !(self.car_length > 0.0) {
            v.push(String::from("car length must be positive"));
        }
        if !(self.loss.a > 0.0) {
            v.push(String::from("safety steepness a must be positive"));
        }
        if !(self.loss.b > 0.0) {
            v.push(String::from("safe squared distance b must be positive"));
        }
        if !self.loss.task_offset.is_finite() {
            v.push(String::from("task offset must be finite"));
        }
        let r = &self.loss.interaction_region;
        if !(r.min.x <= r.max.x && r.min.y <= r.max.y) {
            v.push(String::from("interaction region is inverted"));
        }
        if let Some(margin) = self.exit_margin {
            if !(margin >= 0.0) {
                v.push(String::from("exit margin must be non-negative"));
            }
        }
        for id in AgentId::BOTH {
            let a = self.agent(id);
            if !(a.intent.is_finite() && a.intent > 0.0) {
                v.push(format!("agent {id}: intent must be positive"));
            }
            if let StrategyKind::SociallyAware { beta } = a.strategy {
                if !(beta.is_finite() && beta >= 0.0) {
                    v.push(format!("agent {id}: beta must be non-negative"));
                }
            }
            if a.geometry(self.car_length.max(f64::MIN_POSITIVE)).is_err() {
                v.push(format!("agent {id}: direction must be a unit vector and start finite"));
            }
            if !self.candidates.contains(&a.initial_motion) {
                v.push(format!("agent {id}: initial motion is not a candidate"));
            }
        }
        v
    }

    /// Permitted but notable settings, such as a true intent outside the
    /// decoding set.
    pub fn warnings(&self) -> Vec<String> {
        AgentId::BOTH
            .iter()
            .filter(|id| !self.intents.contains(&self.agent(**id).intent))
            .map(|id| format!("agent {id}: true intent {} is not in the decoding set", self.agent(*id).intent))
            .collect()
    }

    pub fn validated(self) -> Result<Self, Error> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }

    pub fn with_strategies(mut self, m: StrategyKind, h: StrategyKind) -> Self {
        self.m.strategy = m;
        self.h.strategy = h;
        self
    }

    pub fn with_intents(mut self, m: f64, h: f64) -> Self {
        self.m.intent = m;
        self.h.intent = h;
        self
    }
}

/// Shorthand for a socially-aware strategy with the default weight.
pub fn social() -> StrategyKind {
    StrategyKind::SociallyAware { beta: DEFAULT_BETA }
}

pub fn all_strategies() -> [StrategyKind; 3] {
    [StrategyKind::Reactive, StrategyKind::Proactive, social()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_intersection() {
        let s = default_intersection();
        assert_eq!(s.candidates.len(), 7);
        assert!(s.candidates.contains(&-1.0));
        assert!((s.loss.b - 2.65335).abs() < 1e-12);
        assert_eq!(s.horizon, 100);
        assert_eq!(s.intents, vec![1.0, 1e3]);
        assert_eq!(social(), StrategyKind::SociallyAware { beta: 0.1 });
        assert!(s.validate().is_empty());
        assert!(s.warnings().is_empty());
    }

    #[test]
    fn empty_candidates_rejected() {
        let mut s = default_intersection();
        s.candidates.clear();
        let v = s.validate();
        assert!(v.iter().any(|e| e == "empty candidate set"));
        assert!(matches!(s.validated(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn aggressive_intent_only_warns() {
        let s = default_intersection().with_intents(1.0, 1e9);
        assert!(s.validate().is_empty());
        assert_eq!(s.warnings().len(), 1);
    }

    #[test]
    fn bad_direction_and_beta() {
        let mut s = default_intersection();
        s.m.direction = Vec2::new(0.0, 2.0);
        s.h.strategy = StrategyKind::SociallyAware { beta: -1.0 };
        assert_eq!(s.validate().len(), 2);
    }
}
