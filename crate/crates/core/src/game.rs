//! States, motions and losses of the two-agent motion-planning game.
//!
//! A motion is a scalar distance `xi` covered at uniform speed over a horizon
//! of `T` ticks along the agent's fixed travel direction. The payoff of a
//! motion is the sum over the horizon of a pairwise safety loss and an
//! intent-weighted task loss; infeasible motions pay `f64::INFINITY`.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.norm_squared())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Vec2,
}

impl AgentState {
    pub const fn at(x: f64, y: f64) -> Self {
        Self {
            position: Vec2::new(x, y),
        }
    }

    /// Deterministic transition.
    pub fn apply(self, action: AgentAction) -> AgentState {
        AgentState {
            position: self.position + action.displacement,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentAction {
    pub displacement: Vec2,
}

impl AgentAction {
    pub fn squared_distance(self, other: AgentAction) -> f64 {
        (self.displacement - other.displacement).norm_squared()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentGeometry {
    pub travel_direction: Vec2,
    pub start_position: Vec2,
    pub car_length: f64,
}

impl AgentGeometry {
    pub fn new(travel_direction: Vec2, start_position: Vec2, car_length: f64) -> Result<Self, Error> {
        if !travel_direction.is_finite() || libm::fabs(travel_direction.norm() - 1.0) > 1e-9 {
            return Err(Error::InvalidGeometry("travel direction must have unit norm"));
        }
        if !start_position.is_finite() {
            return Err(Error::InvalidGeometry("start position must be finite"));
        }
        if !(car_length > 0.0) {
            return Err(Error::InvalidGeometry("car length must be positive"));
        }
        Ok(Self {
            travel_direction,
            start_position,
            car_length,
        })
    }

    /// Signed distance travelled past the intersection origin.
    pub fn progress(&self, state: &AgentState) -> f64 {
        state.position.dot(self.travel_direction)
    }

    pub fn start_state(&self) -> AgentState {
        AgentState {
            position: self.start_position,
        }
    }
}

/// A candidate plan: distance `xi` covered uniformly over `horizon` ticks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Motion {
    pub xi: f64,
    pub horizon: u32,
}

impl Motion {
    pub const fn new(xi: f64, horizon: u32) -> Self {
        Self { xi, horizon }
    }

    /// The single action repeated over the whole horizon.
    pub fn action(&self, geometry: &AgentGeometry) -> AgentAction {
        AgentAction {
            displacement: geometry.travel_direction * (self.xi / f64::from(self.horizon)),
        }
    }

    /// The `T + 1` states visited from `start`, `start` included.
    pub fn unroll(&self, geometry: &AgentGeometry, start: AgentState) -> Vec<AgentState> {
        let action = self.action(geometry);
        let mut states = Vec::with_capacity(self.horizon as usize + 1);
        let mut state = start;
        states.push(state);
        for _ in 0..self.horizon {
            state = state.apply(action);
            states.push(state);
        }
        states
    }
}

/// Task weight; larger means more willing to push through.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Intent(pub f64);

impl Intent {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Closed axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn centered_square(half_width: f64) -> Self {
        Self {
            min: Vec2::new(-half_width, -half_width),
            max: Vec2::new(half_width, half_width),
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Largest signed progress along `direction` that is still inside.
    pub fn far_edge(&self, direction: Vec2) -> f64 {
        let x = if direction.x >= 0.0 { self.max.x } else { self.min.x };
        let y = if direction.y >= 0.0 { self.max.y } else { self.min.y };
        Vec2::new(x, y).dot(direction)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    /// Steepness of the safety penalty.
    pub a: f64,
    /// Squared safe distance.
    pub b: f64,
    pub task_offset: f64,
    pub interaction_region: Rect,
}

/// `exp(-progress + offset)` at the last state of the trajectory.
pub fn task_loss(trajectory: &[AgentState], geometry: &AgentGeometry, params: &LossParams) -> f64 {
    let last = trajectory.last().expect("trajectory has at least one state");
    libm::exp(-geometry.progress(last) + params.task_offset)
}

/// Safety penalty for one pair of positions; zero unless both lie in the
/// interaction region.
pub fn pair_safety(p: Vec2, q: Vec2, params: &LossParams) -> f64 {
    let region = &params.interaction_region;
    if !(region.contains(p) && region.contains(q)) {
        return 0.0;
    }
    let d2 = (p - q).norm_squared();
    libm::exp(params.a * (params.b - d2))
}

/// Per-tick safety loss of two synchronous trajectories.
pub fn safety_loss(traj_i: &[AgentState], traj_j: &[AgentState], params: &LossParams) -> Vec<f64> {
    assert_eq!(traj_i.len(), traj_j.len(), "trajectories must be synchronous");
    traj_i
        .iter()
        .zip(traj_j)
        .map(|(si, sj)| pair_safety(si.position, sj.position, params))
        .collect()
}

/// Optional closed box on every future position of an agent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StateBounds {
    pub region: Option<Rect>,
}

impl StateBounds {
    pub const NONE: StateBounds = StateBounds { region: None };

    pub fn within(region: Rect) -> Self {
        Self {
            region: Some(region),
        }
    }
}

/// `g(xi) <= 0`: every future state stays inside the configured bounds.
pub fn feasible(motion: &Motion, geometry: &AgentGeometry, start: AgentState, bounds: &StateBounds) -> bool {
    let Some(region) = bounds.region else {
        return true;
    };
    motion
        .unroll(geometry, start)
        .iter()
        .skip(1)
        .all(|s| region.contains(s.position))
}

/// One agent's side of the game: geometry, current state and bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Player<'a> {
    pub geometry: &'a AgentGeometry,
    pub state: AgentState,
    pub bounds: &'a StateBounds,
}

/// Instantaneous loss at horizon tick `k` (0-based): the safety term at the
/// state reached after the `k`-th action plus `c_i` times the task loss.
pub fn instantaneous_loss(
    xi_i: &Motion,
    xi_j: &Motion,
    c_i: Intent,
    i: &Player<'_>,
    j: &Player<'_>,
    params: &LossParams,
    k: usize,
) -> f64 {
    let traj_i = xi_i.unroll(i.geometry, i.state);
    let traj_j = xi_j.unroll(j.geometry, j.state);
    let safety = pair_safety(traj_i[k + 1].position, traj_j[k + 1].position, params);
    safety + c_i.value() * task_loss(&traj_i, i.geometry, params)
}

/// Accumulated loss over the horizon, `INFINITY` for an infeasible `xi_i`.
pub fn payoff(
    xi_i: &Motion,
    xi_j: &Motion,
    c_i: Intent,
    i: &Player<'_>,
    j: &Player<'_>,
    params: &LossParams,
) -> f64 {
    if !feasible(xi_i, i.geometry, i.state, i.bounds) {
        return f64::INFINITY;
    }
    let traj_i = xi_i.unroll(i.geometry, i.state);
    let traj_j = xi_j.unroll(j.geometry, j.state);
    let safety: f64 = safety_loss(&traj_i[1..], &traj_j[1..], params).iter().sum();
    let task = task_loss(&traj_i, i.geometry, params);
    safety + f64::from(xi_i.horizon) * c_i.value() * task
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> LossParams {
        LossParams {
            a: 5.0,
            b: 1.5 * 1.33 * 1.33,
            task_offset: 0.4,
            interaction_region: Rect::centered_square(1.33),
        }
    }

    fn m_geometry() -> AgentGeometry {
        AgentGeometry::new(Vec2::new(0.0, 1.0), Vec2::new(0.0, -2.0), 1.33).unwrap()
    }

    fn h_geometry() -> AgentGeometry {
        AgentGeometry::new(Vec2::new(-1.0, 0.0), Vec2::new(2.0, 0.0), 1.33).unwrap()
    }

    fn close(a: Vec2, b: Vec2) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn zero_motion_stays_put() {
        let g = m_geometry();
        let states = Motion::new(0.0, 100).unroll(&g, AgentState::at(0.3, -1.0));
        assert_eq!(states.len(), 101);
        assert!(states.iter().all(|s| s.position == Vec2::new(0.3, -1.0)));
    }

    #[test]
    fn unroll_reaches_start_plus_distance() {
        let g = m_geometry();
        let states = Motion::new(5.0, 100).unroll(&g, g.start_state());
        assert!(close(states[100].position, Vec2::new(0.0, 3.0)));

        let h = h_geometry();
        let back = Motion::new(-1.0, 100).unroll(&h, h.start_state());
        assert!(close(back[100].position, Vec2::new(3.0, 0.0)));
    }

    #[test]
    fn rejects_non_unit_direction() {
        assert!(AgentGeometry::new(Vec2::new(0.0, 2.0), Vec2::ZERO, 1.0).is_err());
        assert!(AgentGeometry::new(Vec2::new(0.6, 0.8), Vec2::ZERO, 1.0).is_ok());
    }

    #[test]
    fn task_loss_values() {
        let g = m_geometry();
        let p = params();
        let at = |y: f64| [AgentState::at(0.0, y)];
        assert!((task_loss(&at(0.4), &g, &p) - 1.0).abs() < 1e-15);
        assert!((task_loss(&at(3.0), &g, &p) - libm::exp(-2.6)).abs() < 1e-15);
        assert!((task_loss(&at(3.0), &g, &p) - 0.0743).abs() < 1e-4);
        assert!(task_loss(&at(800.0), &g, &p) < 1e-300);
    }

    #[test]
    fn safety_loss_values() {
        let p = params();
        // one agent outside the region
        assert_eq!(pair_safety(Vec2::new(2.0, 0.0), Vec2::ZERO, &p), 0.0);
        // D^2 = b
        let d = libm::sqrt(p.b);
        assert!((pair_safety(Vec2::new(0.0, -d / 2.0), Vec2::new(0.0, d / 2.0), &p) - 1.0).abs() < 1e-12);
        // coincident
        let v = pair_safety(Vec2::ZERO, Vec2::ZERO, &p);
        assert!((v / libm::exp(13.26675) - 1.0).abs() < 1e-9);
        assert!((v - 5.79e5).abs() / 5.79e5 < 1e-2);
    }

    #[test]
    fn feasibility_with_bounds() {
        let g = m_geometry();
        let start = g.start_state();
        let m = Motion::new(-1.0, 100);
        assert!(feasible(&m, &g, start, &StateBounds::NONE));
        let bounds = StateBounds::within(Rect {
            min: Vec2::new(-10.0, -2.0),
            max: Vec2::new(10.0, 10.0),
        });
        assert!(!feasible(&m, &g, start, &bounds));
        // bound exactly attained
        let tight = StateBounds::within(Rect {
            min: Vec2::new(-10.0, -2.0),
            max: Vec2::new(10.0, 3.0),
        });
        let exact = Motion::new(5.0, 1);
        assert!(feasible(&exact, &g, start, &tight));
    }

    #[test]
    fn infeasible_payoff_is_infinite() {
        let (gm, gh, p) = (m_geometry(), h_geometry(), params());
        let bounds = StateBounds::within(Rect {
            min: Vec2::new(-10.0, -2.0),
            max: Vec2::new(10.0, 10.0),
        });
        let m = Player {
            geometry: &gm,
            state: gm.start_state(),
            bounds: &bounds,
        };
        let h = Player {
            geometry: &gh,
            state: gh.start_state(),
            bounds: &StateBounds::NONE,
        };
        let f = payoff(&Motion::new(-1.0, 100), &Motion::new(5.0, 100), Intent(1.0), &m, &h, &p);
        assert_eq!(f, f64::INFINITY);
        assert!(f > f64::MAX);
    }

    #[test]
    fn single_tick_payoff_is_instantaneous_loss() {
        let (gm, gh, p) = (m_geometry(), h_geometry(), params());
        let m = Player {
            geometry: &gm,
            state: AgentState::at(0.0, -0.5),
            bounds: &StateBounds::NONE,
        };
        let h = Player {
            geometry: &gh,
            state: AgentState::at(0.6, 0.0),
            bounds: &StateBounds::NONE,
        };
        let (a, b) = (Motion::new(0.4, 1), Motion::new(0.3, 1));
        let f = payoff(&a, &b, Intent(2.0), &m, &h, &p);
        let l = instantaneous_loss(&a, &b, Intent(2.0), &m, &h, &p, 0);
        assert!((f - l).abs() <= 1e-12 * f.abs());
    }

    #[test]
    fn zero_weight_leaves_safety_only() {
        let (gm, gh, p) = (m_geometry(), h_geometry(), params());
        let m = Player {
            geometry: &gm,
            state: AgentState::at(0.0, -0.5),
            bounds: &StateBounds::NONE,
        };
        let h = Player {
            geometry: &gh,
            state: AgentState::at(0.6, 0.0),
            bounds: &StateBounds::NONE,
        };
        let (a, b) = (Motion::new(1.0, 10), Motion::new(1.0, 10));
        let traj_m = a.unroll(&gm, m.state);
        let traj_h = b.unroll(&gh, h.state);
        let safety = pair_safety(traj_m[4].position, traj_h[4].position, &p);
        let l0 = instantaneous_loss(&a, &b, Intent(0.0), &m, &h, &p, 3);
        assert_eq!(l0, safety);
        let l1 = instantaneous_loss(&a, &b, Intent(1.0), &m, &h, &p, 3);
        assert!(l1 > l0 && l1 > task_loss(&traj_m, &gm, &p));
    }
}
