//! Two-agent motion-planning games with empathetic intent inference.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! - [`game`]: states, motions, losses and the accumulated payoff.
//! - [`equilibrium`]: pure-strategy Nash sets, best responses and favored motions.
//! - [`inference`]: joint intent inference, the recursive history update and
//!   the derived motion distributions.
//! - [`planning`]: reactive, proactive and socially-aware planners.
//! - [`scenario`]: declarative configuration with the intersection defaults.
//! - [`simulation`]: the closed interaction loop, traces and metrics.
//!
//! IO, file formats and the CLI live in the `graceful` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod equilibrium;
pub mod error;
pub mod game;
pub mod inference;
pub mod planning;
pub mod scenario;
pub mod simulation;
pub mod tolerance;

pub use equilibrium::{EquilibriumSet, GameTable};
pub use error::Error;
pub use game::{AgentAction, AgentGeometry, AgentState, Intent, LossParams, Motion, Rect, Vec2};
pub use inference::{IntentDistribution, MotionDistribution, SolutionSet};
pub use planning::StrategyKind;
pub use scenario::ScenarioConfig;
pub use simulation::{MetricsReport, SimulationTrace, World};
