use core::fmt;

use serde::{Deserialize, Serialize};

/// Which of the two agents an error or record refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentId {
    /// The automated vehicle.
    M,
    /// The human driver.
    H,
}

impl AgentId {
    pub const BOTH: [AgentId; 2] = [AgentId::M, AgentId::H];

    pub fn index(self) -> usize {
        match self {
            AgentId::M => 0,
            AgentId::H => 1,
        }
    }

    pub fn other(self) -> AgentId {
        match self {
            AgentId::M => AgentId::H,
            AgentId::H => AgentId::M,
        }
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentId::M => f.write_str("M"),
            AgentId::H => f.write_str("H"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Every candidate motion of one agent violates its state bounds.
    EmptyEquilibrium,
    /// No intent pair produced a non-empty equilibrium set.
    ConflictAllInfeasible,
    /// A planner found no feasible candidate.
    NoFeasibleMotion,
    /// A planner failed inside the simulation loop.
    SimulationFault {
        tick: usize,
        agent: AgentId,
        source: alloc::boxed::Box<Error>,
    },
    InvalidGeometry(&'static str),
    InvalidConfig(alloc::vec::Vec<alloc::string::String>),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyEquilibrium => f.write_str("no feasible motion for one of the agents"),
            Error::ConflictAllInfeasible => {
                f.write_str("every intent pair yields an empty equilibrium set")
            }
            Error::NoFeasibleMotion => f.write_str("no feasible candidate motion"),
            Error::SimulationFault {
                tick,
                agent,
                source,
            } => write!(f, "agent {agent} failed at tick {tick}: {source}"),
            Error::InvalidGeometry(msg) => write!(f, "invalid geometry: {msg}"),
            Error::InvalidConfig(violations) => {
                f.write_str("invalid scenario:")?;
                for v in violations {
                    write!(f, " {v};")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for Error {}
