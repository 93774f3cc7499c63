//! Motion planners built on the inference outputs.
//!
//! Every planner scores each candidate motion of the planning agent and
//! picks the lowest score, breaking ties toward the smallest `xi`
//! (candidates are stored in ascending order).

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::equilibrium::GameTable;
use crate::error::Error;
use crate::game::Intent;
use crate::inference::{IntentDistribution, MotionDistribution};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    Reactive,
    Proactive,
    #[serde(rename = "social")]
    SociallyAware { beta: f64 },
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Reactive => "reactive",
            StrategyKind::Proactive => "proactive",
            StrategyKind::SociallyAware { .. } => "social",
        }
    }
}

/// How the gracefulness term measures the gap between two motions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionDistance {
    /// Squared L2 distance of the unrolled action sequences: `Δxi² / T`.
    #[default]
    ActionSequence,
    /// `Δxi²`.
    Scalar,
    /// Squared L2 distance of the unrolled positions over the horizon:
    /// `Δxi² (T + 1)(2T + 1) / 6T`.
    Trajectory,
}

impl MotionDistance {
    pub fn squared(self, xi_a: f64, xi_b: f64, horizon: u32) -> f64 {
        let d = xi_a - xi_b;
        match self {
            MotionDistance::ActionSequence => d * d / f64::from(horizon),
            MotionDistance::Scalar => d * d,
            MotionDistance::Trajectory => {
                let t = f64::from(horizon);
                d * d * (t + 1.0) * (2.0 * t + 1.0) / (6.0 * t)
            }
        }
    }
}

/// Everything a planner reads at one tick. The table is the game between
/// the planning agent (rows) and its opponent (columns) at the current
/// states; the distributions are the history-updated beliefs.
#[derive(Clone, Copy, Debug)]
pub struct PlanContext<'a> {
    pub own_intent: Intent,
    pub table: &'a GameTable,
    /// `p̄(c̃_i, ĉ_j; t)`.
    pub joint: &'a IntentDistribution,
    /// `p̄(ξ̂_j; t)`.
    pub other_motion: &'a MotionDistribution,
    pub distance: MotionDistance,
}

impl PlanContext<'_> {
    fn other_intents(&self) -> Vec<Intent> {
        self.joint.other_support.iter().map(|&c| Intent(c)).collect()
    }
}

fn pick(costs: &[f64]) -> Result<usize, Error> {
    tolerance::argmin_first(costs).ok_or(Error::NoFeasibleMotion)
}

/// Expected payoff of every candidate against `p̄(ξ̂_j; t)`.
pub fn reactive_costs(ctx: &PlanContext<'_>) -> Vec<f64> {
    (0..ctx.table.rows())
        .map(|a| {
            ctx.other_motion
                .expectation(|b| ctx.table.payoff_i(a, b, ctx.own_intent))
        })
        .collect()
}

pub fn plan_reactive(ctx: &PlanContext<'_>) -> Result<usize, Error> {
    pick(&reactive_costs(ctx))
}

/// `p̄(ξ̂_j; ξ_i, t)`: the opponent's best responses to row `a`, averaged
/// over the `ĉ_j` belief.
pub fn conditional_opponent_distribution(ctx: &PlanContext<'_>, a: usize) -> MotionDistribution {
    let marginal = ctx.joint.other_marginal();
    let mut mass = vec![0.0; ctx.table.cols()];
    let mut weight = 0.0;
    for (c, p) in ctx.other_intents().into_iter().zip(marginal) {
        if p <= 0.0 {
            continue;
        }
        let Ok(best) = ctx.table.best_response(a, c) else {
            continue;
        };
        weight += p;
        let share = p / best.len() as f64;
        for b in best {
            mass[b] += share;
        }
    }
    if weight > 0.0 {
        mass.iter_mut().for_each(|m| *m /= weight);
    }
    MotionDistribution {
        support: ctx.table.candidates_j.clone(),
        mass,
    }
}

pub fn proactive_costs(ctx: &PlanContext<'_>) -> Vec<f64> {
    (0..ctx.table.rows())
        .map(|a| {
            let response = conditional_opponent_distribution(ctx, a);
            if response.total() <= 0.0 {
                return f64::INFINITY;
            }
            response.expectation(|b| ctx.table.payoff_i(a, b, ctx.own_intent))
        })
        .collect()
}

pub fn plan_proactive(ctx: &PlanContext<'_>) -> Result<usize, Error> {
    pick(&proactive_costs(ctx))
}

/// `p̄(ξ_i^j; t)`: uniform over the favored motions of each intent
/// hypothesis, mixed by the joint belief. Hypotheses without equilibria drop
/// out and the remainder is renormalised.
pub fn wanted_motion_distribution(ctx: &PlanContext<'_>) -> Result<MotionDistribution, Error> {
    wanted_motions(ctx.table, ctx.joint)
}

/// Favored-motion mixture for an arbitrary game and intent belief; shared
/// with the gracefulness metric.
pub fn wanted_motions(table: &GameTable, joint: &IntentDistribution) -> Result<MotionDistribution, Error> {
    let mut mass = vec![0.0; table.rows()];
    let mut weight = 0.0;
    for a in 0..joint.rows() {
        for b in 0..joint.cols() {
            let w = joint.mass(a, b);
            if w <= 0.0 {
                continue;
            }
            let favored = table.favored_motions(Intent(joint.self_support[a]), Intent(joint.other_support[b]))?;
            if favored.is_empty() {
                continue;
            }
            weight += w;
            let share = w / favored.len() as f64;
            for k in favored {
                mass[k] += share;
            }
        }
    }
    if !(weight > 0.0) {
        return Err(Error::EmptyEquilibrium);
    }
    mass.iter_mut().for_each(|m| *m /= weight);
    Ok(MotionDistribution {
        support: table.candidates_i.clone(),
        mass,
    })
}

/// Expected squared distance from each candidate to the wanted motions.
pub fn gracefulness_penalties(ctx: &PlanContext<'_>, wanted: &MotionDistribution) -> Vec<f64> {
    ctx.table
        .candidates_i
        .iter()
        .map(|&xi| {
            wanted.expectation(|k| ctx.distance.squared(wanted.support[k], xi, ctx.table.horizon))
        })
        .collect()
}

pub fn social_costs(ctx: &PlanContext<'_>, beta: f64) -> Result<Vec<f64>, Error> {
    let mut costs = proactive_costs(ctx);
    if beta == 0.0 {
        return Ok(costs);
    }
    let wanted = wanted_motion_distribution(ctx)?;
    for (c, penalty) in costs.iter_mut().zip(gracefulness_penalties(ctx, &wanted)) {
        *c += beta * penalty;
    }
    Ok(costs)
}

pub fn plan_social(ctx: &PlanContext<'_>, beta: f64) -> Result<usize, Error> {
    pick(&social_costs(ctx, beta)?)
}

/// Candidate index chosen by `strategy`.
pub fn plan(ctx: &PlanContext<'_>, strategy: StrategyKind) -> Result<usize, Error> {
    match strategy {
        StrategyKind::Reactive => plan_reactive(ctx),
        StrategyKind::Proactive => plan_proactive(ctx),
        StrategyKind::SociallyAware { beta } => plan_social(ctx, beta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // two motions each; i's payoff only depends on the pair through safety
    fn table() -> GameTable {
        GameTable::from_parts(
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            1,
            vec![0.0, 0.0, 0.0, 10.0],
            vec![2.0, 1.0],
            vec![2.0, 1.0],
        )
    }

    fn joint(rows: &[f64], cols: &[f64], mass: Vec<f64>) -> IntentDistribution {
        IntentDistribution {
            self_support: rows.to_vec(),
            other_support: cols.to_vec(),
            joint: mass,
            conflict_reset: false,
        }
    }

    #[test]
    fn reactive_against_point_belief_is_best_response() {
        let t = table();
        let j = joint(&[1.0], &[1.0], vec![1.0]);
        let fast = MotionDistribution::point(&t.candidates_j, 1);
        let ctx = PlanContext {
            own_intent: Intent(1.0),
            table: &t,
            joint: &j,
            other_motion: &fast,
            distance: MotionDistance::ActionSequence,
        };
        // against xi_j = 1: row 0 pays 2, row 1 pays 11
        assert_eq!(plan_reactive(&ctx).unwrap(), 0);
        let slow = MotionDistribution::point(&t.candidates_j, 0);
        let ctx = PlanContext {
            other_motion: &slow,
            ..ctx
        };
        assert_eq!(plan_reactive(&ctx).unwrap(), 1);
    }

    #[test]
    fn reactive_uniform_belief_averages() {
        let t = table();
        let j = joint(&[1.0], &[1.0], vec![1.0]);
        let half = MotionDistribution {
            support: t.candidates_j.clone(),
            mass: vec![0.5, 0.5],
        };
        let ctx = PlanContext {
            own_intent: Intent(1.0),
            table: &t,
            joint: &j,
            other_motion: &half,
            distance: MotionDistance::ActionSequence,
        };
        // row 0: (2 + 2) / 2 = 2; row 1: (1 + 11) / 2 = 6
        let costs = reactive_costs(&ctx);
        assert_eq!(costs, vec![2.0, 6.0]);
        assert_eq!(plan_reactive(&ctx).unwrap(), 0);
    }

    #[test]
    fn conditional_distribution_mixes_intents() {
        let t = table();
        // ĉ_j = 0: j indifferent against row 0 -> both; ĉ_j large -> fastest
        let j = joint(&[1.0], &[0.1, 100.0], vec![0.5, 0.5]);
        let belief = MotionDistribution::point(&t.candidates_j, 0);
        let ctx = PlanContext {
            own_intent: Intent(1.0),
            table: &t,
            joint: &j,
            other_motion: &belief,
            distance: MotionDistance::ActionSequence,
        };
        let d = conditional_opponent_distribution(&ctx, 1);
        // against row 1: ĉ=0.1 -> b=0 (0.2 vs 10.1); ĉ=100 -> b=1 (110 vs 200)
        assert_eq!(d.mass, vec![0.5, 0.5]);
        assert!((d.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_beta_matches_proactive() {
        let t = table();
        let j = joint(&[1.0, 5.0], &[0.1, 100.0], vec![0.25, 0.25, 0.25, 0.25]);
        let belief = MotionDistribution::point(&t.candidates_j, 0);
        let ctx = PlanContext {
            own_intent: Intent(1.0),
            table: &t,
            joint: &j,
            other_motion: &belief,
            distance: MotionDistance::ActionSequence,
        };
        assert_eq!(plan_social(&ctx, 0.0).unwrap(), plan_proactive(&ctx).unwrap());
        assert_eq!(social_costs(&ctx, 0.0).unwrap(), proactive_costs(&ctx));
    }

    #[test]
    fn distance_forms() {
        assert_eq!(MotionDistance::ActionSequence.squared(5.0, 1.0, 100), 0.16);
        assert_eq!(MotionDistance::Scalar.squared(5.0, 1.0, 100), 16.0);
    }

    #[test]
    fn infeasible_everywhere_fails() {
        let t = GameTable::from_parts(
            vec![0.0],
            vec![0.0],
            1,
            vec![0.0],
            vec![f64::INFINITY],
            vec![1.0],
        );
        let j = joint(&[1.0], &[1.0], vec![1.0]);
        let belief = MotionDistribution::point(&t.candidates_j, 0);
        let ctx = PlanContext {
            own_intent: Intent(1.0),
            table: &t,
            joint: &j,
            other_motion: &belief,
            distance: MotionDistance::ActionSequence,
        };
        assert_eq!(plan_reactive(&ctx), Err(Error::NoFeasibleMotion));
        assert_eq!(plan_proactive(&ctx), Err(Error::NoFeasibleMotion));
    }
}
