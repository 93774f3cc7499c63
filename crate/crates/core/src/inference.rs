//! Empathetic intent inference.
//!
//! Agent `i` explains the last observed action of agent `j` by enumerating
//! pairs `(c̃_i, ĉ_j)`: `c̃_i` is what `j` believes about `i`'s intent and
//! `ĉ_j` is `j`'s own intent. For each pair the game `j` perceives is solved
//! for its pure equilibria; `j` is assumed to sample uniformly from them, and
//! the pair explains the observation as well as the first action of the most
//! likely motion of `j` matches it. All global minimisers share equal mass.
//!
//! Over time the `ĉ_j` marginal is accumulated multiplicatively, with a reset
//! to uniform when every candidate has been ruled out.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{nash_set, EquilibriumSet, GameTable};
use crate::error::Error;
use crate::game::{AgentAction, AgentGeometry, Intent, Motion};
use crate::tolerance;

/// Probability mass over candidate intents.
///
/// `joint[a * other_support.len() + b]` is the mass of
/// `(c̃_i = self_support[a], ĉ_j = other_support[b])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntentDistribution {
    pub self_support: Vec<f64>,
    pub other_support: Vec<f64>,
    pub joint: Vec<f64>,
    /// Set when every candidate had been eliminated and the `ĉ_j` marginal
    /// was reset to uniform.
    pub conflict_reset: bool,
}

impl IntentDistribution {
    pub fn rows(&self) -> usize {
        self.self_support.len()
    }

    pub fn cols(&self) -> usize {
        self.other_support.len()
    }

    pub fn mass(&self, a: usize, b: usize) -> f64 {
        self.joint[a * self.cols() + b]
    }

    /// Marginal over `c̃_i`.
    pub fn self_marginal(&self) -> Vec<f64> {
        (0..self.rows())
            .map(|a| (0..self.cols()).map(|b| self.mass(a, b)).sum())
            .collect()
    }

    /// Marginal over `ĉ_j`.
    pub fn other_marginal(&self) -> Vec<f64> {
        (0..self.cols())
            .map(|b| (0..self.rows()).map(|a| self.mass(a, b)).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.joint.iter().sum()
    }
}

/// Probability mass over an agent's candidate motions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionDistribution {
    pub support: Vec<f64>,
    pub mass: Vec<f64>,
}

impl MotionDistribution {
    pub fn point(support: &[f64], index: usize) -> Self {
        let mut mass = vec![0.0; support.len()];
        mass[index] = 1.0;
        Self {
            support: support.to_vec(),
            mass,
        }
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// The whole mass sits on `index` (up to rounding).
    pub fn is_point_mass_on(&self, index: usize) -> bool {
        self.mass.get(index).is_some_and(|&m| m >= 1.0 - 1e-12)
    }

    pub fn expectation(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(k, &m)| m * f(k))
            .sum()
    }

    fn from_weighted(support: &[f64], mut acc: Vec<f64>, weight: f64) -> Option<Self> {
        if !(weight > 0.0) {
            return None;
        }
        for m in &mut acc {
            *m /= weight;
        }
        Some(Self {
            support: support.to_vec(),
            mass: acc,
        })
    }
}

/// Global minimisers `S(t)` of the single-step inference problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    /// `(self index, other index)` pairs, ascending.
    pub elements: Vec<(usize, usize)>,
    pub residual: f64,
}

/// How a hypothesis whose baseline distribution has several most likely
/// motions is scored against the observation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgmaxTie {
    /// The best-matching of the tied motions explains the observation.
    #[default]
    MinResidual,
    /// Only the smallest tied motion is predicted.
    Smallest,
    /// Only the largest tied motion is predicted.
    Largest,
}

/// One intent hypothesis of the perceived game.
#[derive(Clone, Debug, PartialEq)]
pub struct PairModel {
    pub equilibria: EquilibriumSet,
    /// Uniform sampling from the equilibria, projected on `j`'s motions.
    pub other_motion: Option<Vec<f64>>,
    /// The same projected on `i`'s motions.
    pub self_motion: Option<Vec<f64>>,
}

fn counting_masses(projection: impl Iterator<Item = usize>, n: usize, total: usize) -> Option<Vec<f64>> {
    if total == 0 {
        return None;
    }
    let mut mass = vec![0.0; n];
    for k in projection {
        mass[k] += 1.0;
    }
    let total = total as f64;
    for m in &mut mass {
        *m /= total;
    }
    Some(mass)
}

/// The game `j` perceives from one pair of states, solved for every intent
/// hypothesis `(c̃_i, ĉ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerceivedGames {
    pub table: GameTable,
    pub self_intents: Vec<Intent>,
    pub other_intents: Vec<Intent>,
    pub tie: ArgmaxTie,
    pairs: Vec<PairModel>,
}

impl PerceivedGames {
    pub fn new(table: GameTable, self_intents: &[Intent], other_intents: &[Intent]) -> Result<Self, Error> {
        let mut pairs = Vec::with_capacity(self_intents.len() * other_intents.len());
        for &ci in self_intents {
            for &cj in other_intents {
                let equilibria = nash_set(&table.bimatrix(ci, cj))?;
                let n = equilibria.len();
                let other_motion =
                    counting_masses(equilibria.pairs.iter().map(|p| p.1), table.cols(), n);
                let self_motion =
                    counting_masses(equilibria.pairs.iter().map(|p| p.0), table.rows(), n);
                pairs.push(PairModel {
                    equilibria,
                    other_motion,
                    self_motion,
                });
            }
        }
        Ok(Self {
            table,
            self_intents: self_intents.to_vec(),
            other_intents: other_intents.to_vec(),
            tie: ArgmaxTie::default(),
            pairs,
        })
    }

    pub fn with_tie(mut self, tie: ArgmaxTie) -> Self {
        self.tie = tie;
        self
    }

    pub fn pair(&self, a: usize, b: usize) -> &PairModel {
        &self.pairs[a * self.other_intents.len() + b]
    }

    fn empty_distribution(&self) -> IntentDistribution {
        IntentDistribution {
            self_support: self.self_intents.iter().map(|c| c.value()).collect(),
            other_support: self.other_intents.iter().map(|c| c.value()).collect(),
            joint: vec![0.0; self.pairs.len()],
            conflict_reset: false,
        }
    }

    /// Squared error between the observed action and the first action of the
    /// most likely motion of `j` under `(a, b)`, with ties among the most
    /// likely motions resolved by `self.tie`. An empty equilibrium set
    /// explains nothing.
    pub fn residual(&self, a: usize, b: usize, observed: AgentAction, geometry_j: &AgentGeometry) -> f64 {
        let Some(mass) = &self.pair(a, b).other_motion else {
            return f64::INFINITY;
        };
        let negated: Vec<f64> = mass.iter().map(|m| -m).collect();
        let tied = tolerance::argmin_set(&negated);
        let predicted: &[usize] = match self.tie {
            ArgmaxTie::MinResidual => &tied,
            ArgmaxTie::Smallest => &tied[..1],
            ArgmaxTie::Largest => &tied[tied.len() - 1..],
        };
        predicted
            .iter()
            .map(|&k| {
                let predicted = Motion::new(self.table.candidates_j[k], self.table.horizon).action(geometry_j);
                predicted.squared_distance(observed)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `p(ξ̂_j; c̃_i, ĉ_j)`: counting measure over the equilibria.
pub fn baseline_motion_distribution(games: &PerceivedGames, a: usize, b: usize) -> Result<MotionDistribution, Error> {
    games
        .pair(a, b)
        .other_motion
        .as_ref()
        .map(|mass| MotionDistribution {
            support: games.table.candidates_j.clone(),
            mass: mass.clone(),
        })
        .ok_or(Error::EmptyEquilibrium)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepInference {
    pub solutions: SolutionSet,
    pub joint: IntentDistribution,
}

/// Single-step inference from the action `j` took in the game of `games`.
pub fn infer_step(games: &PerceivedGames, observed: AgentAction, geometry_j: &AgentGeometry) -> Result<StepInference, Error> {
    let rows = games.self_intents.len();
    let cols = games.other_intents.len();
    let mut residuals = Vec::with_capacity(rows * cols);
    for a in 0..rows {
        for b in 0..cols {
            residuals.push(games.residual(a, b, observed, geometry_j));
        }
    }
    let winners = tolerance::argmin_set(&residuals);
    if winners.is_empty() {
        return Err(Error::ConflictAllInfeasible);
    }
    let residual = residuals[winners[0]];
    let share = 1.0 / winners.len() as f64;
    let mut joint = games.empty_distribution();
    for &k in &winners {
        joint.joint[k] = share;
    }
    Ok(StepInference {
        solutions: SolutionSet {
            elements: winners.iter().map(|&k| (k / cols, k % cols)).collect(),
            residual,
        },
        joint,
    })
}

/// Mixture of per-hypothesis motion distributions of `j` weighted by
/// `joint`. Hypotheses without equilibria are skipped and the rest
/// renormalised.
pub fn infer_motion_marginal(joint: &IntentDistribution, games: &PerceivedGames) -> Result<MotionDistribution, Error> {
    mixture(joint, games, games.table.cols(), |p| p.other_motion.as_deref())
        .map(|(acc, w)| MotionDistribution::from_weighted(&games.table.candidates_j, acc, w))
        .and_then(|d| d.ok_or(Error::ConflictAllInfeasible))
}

/// What `j` expects `i` to do: the same mixture projected on `i`'s motions.
pub fn infer_expected_self_motion(joint: &IntentDistribution, games: &PerceivedGames) -> Result<MotionDistribution, Error> {
    mixture(joint, games, games.table.rows(), |p| p.self_motion.as_deref())
        .map(|(acc, w)| MotionDistribution::from_weighted(&games.table.candidates_i, acc, w))
        .and_then(|d| d.ok_or(Error::ConflictAllInfeasible))
}

fn mixture<'a>(
    joint: &IntentDistribution,
    games: &'a PerceivedGames,
    n: usize,
    component: impl Fn(&'a PairModel) -> Option<&'a [f64]>,
) -> Result<(Vec<f64>, f64), Error> {
    let mut acc = vec![0.0; n];
    let mut weight = 0.0;
    for a in 0..joint.rows() {
        for b in 0..joint.cols() {
            let w = joint.mass(a, b);
            if w <= 0.0 {
                continue;
            }
            if let Some(mass) = component(games.pair(a, b)) {
                weight += w;
                for (slot, m) in acc.iter_mut().zip(mass) {
                    *slot += w * m;
                }
            }
        }
    }
    Ok((acc, weight))
}

/// Recursive update of the `ĉ_j` belief.
///
/// The new marginal is the normalised product of `prior` and the step
/// marginal, or uniform if the product vanishes. The joint keeps the step's
/// proportions within each `ĉ_j` column; a column with no step mass is
/// spread along the step's `c̃_i` marginal.
pub fn update_history(prior: &[f64], step: &IntentDistribution) -> IntentDistribution {
    assert_eq!(prior.len(), step.cols(), "prior and step must share the ĉ_j support");
    let step_other = step.other_marginal();
    let mut marginal: Vec<f64> = prior.iter().zip(&step_other).map(|(p, q)| p * q).collect();
    let total: f64 = marginal.iter().sum();
    let conflict = !(total > 0.0);
    if conflict {
        let uniform = 1.0 / marginal.len() as f64;
        marginal.iter_mut().for_each(|m| *m = uniform);
    } else {
        marginal.iter_mut().for_each(|m| *m /= total);
    }

    let step_self = step.self_marginal();
    let self_total: f64 = step_self.iter().sum();
    let mut out = IntentDistribution {
        self_support: step.self_support.clone(),
        other_support: step.other_support.clone(),
        joint: vec![0.0; step.joint.len()],
        conflict_reset: conflict,
    };
    let cols = step.cols();
    for b in 0..cols {
        if marginal[b] == 0.0 {
            continue;
        }
        for a in 0..step.rows() {
            let share = if step_other[b] > 0.0 {
                step.mass(a, b) / step_other[b]
            } else if self_total > 0.0 {
                step_self[a] / self_total
            } else {
                1.0 / step.rows() as f64
            };
            out.joint[a * cols + b] = share * marginal[b];
        }
    }
    out
}

/// Exhaustive solution of the history problem: `c̃_i` free at every tick,
/// `ĉ_j` shared across ticks.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSolution {
    /// `(c̃_i index per tick, ĉ_j index)`.
    pub elements: Vec<(Vec<usize>, usize)>,
    pub residual: f64,
}

impl BatchSolution {
    /// Distinct `ĉ_j` indices among the solutions, ascending.
    pub fn other_support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.elements.iter().map(|e| e.1).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Brute-force enumeration over `C^t × C`; meant for short histories.
pub fn infer_batch(history: &[(&PerceivedGames, AgentAction)], geometry_j: &AgentGeometry) -> Result<BatchSolution, Error> {
    assert!(!history.is_empty(), "history must hold at least one observation");
    let cols = history[0].0.other_intents.len();
    let rows: Vec<usize> = history.iter().map(|(g, _)| g.self_intents.len()).collect();
    let per_tick: Vec<Vec<f64>> = history
        .iter()
        .map(|(g, u)| {
            let mut r = Vec::with_capacity(g.self_intents.len() * cols);
            for a in 0..g.self_intents.len() {
                for b in 0..cols {
                    r.push(g.residual(a, b, *u, geometry_j));
                }
            }
            r
        })
        .collect();

    let mut candidates: Vec<((Vec<usize>, usize), f64)> = Vec::new();
    let mut assignment = vec![0usize; history.len()];
    for b in 0..cols {
        loop {
            let total: f64 = assignment
                .iter()
                .enumerate()
                .map(|(t, &a)| per_tick[t][a * cols + b])
                .sum();
            candidates.push(((assignment.clone(), b), total));
            // odometer over the per-tick self intents
            let mut t = 0;
            while t < assignment.len() {
                assignment[t] += 1;
                if assignment[t] < rows[t] {
                    break;
                }
                assignment[t] = 0;
                t += 1;
            }
            if t == assignment.len() {
                break;
            }
        }
    }
    let values: Vec<f64> = candidates.iter().map(|c| c.1).collect();
    let winners = tolerance::argmin_set(&values);
    if winners.is_empty() {
        return Err(Error::ConflictAllInfeasible);
    }
    let residual = values[winners[0]];
    Ok(BatchSolution {
        elements: winners.into_iter().map(|k| candidates[k].0.clone()).collect(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::EquilibriumSet;
    use crate::game::Vec2;

    fn dist(rows: usize, cols: usize, joint: Vec<f64>) -> IntentDistribution {
        IntentDistribution {
            self_support: (0..rows).map(|k| k as f64 + 1.0).collect(),
            other_support: (0..cols).map(|k| k as f64 + 1.0).collect(),
            joint,
            conflict_reset: false,
        }
    }

    #[test]
    fn counting_rule() {
        // Q = {(a,x), (b,x), (a,y)} with x = 0, y = 1
        let q = EquilibriumSet {
            pairs: vec![(0, 0), (0, 1), (1, 0)],
        };
        let m = counting_masses(q.pairs.iter().map(|p| p.1), 2, q.len()).unwrap();
        assert!((m[0] - 2.0 / 3.0).abs() < 1e-15 && (m[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(counting_masses(core::iter::empty(), 2, 0).is_none());
    }

    #[test]
    fn uniform_prior_is_identity() {
        let step = dist(2, 2, vec![0.25, 0.5, 0.0, 0.25]);
        let out = update_history(&[0.5, 0.5], &step);
        assert!(!out.conflict_reset);
        for (x, y) in out.joint.iter().zip(&step.joint) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn contradicting_evidence_resets_to_uniform() {
        let step = dist(2, 2, vec![0.0, 0.5, 0.0, 0.5]);
        let out = update_history(&[1.0, 0.0], &step);
        assert!(out.conflict_reset);
        assert_eq!(out.other_marginal(), vec![0.5, 0.5]);
        assert!((out.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn update_rescales_columns() {
        let step = dist(2, 2, vec![0.25, 0.25, 0.25, 0.25]);
        let out = update_history(&[0.8, 0.2], &step);
        let m = out.other_marginal();
        assert!((m[0] - 0.8).abs() < 1e-15 && (m[1] - 0.2).abs() < 1e-15);
        assert!((out.mass(0, 0) - 0.4).abs() < 1e-15);
        assert!((out.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_detection() {
        let d = MotionDistribution::point(&[0.0, 1.0], 1);
        assert!(d.is_point_mass_on(1));
        assert!(!d.is_point_mass_on(0));
        assert!(!d.is_point_mass_on(7));
        assert_eq!(d.expectation(|k| k as f64 * 3.0), 3.0);
    }

    #[test]
    fn mixture_of_disjoint_points() {
        // two hypotheses with disjoint singleton equilibria
        let table = GameTable::from_parts(
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            1,
            // safety makes (0,0) vs (1,1) depend on intent
            vec![0.0, 10.0, 10.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 0.0],
        );
        let games = PerceivedGames::new(table, &[Intent(1.0)], &[Intent(0.0), Intent(100.0)]).unwrap();
        let joint = dist(1, 2, vec![0.5, 0.5]);
        let m = infer_motion_marginal(&joint, &games).unwrap();
        assert!((m.total() - 1.0).abs() < 1e-15);
        let geometry = AgentGeometry::new(Vec2::new(1.0, 0.0), Vec2::ZERO, 1.0).unwrap();
        let step = infer_step(&games, Motion::new(1.0, 1).action(&geometry), &geometry).unwrap();
        assert_eq!(step.solutions.residual, 0.0);
    }

    #[test]
    fn argmax_tie_rules() {
        // anti-coordination: Q = {(0,1), (1,0)}, so j's baseline ties 0 and 1
        let table = GameTable::from_parts(vec![0.0, 1.0], vec![0.0, 1.0], 1, vec![10.0, 0.0, 0.0, 10.0], vec![0.0, 0.0], vec![0.0, 0.0]);
        let geometry = AgentGeometry::new(Vec2::new(1.0, 0.0), Vec2::ZERO, 1.0).unwrap();
        let observed = AgentAction { displacement: Vec2::new(1.0, 0.0) };
        let games = PerceivedGames::new(table, &[Intent(1.0)], &[Intent(1.0)]).unwrap();
        assert_eq!(games.residual(0, 0, observed, &geometry), 0.0);
        let games = games.with_tie(ArgmaxTie::Largest);
        assert_eq!(games.residual(0, 0, observed, &geometry), 0.0);
        let games = games.with_tie(ArgmaxTie::Smallest);
        assert_eq!(games.residual(0, 0, observed, &geometry), 1.0);
    }
}
