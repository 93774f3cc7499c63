//! Pure-strategy Nash equilibria of the finite motion game.
//!
//! Payoffs for a pair of intents are laid out as a [`Bimatrix`]; the
//! intent-independent parts (summed safety loss, summed unit task loss,
//! feasibility) are cached once per pair of states in a [`GameTable`], so
//! sweeping the intent grid only rescales the task column.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::game::{self, Intent, LossParams, Motion, Player};
use crate::tolerance;

/// Payoffs of both agents over all motion pairs, row = agent `i`'s motion.
///
/// `cost_i[a * cols + b]` is `f(xi_i = a, xi_j = b, c_i)` and
/// `cost_j[a * cols + b]` is `f(xi_j = b, xi_i = a, c_j)`. Lower is better.
#[derive(Clone, Debug, PartialEq)]
pub struct Bimatrix {
    pub rows: usize,
    pub cols: usize,
    pub cost_i: Vec<f64>,
    pub cost_j: Vec<f64>,
}

impl Bimatrix {
    pub fn new(rows: usize, cols: usize, cost_i: Vec<f64>, cost_j: Vec<f64>) -> Self {
        assert_eq!(cost_i.len(), rows * cols);
        assert_eq!(cost_j.len(), rows * cols);
        Self {
            rows,
            cols,
            cost_i,
            cost_j,
        }
    }

    pub fn cost_i(&self, a: usize, b: usize) -> f64 {
        self.cost_i[a * self.cols + b]
    }

    pub fn cost_j(&self, a: usize, b: usize) -> f64 {
        self.cost_j[a * self.cols + b]
    }

    /// The same game seen from the other agent.
    pub fn transpose(&self) -> Bimatrix {
        let mut cost_i = Vec::with_capacity(self.cost_i.len());
        let mut cost_j = Vec::with_capacity(self.cost_j.len());
        for b in 0..self.cols {
            for a in 0..self.rows {
                cost_i.push(self.cost_j(a, b));
                cost_j.push(self.cost_i(a, b));
            }
        }
        Bimatrix::new(self.cols, self.rows, cost_i, cost_j)
    }

    /// Agent `i`'s best rows against column `b`.
    pub fn best_rows(&self, b: usize) -> Vec<usize> {
        let column: Vec<f64> = (0..self.rows).map(|a| self.cost_i(a, b)).collect();
        tolerance::argmin_set(&column)
    }

    /// Agent `j`'s best columns against row `a`.
    pub fn best_cols(&self, a: usize) -> Vec<usize> {
        tolerance::argmin_set(&self.cost_j[a * self.cols..(a + 1) * self.cols])
    }

    fn check_feasible(&self) -> Result<(), Error> {
        let i_ok = self.cost_i.iter().any(|v| v.is_finite());
        let j_ok = self.cost_j.iter().any(|v| v.is_finite());
        if i_ok && j_ok {
            Ok(())
        } else {
            Err(Error::EmptyEquilibrium)
        }
    }
}

/// Pairs `(row, col)` of candidate indices that are mutual best responses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub pairs: Vec<(usize, usize)>,
}

impl EquilibriumSet {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    /// Distinct row indices, ascending.
    pub fn rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.pairs.iter().map(|p| p.0).collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// Distinct column indices, ascending.
    pub fn cols(&self) -> Vec<usize> {
        let mut cols: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }
}

/// Exhaustive scan for pure equilibria.
///
/// An empty result is possible (a finite game need not have a pure
/// equilibrium); [`Error::EmptyEquilibrium`] is reserved for games where one
/// agent has no feasible motion at all.
pub fn nash_set(game: &Bimatrix) -> Result<EquilibriumSet, Error> {
    game.check_feasible()?;
    let best_rows: Vec<Vec<usize>> = (0..game.cols).map(|b| game.best_rows(b)).collect();
    let mut pairs = Vec::new();
    for a in 0..game.rows {
        for b in game.best_cols(a) {
            if best_rows[b].binary_search(&a).is_ok() {
                pairs.push((a, b));
            }
        }
    }
    Ok(EquilibriumSet { pairs })
}

/// Rows of the equilibria that are cheapest for agent `j` among all
/// equilibria: the motions of `i` that `j` wants `i` to take.
pub fn favored_rows(game: &Bimatrix, equilibria: &EquilibriumSet) -> Vec<usize> {
    let costs: Vec<f64> = equilibria
        .pairs
        .iter()
        .map(|&(a, b)| game.cost_j(a, b))
        .collect();
    let mut rows: Vec<usize> = tolerance::argmin_set(&costs)
        .into_iter()
        .map(|k| equilibria.pairs[k].0)
        .collect();
    rows.sort_unstable();
    rows.dedup();
    rows
}

/// Intent-independent payoff ingredients of the game between agent `i`
/// (rows) and agent `j` (columns) from a fixed pair of states.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTable {
    pub candidates_i: Vec<f64>,
    pub candidates_j: Vec<f64>,
    pub horizon: u32,
    /// Summed safety loss, row-major.
    safety: Vec<f64>,
    /// `T * l_task` per motion at unit intent; infinite when infeasible.
    task_i: Vec<f64>,
    task_j: Vec<f64>,
}

impl GameTable {
    pub fn build(
        i: &Player<'_>,
        j: &Player<'_>,
        candidates_i: &[f64],
        candidates_j: &[f64],
        horizon: u32,
        params: &LossParams,
    ) -> Self {
        let unroll = |p: &Player<'_>, xi: f64| Motion::new(xi, horizon).unroll(p.geometry, p.state);
        let traj_i: Vec<_> = candidates_i.iter().map(|&xi| unroll(i, xi)).collect();
        let traj_j: Vec<_> = candidates_j.iter().map(|&xi| unroll(j, xi)).collect();
        let task = |p: &Player<'_>, xis: &[f64], trajs: &[Vec<game::AgentState>]| -> Vec<f64> {
            xis.iter()
                .zip(trajs)
                .map(|(&xi, traj)| {
                    if game::feasible(&Motion::new(xi, horizon), p.geometry, p.state, p.bounds) {
                        f64::from(horizon) * game::task_loss(traj, p.geometry, params)
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        };
        let task_i = task(i, candidates_i, &traj_i);
        let task_j = task(j, candidates_j, &traj_j);
        let mut safety = vec![0.0; candidates_i.len() * candidates_j.len()];
        for (a, ti) in traj_i.iter().enumerate() {
            for (b, tj) in traj_j.iter().enumerate() {
                safety[a * candidates_j.len() + b] = ti[1..]
                    .iter()
                    .zip(&tj[1..])
                    .map(|(si, sj)| game::pair_safety(si.position, sj.position, params))
                    .sum();
            }
        }
        Self {
            candidates_i: candidates_i.to_vec(),
            candidates_j: candidates_j.to_vec(),
            horizon,
            safety,
            task_i,
            task_j,
        }
    }

    /// Table from precomputed parts; `task_*` entries are per unit intent
    /// and `INFINITY` marks an infeasible motion.
    pub fn from_parts(
        candidates_i: Vec<f64>,
        candidates_j: Vec<f64>,
        horizon: u32,
        safety: Vec<f64>,
        task_i: Vec<f64>,
        task_j: Vec<f64>,
    ) -> Self {
        assert_eq!(safety.len(), candidates_i.len() * candidates_j.len());
        assert_eq!(task_i.len(), candidates_i.len());
        assert_eq!(task_j.len(), candidates_j.len());
        Self {
            candidates_i,
            candidates_j,
            horizon,
            safety,
            task_i,
            task_j,
        }
    }

    pub fn rows(&self) -> usize {
        self.candidates_i.len()
    }

    pub fn cols(&self) -> usize {
        self.candidates_j.len()
    }

    pub fn safety(&self, a: usize, b: usize) -> f64 {
        self.safety[a * self.cols() + b]
    }

    pub fn feasible_i(&self, a: usize) -> bool {
        self.task_i[a].is_finite()
    }

    pub fn feasible_j(&self, b: usize) -> bool {
        self.task_j[b].is_finite()
    }

    /// `f(xi_i = a, xi_j = b, c_i)`.
    pub fn payoff_i(&self, a: usize, b: usize, c_i: Intent) -> f64 {
        if !self.feasible_i(a) {
            return f64::INFINITY;
        }
        self.safety(a, b) + c_i.value() * self.task_i[a]
    }

    /// `f(xi_j = b, xi_i = a, c_j)`.
    pub fn payoff_j(&self, a: usize, b: usize, c_j: Intent) -> f64 {
        if !self.feasible_j(b) {
            return f64::INFINITY;
        }
        self.safety(a, b) + c_j.value() * self.task_j[b]
    }

    pub fn bimatrix(&self, c_i: Intent, c_j: Intent) -> Bimatrix {
        let (rows, cols) = (self.rows(), self.cols());
        let mut cost_i = Vec::with_capacity(rows * cols);
        let mut cost_j = Vec::with_capacity(rows * cols);
        for a in 0..rows {
            for b in 0..cols {
                cost_i.push(self.payoff_i(a, b, c_i));
                cost_j.push(self.payoff_j(a, b, c_j));
            }
        }
        Bimatrix::new(rows, cols, cost_i, cost_j)
    }

    /// The same game with the roles of the agents exchanged.
    pub fn transpose(&self) -> GameTable {
        let (rows, cols) = (self.rows(), self.cols());
        let mut safety = Vec::with_capacity(rows * cols);
        for b in 0..cols {
            for a in 0..rows {
                safety.push(self.safety(a, b));
            }
        }
        GameTable {
            candidates_i: self.candidates_j.clone(),
            candidates_j: self.candidates_i.clone(),
            horizon: self.horizon,
            safety,
            task_i: self.task_j.clone(),
            task_j: self.task_i.clone(),
        }
    }

    /// `Q(c_i, c_j)` for this pair of states.
    pub fn nash_set(&self, c_i: Intent, c_j: Intent) -> Result<EquilibriumSet, Error> {
        nash_set(&self.bimatrix(c_i, c_j))
    }

    /// `Q_j(xi_i, c_j)`: every best response of `j` to row `a`.
    pub fn best_response(&self, a: usize, c_j: Intent) -> Result<Vec<usize>, Error> {
        let costs: Vec<f64> = (0..self.cols()).map(|b| self.payoff_j(a, b, c_j)).collect();
        let set = tolerance::argmin_set(&costs);
        if set.is_empty() {
            Err(Error::EmptyEquilibrium)
        } else {
            Ok(set)
        }
    }

    /// Best-response sets of `j` to row `a`, one per candidate intent.
    pub fn best_response_sets(&self, a: usize, intents: &[Intent]) -> Result<Vec<Vec<usize>>, Error> {
        intents.iter().map(|&c| self.best_response(a, c)).collect()
    }

    /// `Q^j(c_i, c_j)`: rows of the equilibria that minimise `j`'s payoff.
    pub fn favored_motions(&self, c_i: Intent, c_j: Intent) -> Result<Vec<usize>, Error> {
        let game = self.bimatrix(c_i, c_j);
        let q = nash_set(&game)?;
        Ok(favored_rows(&game, &q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{AgentGeometry, AgentState, Rect, StateBounds, Vec2};

    fn params() -> LossParams {
        LossParams {
            a: 5.0,
            b: 1.5 * 1.33 * 1.33,
            task_offset: 0.4,
            interaction_region: Rect::centered_square(1.33),
        }
    }

    const XI: [f64; 7] = [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0];

    fn intersection_table(sm: AgentState, sh: AgentState, bounds_m: StateBounds) -> GameTable {
        let gm = AgentGeometry::new(Vec2::new(0.0, 1.0), Vec2::new(0.0, -2.0), 1.33).unwrap();
        let gh = AgentGeometry::new(Vec2::new(-1.0, 0.0), Vec2::new(2.0, 0.0), 1.33).unwrap();
        let m = Player {
            geometry: &gm,
            state: sm,
            bounds: &bounds_m,
        };
        let h = Player {
            geometry: &gh,
            state: sh,
            bounds: &StateBounds::NONE,
        };
        GameTable::build(&m, &h, &XI, &XI, 100, &params())
    }

    #[test]
    fn decoupled_game_is_product_of_argmins() {
        // cost_i depends only on a, cost_j only on b
        let ri = [3.0, 1.0, 1.0];
        let rj = [2.0, 0.5, 4.0, 0.5];
        let mut ci = Vec::new();
        let mut cj = Vec::new();
        for a in 0..3 {
            for b in 0..4 {
                ci.push(ri[a]);
                cj.push(rj[b]);
            }
        }
        let q = nash_set(&Bimatrix::new(3, 4, ci, cj)).unwrap();
        assert_eq!(q.pairs, vec![(1, 1), (1, 3), (2, 1), (2, 3)]);
    }

    #[test]
    fn matching_pennies_has_no_pure_equilibrium() {
        let ci = vec![0.0, 1.0, 1.0, 0.0];
        let cj = vec![1.0, 0.0, 0.0, 1.0];
        assert!(nash_set(&Bimatrix::new(2, 2, ci, cj)).unwrap().is_empty());
    }

    #[test]
    fn all_infeasible_is_an_error() {
        let ci = vec![f64::INFINITY; 4];
        let cj = vec![1.0; 4];
        assert_eq!(
            nash_set(&Bimatrix::new(2, 2, ci, cj)),
            Err(Error::EmptyEquilibrium)
        );
    }

    #[test]
    fn exact_ties_are_all_best_responses() {
        let g = GameTable {
            candidates_i: vec![0.0],
            candidates_j: vec![0.0, 1.0, 2.0],
            horizon: 1,
            safety: vec![1.0, 0.5, 0.5],
            task_i: vec![1.0],
            task_j: vec![1.0, 1.0, 1.0],
        };
        assert_eq!(g.best_response(0, Intent(1.0)).unwrap(), vec![1, 2]);
        assert_eq!(g.best_response_sets(0, &[Intent(1.0)]).unwrap().len(), 1);
    }

    #[test]
    fn large_intent_best_response_is_fastest_motion() {
        // M far behind so the regions never overlap: safety vanishes
        let t = intersection_table(AgentState::at(0.0, -9.0), AgentState::at(2.0, 0.0), StateBounds::NONE);
        let flipped = t.transpose();
        for a in 0..7 {
            assert_eq!(flipped.best_response(a, Intent(1e3)).unwrap(), vec![6]);
            assert_eq!(t.best_response(a, Intent(1e3)).unwrap(), vec![6]);
        }
    }

    #[test]
    fn singleton_equilibrium_is_favored() {
        let g = Bimatrix::new(2, 2, vec![0.0, 0.0, 1.0, 1.0], vec![0.0, 1.0, 0.0, 1.0]);
        let q = nash_set(&g).unwrap();
        assert_eq!(q.pairs, vec![(0, 0)]);
        assert_eq!(favored_rows(&g, &q), vec![0]);
    }

    #[test]
    fn full_tie_favors_every_row() {
        // coordination game where j is indifferent between the two equilibria
        let g = Bimatrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]);
        let q = nash_set(&g).unwrap();
        assert_eq!(q.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(favored_rows(&g, &q), vec![0, 1]);
    }

    #[test]
    fn bounds_remove_rows() {
        let bounds = StateBounds::within(Rect {
            min: Vec2::new(-5.0, -2.0),
            max: Vec2::new(5.0, 5.0),
        });
        let t = intersection_table(AgentState::at(0.0, -2.0), AgentState::at(2.0, 0.0), bounds);
        assert!(!t.feasible_i(0));
        let q = t.nash_set(Intent(1.0), Intent(1.0)).unwrap();
        assert!(q.pairs.iter().all(|&(a, _)| a != 0));
    }
}
