//! Double oracle: grow a restricted game with best responses of both sides
//! until neither side can improve.

use num_traits::Zero;

use crate::assignment::{AssignmentDistribution, Filter};
use crate::error::{Error, Result};
use crate::game::best_response::{
    best_response_depth_first, best_response_directional, best_response_general,
};
use crate::game::lp::solve_matrix;
use crate::game::matrix::{GameSolution, MatrixGame};
use crate::rational::{self, Rational};
use crate::strategy::decision::GeneralAlgorithm;
use crate::strategy::directional::DirectionalAlgorithm;
use crate::strategy::enumerate::{
    enumerate_depth_first, enumerate_directional, enumerate_general, Limits,
};
use crate::strategy::randomized::{Class, PureAlgorithm, RandomizedAlgorithm};
use crate::tree::Tree;

pub const DEFAULT_ITERATION_CAP: usize = 10_000;

/// Runs the double oracle with `oracle` as the row player's best response.
pub fn double_oracle_with<A: PureAlgorithm>(
    tree: &Tree,
    class: Class,
    filter: Filter,
    cap: usize,
    mut oracle: impl FnMut(&AssignmentDistribution) -> Result<(A, Rational)>,
) -> Result<GameSolution<A>> {
    let columns = tree.enumerate_assignments(filter)?;
    let n = tree.leaf_count();
    let uniform = AssignmentDistribution::uniform(n, &columns)?;
    let mut rows: Vec<A> = vec![oracle(&uniform)?.0];
    // costs[r][c] over all filtered columns.
    let mut costs: Vec<Vec<u32>> = vec![full_costs(tree, &rows[0], &columns)];
    let first = (0..columns.len())
        .max_by_key(|&c| (costs[0][c], std::cmp::Reverse(c)))
        .expect("nonempty");
    let mut active: Vec<usize> = vec![first];

    for _ in 0..cap {
        let restricted: Vec<Vec<Rational>> = costs
            .iter()
            .map(|r| {
                active
                    .iter()
                    .map(|&c| rational::int(i64::from(r[c])))
                    .collect()
            })
            .collect();
        let lp = solve_matrix(&restricted);
        let col_mix = AssignmentDistribution::new(
            n,
            active
                .iter()
                .zip(&lp.col_mix)
                .map(|(&c, p)| (columns[c], p.clone())),
        )?;
        let (response, response_cost) = oracle(&col_mix)?;
        let mut worst: Option<(Rational, usize)> = None;
        for c in 0..columns.len() {
            let v = lp
                .row_mix
                .iter()
                .zip(&costs)
                .fold(Rational::zero(), |acc, (p, r)| {
                    acc + p * rational::int(i64::from(r[c]))
                });
            if worst.as_ref().is_none_or(|(b, _)| v > *b) {
                worst = Some((v, c));
            }
        }
        let (worst_cost, worst_col) = worst.expect("nonempty");

        let mut grew = false;
        if response_cost < lp.value {
            if rows.contains(&response) {
                return Err(Error::InvalidAlgorithm(
                    "best response already in the restricted game beats its value".into(),
                ));
            }
            costs.push(full_costs(tree, &response, &columns));
            rows.push(response);
            grew = true;
        }
        if worst_cost > lp.value {
            if active.contains(&worst_col) {
                return Err(Error::InvalidDistribution(
                    "best column already in the restricted game beats its value".into(),
                ));
            }
            active.push(worst_col);
            grew = true;
        }
        if !grew {
            let row_mix =
                RandomizedAlgorithm::from_weights(class, rows.iter().cloned().zip(lp.row_mix))?;
            return Ok(GameSolution {
                row_gap: worst_cost - &lp.value,
                col_gap: &lp.value - response_cost,
                value: lp.value,
                row_mix,
                col_mix,
            });
        }
    }
    Err(Error::NonTermination(cap))
}

fn full_costs<A: PureAlgorithm>(tree: &Tree, a: &A, columns: &[crate::Assignment]) -> Vec<u32> {
    columns
        .iter()
        .map(|w| a.cost_bits(tree, w.bits()))
        .collect()
}

/// Equilibrium of one class against one filter, in either representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassSolution {
    Directional(GameSolution<DirectionalAlgorithm>),
    Decision(GameSolution<GeneralAlgorithm>),
}

impl ClassSolution {
    pub fn value(&self) -> &Rational {
        match self {
            ClassSolution::Directional(s) => &s.value,
            ClassSolution::Decision(s) => &s.value,
        }
    }

    pub fn col_mix(&self) -> &AssignmentDistribution {
        match self {
            ClassSolution::Directional(s) => &s.col_mix,
            ClassSolution::Decision(s) => &s.col_mix,
        }
    }

    pub fn is_certified(&self) -> bool {
        match self {
            ClassSolution::Directional(s) => s.is_certified(),
            ClassSolution::Decision(s) => s.is_certified(),
        }
    }

    /// Worst-case cost of the row mix over the filtered assignments.
    pub fn row_worst_case(&self, tree: &Tree, filter: Filter) -> Result<Rational> {
        Ok(match self {
            ClassSolution::Directional(s) => s.row_mix.max_cost(tree, filter)?.0,
            ClassSolution::Decision(s) => s.row_mix.max_cost(tree, filter)?.0,
        })
    }

    pub fn row_mix_encoding(&self) -> String {
        match self {
            ClassSolution::Directional(s) => s.row_mix.encode(),
            ClassSolution::Decision(s) => s.row_mix.encode(),
        }
    }

    pub fn row_mix_entries(&self) -> Vec<(String, Rational)> {
        match self {
            ClassSolution::Directional(s) => s
                .row_mix
                .iter()
                .map(|(a, p)| (a.encode(), p.clone()))
                .collect(),
            ClassSolution::Decision(s) => s
                .row_mix
                .iter()
                .map(|(a, p)| (a.encode(), p.clone()))
                .collect(),
        }
    }
}

pub fn double_oracle(tree: &Tree, class: Class, filter: Filter) -> Result<ClassSolution> {
    let cap = DEFAULT_ITERATION_CAP;
    Ok(match class {
        Class::Directional => {
            ClassSolution::Directional(double_oracle_with(tree, class, filter, cap, |d| {
                best_response_directional(tree, d)
            })?)
        }
        Class::DepthFirst => {
            ClassSolution::Decision(double_oracle_with(tree, class, filter, cap, |d| {
                best_response_depth_first(tree, d)
            })?)
        }
        Class::General => {
            ClassSolution::Decision(double_oracle_with(tree, class, filter, cap, |d| {
                best_response_general(tree, d)
            })?)
        }
    })
}

/// Full-matrix LP over the enumerated class.
pub fn full_lp(
    tree: &Tree,
    class: Class,
    filter: Filter,
    limits: &Limits,
) -> Result<ClassSolution> {
    Ok(match class {
        Class::Directional => {
            let game = MatrixGame::new(tree, enumerate_directional(tree, limits)?, filter)?;
            ClassSolution::Directional(game.solve(class))
        }
        Class::DepthFirst => {
            let game = MatrixGame::new(tree, enumerate_depth_first(tree, limits)?, filter)?;
            ClassSolution::Decision(game.solve(class))
        }
        Class::General => {
            let game = MatrixGame::new(tree, enumerate_general(tree, limits)?, filter)?;
            ClassSolution::Decision(game.solve(class))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn and_of_two_directional_root_zero() {
        let t = Tree::parse("(and * *)").unwrap();
        let s = double_oracle(&t, Class::Directional, Filter::Zero).unwrap();
        assert_eq!(s.value(), &ratio(3, 2));
        assert!(s.is_certified());
    }

    #[test]
    fn single_leaf_is_one_everywhere() {
        let t = Tree::leaf();
        for class in Class::ALL {
            for filter in Filter::ALL {
                let s = double_oracle(&t, class, filter).unwrap();
                assert_eq!(s.value(), &ratio(1, 1));
            }
        }
    }

    #[test]
    fn agrees_with_full_lp_on_two_by_two() {
        let t = Tree::parse("(and (or * *) (or * *))").unwrap();
        let limits = Limits::default();
        for class in Class::ALL {
            for filter in Filter::ALL {
                let a = double_oracle(&t, class, filter).unwrap();
                let b = full_lp(&t, class, filter, &limits).unwrap();
                assert_eq!(a.value(), b.value(), "{class} {filter}");
                assert!(a.is_certified() && b.is_certified());
            }
        }
    }
}
