//! Exact simplex for finite zero-sum games.
//!
//! The row player minimizes. After shifting entries to be positive the row
//! player's problem becomes `max Σx` subject to `Aᵀx ≤ 1, x ≥ 0`; its optimum
//! `z` gives the value `1/z` and the slack reduced costs give the column
//! player's strategy. Pivoting uses Bland's rule, so the result depends only
//! on the matrix.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub row_mix: Vec<Rational>,
    pub col_mix: Vec<Rational>,
}

/// Solves the game with `payoff[r][c]` paid by the row player to the column
/// player. Panics on an empty or ragged matrix.
pub fn solve_matrix(payoff: &[Vec<Rational>]) -> LpSolution {
    let m = payoff.len();
    assert!(m > 0, "matrix has no rows");
    let n = payoff[0].len();
    assert!(n > 0, "matrix has no columns");
    assert!(payoff.iter().all(|r| r.len() == n), "ragged matrix");

    let min = payoff
        .iter()
        .flatten()
        .min()
        .cloned()
        .expect("nonempty matrix");
    let shift = if min >= Rational::one() {
        Rational::zero()
    } else {
        Rational::one() - min
    };

    // Constraint j: Σ_i x_i (A_ij + shift) + s_j = 1.
    let width = m + n + 1;
    let mut tab: Vec<Vec<Rational>> = (0..n)
        .map(|j| {
            let mut row = vec![Rational::zero(); width];
            for i in 0..m {
                row[i] = &payoff[i][j] + &shift;
            }
            row[m + j] = Rational::one();
            row[m + n] = Rational::one();
            row
        })
        .collect();
    let mut obj = vec![Rational::zero(); width];
    for c in obj.iter_mut().take(m) {
        *c = -Rational::one();
    }
    let mut basis: Vec<usize> = (m..m + n).collect();

    while let Some(enter) = (0..m + n).find(|&k| obj[k].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (r, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[m + n] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (r, _) = leave.expect("the game LP is bounded");
        pivot(&mut tab, &mut obj, r, enter);
        basis[r] = enter;
    }

    let z = obj[m + n].clone();
    let mut x = vec![Rational::zero(); m];
    for (r, &b) in basis.iter().enumerate() {
        if b < m {
            x[b] = tab[r][m + n].clone();
        }
    }
    let y: Vec<Rational> = (0..n).map(|j| obj[m + j].clone()).collect();
    LpSolution {
        value: z.recip() - shift,
        row_mix: x.into_iter().map(|v| v / &z).collect(),
        col_mix: y.into_iter().map(|v| v / &z).collect(),
    }
}

fn pivot(tab: &mut [Vec<Rational>], obj: &mut [Rational], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for v in tab[r].iter_mut() {
        if !v.is_zero() {
            *v /= &p;
        }
    }
    let pivot_row = tab[r].clone();
    let nonzero: Vec<usize> = (0..pivot_row.len())
        .filter(|&k| !pivot_row[k].is_zero())
        .collect();
    let eliminate = |row: &mut [Rational]| {
        let f = row[c].clone();
        if f.is_zero() {
            return;
        }
        for &k in &nonzero {
            row[k] -= &f * &pivot_row[k];
        }
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(obj);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn matrix(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    fn check_optimal(payoff: &[Vec<Rational>], sol: &LpSolution) {
        let m = payoff.len();
        let n = payoff[0].len();
        assert_eq!(sol.row_mix.iter().sum::<Rational>(), Rational::one());
        assert_eq!(sol.col_mix.iter().sum::<Rational>(), Rational::one());
        assert!(sol
            .row_mix
            .iter()
            .chain(&sol.col_mix)
            .all(|p| !p.is_negative()));
        let col_costs: Vec<Rational> = (0..n)
            .map(|j| (0..m).map(|i| &sol.row_mix[i] * &payoff[i][j]).sum())
            .collect();
        let row_costs: Vec<Rational> = (0..m)
            .map(|i| (0..n).map(|j| &sol.col_mix[j] * &payoff[i][j]).sum())
            .collect();
        assert_eq!(col_costs.iter().max().unwrap(), &sol.value);
        assert_eq!(row_costs.iter().min().unwrap(), &sol.value);
    }

    #[test]
    fn one_by_one() {
        let p = matrix(&[&[5]]);
        let s = solve_matrix(&p);
        assert_eq!(s.value, int(5));
        assert_eq!(s.row_mix, vec![int(1)]);
        assert_eq!(s.col_mix, vec![int(1)]);
    }

    #[test]
    fn two_orders_against_root_zero_assignments() {
        // rows: x1 first, x2 first; columns: 00, 01, 10 under AND.
        let p = matrix(&[&[1, 1, 2], &[1, 2, 1]]);
        let s = solve_matrix(&p);
        assert_eq!(s.value, ratio(3, 2));
        assert_eq!(s.row_mix, vec![ratio(1, 2), ratio(1, 2)]);
        check_optimal(&p, &s);
    }

    #[test]
    fn matching_pennies_with_negative_entries() {
        let p = matrix(&[&[1, -1], &[-1, 1]]);
        let s = solve_matrix(&p);
        assert_eq!(s.value, int(0));
        check_optimal(&p, &s);
    }

    #[test]
    fn dominated_rows_and_degenerate_columns() {
        let p = matrix(&[&[3, 3, 3], &[1, 4, 2], &[2, 2, 5], &[4, 4, 4]]);
        let s = solve_matrix(&p);
        check_optimal(&p, &s);
        let again = solve_matrix(&p);
        assert_eq!(s, again);
    }
}
