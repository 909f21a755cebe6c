//! Explicit algorithm-versus-assignment games.

use std::io::Write;

use num_traits::Zero;

use crate::assignment::{Assignment, AssignmentDistribution, Filter};
use crate::error::{Error, Result};
use crate::game::lp::solve_matrix;
use crate::rational::{self, Rational};
use crate::strategy::randomized::{Class, PureAlgorithm, RandomizedAlgorithm};
use crate::tree::Tree;

/// Rows are pure algorithms (minimizing cost), columns are assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGame<A: PureAlgorithm> {
    pub rows: Vec<A>,
    pub columns: Vec<Assignment>,
    pub payoff: Vec<Vec<u32>>,
}

/// Optimal strategies of a solved game. Both gaps are zero for an exact
/// equilibrium: `row_gap` is the worst column cost of `row_mix` minus the
/// value and `col_gap` is the value minus the best row cost against `col_mix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSolution<A: PureAlgorithm> {
    pub value: Rational,
    pub row_mix: RandomizedAlgorithm<A>,
    pub col_mix: AssignmentDistribution,
    pub row_gap: Rational,
    pub col_gap: Rational,
}

impl<A: PureAlgorithm> GameSolution<A> {
    pub fn is_certified(&self) -> bool {
        self.row_gap.is_zero() && self.col_gap.is_zero()
    }
}

impl<A: PureAlgorithm> MatrixGame<A> {
    pub fn new(tree: &Tree, rows: Vec<A>, filter: Filter) -> Result<Self> {
        let columns = tree.enumerate_assignments(filter)?;
        Self::with_columns(tree, rows, columns)
    }

    pub fn with_columns(tree: &Tree, rows: Vec<A>, columns: Vec<Assignment>) -> Result<Self> {
        if rows.is_empty() || columns.is_empty() {
            return Err(Error::ShapeMismatch("a game needs rows and columns".into()));
        }
        for w in &columns {
            tree.check(w)?;
        }
        let payoff = rows
            .iter()
            .map(|a| {
                columns
                    .iter()
                    .map(|w| a.cost_bits(tree, w.bits()))
                    .collect()
            })
            .collect();
        Ok(MatrixGame {
            rows,
            columns,
            payoff,
        })
    }

    pub fn rational_payoff(&self) -> Vec<Vec<Rational>> {
        self.payoff
            .iter()
            .map(|r| r.iter().map(|&c| rational::int(i64::from(c))).collect())
            .collect()
    }

    /// Solves exactly; the returned mixes are over this game's rows and columns.
    pub fn solve(&self, class: Class) -> GameSolution<A> {
        let (kept_rows, kept_cols) = self.distinct();
        let reduced: Vec<Vec<Rational>> = kept_rows
            .iter()
            .map(|&r| {
                kept_cols
                    .iter()
                    .map(|&c| rational::int(i64::from(self.payoff[r][c])))
                    .collect()
            })
            .collect();
        let lp = solve_matrix(&reduced);
        let row_mix = RandomizedAlgorithm::from_weights(
            class,
            kept_rows
                .iter()
                .zip(lp.row_mix)
                .map(|(&r, p)| (self.rows[r].clone(), p)),
        )
        .expect("LP strategies are distributions");
        let n = self.columns[0].len();
        let col_mix = AssignmentDistribution::new(
            n,
            kept_cols
                .iter()
                .zip(lp.col_mix)
                .map(|(&c, p)| (self.columns[c], p)),
        )
        .expect("LP strategies are distributions");
        let worst_col = (0..self.columns.len())
            .map(|c| self.row_cost(&row_mix, c))
            .max()
            .expect("nonempty");
        let best_row = (0..self.rows.len())
            .map(|r| self.col_cost(r, &col_mix))
            .min()
            .expect("nonempty");
        GameSolution {
            row_gap: worst_col - &lp.value,
            col_gap: &lp.value - best_row,
            value: lp.value,
            row_mix,
            col_mix,
        }
    }

    fn row_cost(&self, mix: &RandomizedAlgorithm<A>, c: usize) -> Rational {
        mix.iter().fold(Rational::zero(), |acc, (a, p)| {
            let r = self
                .rows
                .iter()
                .position(|x| x == a)
                .expect("row of this game");
            acc + p * rational::int(i64::from(self.payoff[r][c]))
        })
    }

    fn col_cost(&self, r: usize, mix: &AssignmentDistribution) -> Rational {
        self.columns
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (c, w)| {
                acc + mix.prob(w) * rational::int(i64::from(self.payoff[r][c]))
            })
    }

    /// First occurrences of distinct rows and of distinct columns.
    fn distinct(&self) -> (Vec<usize>, Vec<usize>) {
        let mut rows = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (r, row) in self.payoff.iter().enumerate() {
            if seen.insert(row.clone()) {
                rows.push(r);
            }
        }
        let mut cols = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for c in 0..self.columns.len() {
            let col: Vec<u32> = rows.iter().map(|&r| self.payoff[r][c]).collect();
            if seen.insert(col) {
                cols.push(c);
            }
        }
        (rows, cols)
    }

    /// CSV with a header of assignment bitstrings and one row per algorithm.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["algorithm".to_string()];
        header.extend(self.columns.iter().map(|w| w.to_string()));
        writer.write_record(&header).map_err(io)?;
        for (a, row) in self.rows.iter().zip(&self.payoff) {
            let mut record = vec![a.encode()];
            record.extend(row.iter().map(|&c| format!("{c}/1")));
            writer.write_record(&record).map_err(io)?;
        }
        writer
            .flush()
            .map_err(|e| Error::Parse(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Row labels, column assignments and exact entries of a matrix CSV.
pub type CsvMatrix = (Vec<String>, Vec<Assignment>, Vec<Vec<Rational>>);

/// Reads a CSV written by [`MatrixGame::write_csv`].
pub fn read_csv(text: &str) -> Result<CsvMatrix> {
    let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(io)?.clone();
    let columns = header
        .iter()
        .skip(1)
        .map(str::parse)
        .collect::<Result<Vec<Assignment>>>()?;
    let mut labels = Vec::new();
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(io)?;
        labels.push(record[0].to_string());
        entries.push(
            record
                .iter()
                .skip(1)
                .map(rational::parse)
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok((labels, columns, entries))
}

pub fn solve_zero_sum<A: PureAlgorithm>(game: &MatrixGame<A>, class: Class) -> GameSolution<A> {
    game.solve(class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::strategy::enumerate::{enumerate_directional, Limits};

    #[test]
    fn and_of_two_root_zero() {
        let t = Tree::parse("(and * *)").unwrap();
        let rows = enumerate_directional(&t, &Limits::default()).unwrap();
        let game = MatrixGame::new(&t, rows.clone(), Filter::Zero).unwrap();
        assert_eq!(game.payoff, vec![vec![1, 1, 2], vec![1, 2, 1]]);
        let sol = game.solve(Class::Directional);
        assert_eq!(sol.value, ratio(3, 2));
        assert!(sol.is_certified());
        for a in &rows {
            assert_eq!(sol.row_mix.prob(a), ratio(1, 2));
        }
        // Grid check over row mixes p·first + (1−p)·second.
        for k in 0..=16 {
            let p = ratio(k, 16);
            let worst = (0..3)
                .map(|c| {
                    &p * rational::int(game.payoff[0][c] as i64)
                        + (ratio(1, 1) - &p) * rational::int(game.payoff[1][c] as i64)
                })
                .max()
                .unwrap();
            assert!(worst >= sol.value);
        }
    }

    #[test]
    fn csv_round_trip() {
        let t = Tree::parse("(or * (and * *))").unwrap();
        let rows = enumerate_directional(&t, &Limits::default()).unwrap();
        let game = MatrixGame::new(&t, rows, Filter::One).unwrap();
        let mut buf = Vec::new();
        game.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("algorithm,011,100,101,110,111\n"));
        let (labels, cols, entries) = read_csv(&text).unwrap();
        assert_eq!(labels[0], "[1 2 | * [1 2]]");
        assert_eq!(cols, game.columns);
        assert_eq!(entries, game.rational_payoff());
    }
}
