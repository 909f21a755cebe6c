//! RDAs that are worst-case optimal on both root values at once, and the
//! values d₀, d₁, d they attain.

use num_traits::Zero;
use serde::Serialize;

use crate::assignment::Filter;
use crate::error::{Error, Result};
use crate::game::lp::solve_matrix;
use crate::rational::{self, Rational};
use crate::strategy::directional::permutations;
use crate::strategy::rda::Rda;
use crate::tree::Tree;

/// Largest arity for which the permutation game is built.
pub const MAX_JOINT_ARITY: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DValues {
    #[serde(with = "rational::serde_rational")]
    pub d0: Rational,
    #[serde(with = "rational::serde_rational")]
    pub d1: Rational,
    #[serde(with = "rational::serde_rational")]
    pub d: Rational,
}

impl DValues {
    pub fn get(&self, filter: Filter) -> &Rational {
        match filter {
            Filter::All => &self.d,
            Filter::Zero => &self.d0,
            Filter::One => &self.d1,
        }
    }
}

/// A jointly optimal RDA together with the values its construction predicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointOptimal {
    pub rda: Rda,
    pub d0: Rational,
    pub d1: Rational,
}

pub fn build_joint_optimal_rda(tree: &Tree) -> Result<JointOptimal> {
    joint_at(tree, 0)
}

fn joint_at(tree: &Tree, idx: usize) -> Result<JointOptimal> {
    let node = tree.node(idx);
    let Some(gate) = node.gate else {
        return Ok(JointOptimal {
            rda: Rda::Leaf,
            d0: rational::one(),
            d1: rational::one(),
        });
    };
    let n = node.children.len();
    if n > MAX_JOINT_ARITY {
        return Err(Error::BoundExceeded {
            what: "arity for the permutation game",
            actual: n as u128,
            bound: MAX_JOINT_ARITY as u128,
        });
    }
    let parts = node
        .children
        .iter()
        .map(|&c| joint_at(tree, c))
        .collect::<Result<Vec<_>>>()?;
    // Work in the AND picture: `stop` is the child value that ends the
    // evaluation and `pass` the one that lets it continue.
    let c = gate.controlling();
    let (stop, pass): (Vec<&Rational>, Vec<&Rational>) = parts
        .iter()
        .map(|p| if c { (&p.d1, &p.d0) } else { (&p.d0, &p.d1) })
        .unzip();
    let perms = permutations(n);
    let sets: Vec<u32> = (1..1u32 << n).collect();
    let payoff: Vec<Vec<Rational>> = perms
        .iter()
        .map(|sigma| {
            sets.iter()
                .map(|&z| {
                    let mut total = Rational::zero();
                    for &j in sigma {
                        if z >> j & 1 == 1 {
                            total += stop[j];
                            break;
                        }
                        total += pass[j];
                    }
                    total
                })
                .collect()
        })
        .collect();
    let lp = solve_matrix(&payoff);
    let decided = lp.value;
    let undecided: Rational = pass.iter().copied().sum();
    let rda = Rda::node(
        perms.into_iter().zip(lp.row_mix),
        parts.into_iter().map(|p| p.rda).collect(),
    )?;
    let (d0, d1) = if c {
        (undecided, decided)
    } else {
        (decided, undecided)
    };
    Ok(JointOptimal { rda, d0, d1 })
}

/// d₀, d₁ and d, each measured as the worst case of the jointly optimal RDA
/// and checked against the value its construction predicts.
pub fn d_values(tree: &Tree) -> Result<DValues> {
    let joint = build_joint_optimal_rda(tree)?;
    let worst = |filter: Filter| -> Result<Rational> {
        Ok(tree
            .enumerate_assignments(filter)?
            .iter()
            .map(|w| joint.rda.cost_bits(tree, w.bits()))
            .max()
            .expect("both root values are attainable"))
    };
    let d0 = worst(Filter::Zero)?;
    let d1 = worst(Filter::One)?;
    if d0 != joint.d0 || d1 != joint.d1 {
        return Err(Error::InvalidAlgorithm(format!(
            "joint RDA attains ({}, {}) but the permutation games predict ({}, {})",
            rational::fmt(&d0),
            rational::fmt(&d1),
            rational::fmt(&joint.d0),
            rational::fmt(&joint.d1)
        )));
    }
    let d = d0.clone().max(d1.clone());
    Ok(DValues { d0, d1, d })
}
