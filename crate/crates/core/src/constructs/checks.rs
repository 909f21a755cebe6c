//! Posterior and lower-bound identities for product mixtures.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::assignment::{Assignment, AssignmentDistribution, Filter};
use crate::constructs::chimera::visit_sequence;
use crate::constructs::sdelta::{
    join_children, make_sdelta, DepthOneDistribution, ProductMixture, SubtreeDistributionFamily,
};
use crate::error::{Error, Result};
use crate::game::best_response::best_response_depth_first;
use crate::rational::{self, Rational};
use crate::strategy::decision::GeneralAlgorithm;
use crate::strategy::enumerate::cartesian;
use crate::strategy::randomized::{Class, RandomizedAlgorithm};
use crate::tree::Tree;
use crate::verdict::Verdict;

/// Probability under `mixture` that child `k` has value `value` given the
/// exact assignments on the children in `prefix`, for every combination of
/// those assignments with the prescribed child values. All must agree.
/// When `alpha` is given and every prefix value lets the root continue, the
/// common value must also equal the probability given that `alpha` visits
/// the prefix children in order and then child `k`.
pub fn check_posterior_invariance(
    tree: &Tree,
    mixture: &ProductMixture,
    k: usize,
    value: bool,
    prefix: &[(usize, bool)],
    alpha: Option<&GeneralAlgorithm>,
) -> Result<Verdict> {
    let gate = tree
        .gate()
        .ok_or_else(|| Error::ShapeMismatch("a single leaf has no root children".into()))?;
    let n = tree.root_children().len();
    let children: BTreeSet<usize> = prefix.iter().map(|&(j, _)| j).collect();
    if k >= n || prefix.iter().any(|&(j, _)| j >= n) {
        return Err(Error::IndexOutOfRange {
            index: k.max(prefix.iter().map(|&(j, _)| j).max().unwrap_or(0)),
            len: n,
        });
    }
    if children.contains(&k) || children.len() != prefix.len() {
        return Err(Error::InvalidDistribution(
            "the prefix must list distinct children other than the target".into(),
        ));
    }
    let ranges = tree.child_ranges();
    let dist = &mixture.realized;
    let lists: Vec<Vec<Assignment>> = prefix
        .iter()
        .map(|&(j, t)| mixture.family.get(j, t).support().copied().collect())
        .collect();
    let mut v = Verdict::new(format!("posterior of child {} is invariant", k + 1));
    let mut common: Option<Rational> = None;
    for combo in cartesian(&lists) {
        let matches = |w: &Assignment| {
            prefix
                .iter()
                .zip(&combo)
                .all(|(&(j, _), part)| w.restrict(&ranges[j]) == *part)
        };
        let Some(cond) = dist.conditional(matches) else {
            continue;
        };
        let p = cond.probability_of(|w| tree.ttype_bits(w.bits()).0[k] == value);
        match &common {
            None => common = Some(p),
            Some(c) => {
                v.require(*c == p, || {
                    format!(
                        "posterior {} differs from {} for prefix parts {:?}",
                        rational::fmt(&p),
                        rational::fmt(c),
                        combo.iter().map(|w| w.to_string()).collect::<Vec<_>>()
                    )
                });
            }
        }
    }
    let pass = !gate.controlling();
    if let (Some(alpha), Some(c)) = (alpha, &common) {
        if prefix.iter().all(|&(_, t)| t == pass) {
            let mut order: Vec<usize> = prefix.iter().map(|&(j, _)| j).collect();
            order.push(k);
            let visits = |w: &Assignment| visit_sequence(tree, alpha, w.bits()).starts_with(&order);
            if let Some(cond) = dist.conditional(visits) {
                let p = cond.probability_of(|w| tree.ttype_bits(w.bits()).0[k] == value);
                v.require(p == *c, || {
                    format!(
                        "posterior {} given the algorithm's visits differs from {}",
                        rational::fmt(&p),
                        rational::fmt(c)
                    )
                });
            }
        }
    }
    Ok(v)
}

/// Independent child distributions that all let the root continue cost any
/// depth-first mix at least the sum of the children's best depth-first costs.
pub fn check_product_lower_bound(
    tree: &Tree,
    parts: &[AssignmentDistribution],
    x: &RandomizedAlgorithm<GeneralAlgorithm>,
) -> Result<Verdict> {
    let gate = tree
        .gate()
        .ok_or_else(|| Error::ShapeMismatch("a single leaf has no root children".into()))?;
    if x.class() != Class::DepthFirst {
        return Err(Error::InvalidAlgorithm(format!(
            "expected a depth-first mix, got class {}",
            x.class()
        )));
    }
    let pass = !gate.controlling();
    let subtrees = tree.children_trees();
    let family = SubtreeDistributionFamily::new(
        tree,
        subtrees
            .iter()
            .zip(parts)
            .map(|(sub, s)| -> Result<[AssignmentDistribution; 2]> {
                // The unused member is a placeholder of the right shape.
                let other = AssignmentDistribution::point(
                    sub.enumerate_assignments(Filter::root(!pass))?[0],
                );
                Ok(if pass {
                    [other, s.clone()]
                } else {
                    [s.clone(), other]
                })
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    if parts.len() != subtrees.len() {
        return Err(Error::LengthMismatch {
            expected: subtrees.len(),
            got: parts.len(),
        });
    }
    let product = make_sdelta(
        tree,
        &DepthOneDistribution::point(&vec![pass; subtrees.len()]),
        &family,
    )?
    .realized;
    let cost = x.cost_vs(tree, &product);
    let mut bound = Rational::zero();
    for (sub, s) in subtrees.iter().zip(parts) {
        bound += best_response_depth_first(sub, s)?.1;
    }
    let mut v =
        Verdict::new("depth-first cost against a product is at least the sum of child optima");
    v.require(cost >= bound, || {
        format!(
            "cost {} is below the sum of child optima {}",
            rational::fmt(&cost),
            rational::fmt(&bound)
        )
    });
    Ok(v)
}

/// Joins one assignment per child, for building product test inputs.
pub fn product_of(tree: &Tree, parts: &[AssignmentDistribution]) -> Result<AssignmentDistribution> {
    let lists: Vec<Vec<(Assignment, Rational)>> = parts
        .iter()
        .map(|d| d.iter().map(|(w, p)| (*w, p.clone())).collect())
        .collect();
    AssignmentDistribution::new(
        tree.leaf_count(),
        cartesian(&lists).into_iter().map(|combo| {
            let ws: Vec<Assignment> = combo.iter().map(|(w, _)| *w).collect();
            let p = combo.iter().fold(rational::one(), |acc, (_, q)| acc * q);
            (join_children(tree, &ws), p)
        }),
    )
}
