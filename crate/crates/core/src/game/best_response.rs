//! Exact best responses of each algorithm class against an assignment
//! distribution.
//!
//! Weights are scaled to integers over a common denominator, so the dynamic
//! programs add and compare integers; machine integers are used whenever the
//! total mass leaves enough headroom.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, AddAssign};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::assignment::AssignmentDistribution;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::strategy::decision::GeneralAlgorithm;
use crate::strategy::directional::DirectionalAlgorithm;
use crate::strategy::randomized::Class;
use crate::tree::Tree;

/// Largest tree handled by the partial-assignment dynamic programs.
pub const MAX_DP_LEAVES: usize = 12;

pub(crate) trait Weight:
    Clone + Ord + Zero + Add<Output = Self> + AddAssign + Send + Sync + Debug
{
    fn to_bigint(&self) -> BigInt;
}

impl Weight for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Weight for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

enum Scaled {
    Small(Vec<(u64, i128)>),
    Big(Vec<(u64, BigInt)>),
}

fn scale(dist: &AssignmentDistribution) -> (Scaled, BigInt) {
    let probs: Vec<Rational> = dist.iter().map(|(_, p)| p.clone()).collect();
    let (ints, den) = rational::scale_to_integers(&probs);
    let bits: Vec<u64> = dist.support().map(|w| w.bits()).collect();
    // Costs are at most 64 times the total mass, which is `den`.
    if den.bits() < 100 {
        let small = bits
            .into_iter()
            .zip(ints.iter().map(|v| rational::to_i128(v).expect("fits")))
            .collect();
        (Scaled::Small(small), den)
    } else {
        (Scaled::Big(bits.into_iter().zip(ints).collect()), den)
    }
}

fn check_length(tree: &Tree, dist: &AssignmentDistribution) -> Result<()> {
    if dist.leaves() != tree.leaf_count() {
        return Err(Error::LengthMismatch {
            expected: tree.leaf_count(),
            got: dist.leaves(),
        });
    }
    Ok(())
}

pub fn best_response_directional(
    tree: &Tree,
    dist: &AssignmentDistribution,
) -> Result<(DirectionalAlgorithm, Rational)> {
    check_length(tree, dist)?;
    let (scaled, den) = scale(dist);
    let (alg, total) = match scaled {
        Scaled::Small(e) => {
            let (a, t) = directional_at(tree, 0, &e);
            (a, t.to_bigint())
        }
        Scaled::Big(e) => directional_at(tree, 0, &e),
    };
    Ok((alg, Rational::new(total, den)))
}

/// Merges entries that agree on the leaves in `mask`.
fn project<W: Weight>(entries: &[(u64, W)], mask: u64) -> Vec<(u64, W)> {
    let mut map: std::collections::BTreeMap<u64, W> = std::collections::BTreeMap::new();
    for (bits, w) in entries {
        *map.entry(bits & mask).or_insert_with(W::zero) += w.clone();
    }
    map.into_iter().collect()
}

fn directional_at<W: Weight>(
    tree: &Tree,
    idx: usize,
    entries: &[(u64, W)],
) -> (DirectionalAlgorithm, W) {
    let node = tree.node(idx);
    if entries.is_empty() {
        return (DirectionalAlgorithm::identity_at(tree, idx), W::zero());
    }
    let Some(gate) = node.gate else {
        let mass = entries
            .iter()
            .fold(W::zero(), |acc, (_, w)| acc + w.clone());
        return (DirectionalAlgorithm::Leaf, mass);
    };
    let c = gate.controlling();
    let kids = &node.children;
    let n = kids.len();
    // Bit j of `open[e]` is set when child j does not decide the gate.
    let open: Vec<u32> = entries
        .iter()
        .map(|(bits, _)| {
            kids.iter()
                .enumerate()
                .filter(|(_, &k)| tree.eval_node(k, *bits) != c)
                .fold(0u32, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    let mut memo: HashMap<(usize, u32), (DirectionalAlgorithm, W)> = HashMap::new();
    let mut part = |j: usize, before: u32| -> (DirectionalAlgorithm, W) {
        memo.entry((j, before))
            .or_insert_with(|| {
                let reach: Vec<(u64, W)> = entries
                    .iter()
                    .zip(&open)
                    .filter(|(_, &o)| o & before == before)
                    .map(|(e, _)| e.clone())
                    .collect();
                let sub = project(&reach, tree.node(kids[j]).mask());
                directional_at(tree, kids[j], &sub)
            })
            .clone()
    };
    // rest[P]: cheapest way to finish once the children in P are done;
    // the smallest index wins ties, which yields the first optimal order
    // in lexicographic order.
    let full = (1u32 << n) - 1;
    let mut rest: Vec<Option<(W, usize)>> = vec![None; 1 << n];
    for placed in (0..full).rev() {
        let mut best: Option<(W, usize)> = None;
        for j in (0..n).filter(|j| placed >> j & 1 == 0) {
            let next = placed | 1 << j;
            let mut total = part(j, placed).1;
            if next != full {
                total += rest[next as usize].as_ref().expect("filled").0.clone();
            }
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, j));
            }
        }
        rest[placed as usize] = best;
    }
    let total = rest[0].as_ref().expect("filled").0.clone();
    let mut order = Vec::with_capacity(n);
    let mut placed = 0u32;
    while placed != full {
        let j = rest[placed as usize].as_ref().expect("filled").1;
        order.push(j);
        placed |= 1 << j;
    }
    let mut children = vec![DirectionalAlgorithm::Leaf; n];
    let mut before = 0u32;
    for &j in &order {
        children[j] = part(j, before).0;
        before |= 1 << j;
    }
    // Children never reached with positive mass keep the canonical choice.
    (DirectionalAlgorithm::Node { order, children }, total)
}

struct DecisionDp<'a, W> {
    tree: &'a Tree,
    depth_first: bool,
    memo: HashMap<(u64, u64), (W, usize)>,
}

impl<W: Weight> DecisionDp<'_, W> {
    fn candidates(&self, known: u64, vals: u64) -> u64 {
        if self.depth_first {
            self.tree.depth_first_candidates(known, vals)
        } else {
            self.tree.live_leaves(known, vals)
        }
    }

    fn solve(&mut self, known: u64, vals: u64, entries: &[(u64, W)]) -> W {
        if entries.is_empty() || self.tree.statuses(known, vals)[0].is_some() {
            return W::zero();
        }
        if let Some((v, _)) = self.memo.get(&(known, vals)) {
            return v.clone();
        }
        let mass = entries
            .iter()
            .fold(W::zero(), |acc, (_, w)| acc + w.clone());
        let mut best: Option<(W, usize)> = None;
        let mut mask = self.candidates(known, vals);
        while mask != 0 {
            let leaf = mask.trailing_zeros() as usize;
            let bit = 1u64 << leaf;
            mask ^= bit;
            let (ones, zeros): (Vec<_>, Vec<_>) =
                entries.iter().cloned().partition(|(b, _)| b & bit != 0);
            let mut total = mass.clone();
            total += self.solve(known | bit, vals, &zeros);
            if best.as_ref().is_some_and(|(b, _)| total >= *b) {
                continue;
            }
            total += self.solve(known | bit, vals | bit, &ones);
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, leaf));
            }
        }
        let best = best.expect("an undetermined state has a candidate leaf");
        self.memo.insert((known, vals), best.clone());
        best.0
    }
}

fn decision_response<W: Weight>(
    tree: &Tree,
    depth_first: bool,
    entries: &[(u64, W)],
) -> (GeneralAlgorithm, BigInt) {
    let mut dp = DecisionDp {
        tree,
        depth_first,
        memo: HashMap::new(),
    };
    let total = dp.solve(0, 0, entries).to_bigint();
    let alg =
        GeneralAlgorithm::from_policy(tree, |known, vals| match dp.memo.get(&(known, vals)) {
            Some((_, leaf)) => *leaf,
            None => dp.candidates(known, vals).trailing_zeros() as usize,
        });
    (alg, total)
}

fn decision_best_response(
    tree: &Tree,
    dist: &AssignmentDistribution,
    depth_first: bool,
) -> Result<(GeneralAlgorithm, Rational)> {
    check_length(tree, dist)?;
    if tree.leaf_count() > MAX_DP_LEAVES {
        return Err(Error::BoundExceeded {
            what: "leaves for the best-response dynamic program",
            actual: tree.leaf_count() as u128,
            bound: MAX_DP_LEAVES as u128,
        });
    }
    let (scaled, den) = scale(dist);
    let (alg, total) = match scaled {
        Scaled::Small(e) => decision_response(tree, depth_first, &e),
        Scaled::Big(e) => decision_response(tree, depth_first, &e),
    };
    Ok((alg, Rational::new(total, den)))
}

pub fn best_response_depth_first(
    tree: &Tree,
    dist: &AssignmentDistribution,
) -> Result<(GeneralAlgorithm, Rational)> {
    decision_best_response(tree, dist, true)
}

pub fn best_response_general(
    tree: &Tree,
    dist: &AssignmentDistribution,
) -> Result<(GeneralAlgorithm, Rational)> {
    decision_best_response(tree, dist, false)
}

/// Minimal expected cost over a class against `dist`.
pub fn min_cost(tree: &Tree, class: Class, dist: &AssignmentDistribution) -> Result<Rational> {
    Ok(match class {
        Class::Directional => best_response_directional(tree, dist)?.1,
        Class::DepthFirst => best_response_depth_first(tree, dist)?.1,
        Class::General => best_response_general(tree, dist)?.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{Assignment, Filter};
    use crate::rational::ratio;
    use crate::strategy::enumerate::{
        enumerate_depth_first, enumerate_directional, enumerate_general, Limits,
    };
    use crate::strategy::randomized::PureAlgorithm;

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    fn brute_min<A: PureAlgorithm>(
        tree: &Tree,
        algs: &[A],
        d: &AssignmentDistribution,
    ) -> Rational {
        algs.iter().map(|a| a.cost_vs(tree, d)).min().unwrap()
    }

    #[test]
    fn single_leaf_costs_one() {
        let t = Tree::leaf();
        let d = AssignmentDistribution::uniform(1, &["0".parse().unwrap(), "1".parse().unwrap()])
            .unwrap();
        assert_eq!(best_response_directional(&t, &d).unwrap().1, ratio(1, 1));
        assert_eq!(best_response_depth_first(&t, &d).unwrap().1, ratio(1, 1));
        assert_eq!(best_response_general(&t, &d).unwrap().1, ratio(1, 1));
    }

    #[test]
    fn uniform_root_zero_of_and() {
        let t = Tree::parse("(and * *)").unwrap();
        let d = AssignmentDistribution::uniform(2, &t.enumerate_assignments(Filter::Zero).unwrap())
            .unwrap();
        let (a, c) = best_response_directional(&t, &d).unwrap();
        assert_eq!(c, ratio(4, 3));
        assert_eq!(a.cost_vs(&t, &d), c);
    }

    #[test]
    fn point_masses_match_enumeration() {
        let t = two_by_two();
        let limits = Limits::default();
        let dir = enumerate_directional(&t, &limits).unwrap();
        let df = enumerate_depth_first(&t, &limits).unwrap();
        let general = enumerate_general(&t, &limits).unwrap();
        for w in Assignment::all(4) {
            let d = AssignmentDistribution::point(w);
            let (a, c) = best_response_directional(&t, &d).unwrap();
            assert_eq!(c, brute_min(&t, &dir, &d));
            assert_eq!(a.cost_vs(&t, &d), c);
            assert_eq!(
                best_response_depth_first(&t, &d).unwrap().1,
                brute_min(&t, &df, &d)
            );
            assert_eq!(
                best_response_general(&t, &d).unwrap().1,
                brute_min(&t, &general, &d)
            );
        }
    }

    #[test]
    fn responses_are_valid_members_of_their_class() {
        let t = Tree::parse("(or (and * *) (and * * *))").unwrap();
        let all = t.enumerate_assignments(Filter::All).unwrap();
        let d = AssignmentDistribution::new(
            5,
            all.iter()
                .enumerate()
                .map(|(i, w)| (*w, ratio(i as i64 + 1, 528))),
        )
        .unwrap();
        let (df, cdf) = best_response_depth_first(&t, &d).unwrap();
        assert!(df.is_depth_first(&t));
        assert_eq!(PureAlgorithm::cost_vs(&df, &t, &d), cdf);
        let (g, cg) = best_response_general(&t, &d).unwrap();
        assert!(g.validate(&t).is_ok());
        assert_eq!(PureAlgorithm::cost_vs(&g, &t, &d), cg);
        let (dir, cdir) = best_response_directional(&t, &d).unwrap();
        assert_eq!(dir.cost_vs(&t, &d), cdir);
        assert!(cg <= cdf && cdf <= cdir);
    }

    #[test]
    fn uniform_on_two_by_two_orders_classes() {
        let t = two_by_two();
        let d = AssignmentDistribution::uniform(4, &t.enumerate_assignments(Filter::All).unwrap())
            .unwrap();
        let dir = best_response_directional(&t, &d).unwrap().1;
        let df = best_response_depth_first(&t, &d).unwrap().1;
        let general = best_response_general(&t, &d).unwrap().1;
        assert!(general <= df && df <= dir);
        let limits = Limits::default();
        assert_eq!(
            dir,
            brute_min(&t, &enumerate_directional(&t, &limits).unwrap(), &d)
        );
        assert_eq!(
            df,
            brute_min(&t, &enumerate_depth_first(&t, &limits).unwrap(), &d)
        );
    }

    #[test]
    fn dp_bound() {
        let t = Tree::parse("(or * * * * * * * * * * * * *)").unwrap();
        let d = AssignmentDistribution::point(Assignment::new(13, 0));
        assert!(best_response_general(&t, &d).is_err());
        assert_eq!(best_response_directional(&t, &d).unwrap().1, ratio(13, 1));
    }
}
