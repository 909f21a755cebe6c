//! Exhaustive enumeration of the pure strategy classes.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::strategy::decision::{Decision, GeneralAlgorithm};
use crate::strategy::directional::{permutations, DirectionalAlgorithm};
use crate::tree::Tree;

/// Feasibility bounds for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_algorithms: u128,
    pub max_depth_first_leaves: usize,
    pub max_general_leaves: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_algorithms: 1_000_000,
            max_depth_first_leaves: 6,
            max_general_leaves: 5,
        }
    }
}

fn exceeded(what: &'static str, actual: u128, bound: u128) -> Error {
    Error::BoundExceeded {
        what,
        actual,
        bound,
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Π over internal nodes of arity!, saturating.
pub fn count_directional(tree: &Tree) -> u128 {
    tree.nodes()
        .iter()
        .filter(|n| !n.is_leaf())
        .fold(1u128, |acc, n| {
            acc.saturating_mul(factorial(n.children.len()))
        })
}

pub fn enumerate_directional(tree: &Tree, limits: &Limits) -> Result<Vec<DirectionalAlgorithm>> {
    let count = count_directional(tree);
    if count > limits.max_algorithms {
        return Err(exceeded(
            "directional algorithms",
            count,
            limits.max_algorithms,
        ));
    }
    Ok(directional_at(tree, 0))
}

fn directional_at(tree: &Tree, idx: usize) -> Vec<DirectionalAlgorithm> {
    let node = tree.node(idx);
    if node.is_leaf() {
        return vec![DirectionalAlgorithm::Leaf];
    }
    let parts: Vec<Vec<DirectionalAlgorithm>> = node
        .children
        .iter()
        .map(|&c| directional_at(tree, c))
        .collect();
    let combos = cartesian(&parts);
    let mut out = Vec::new();
    for order in permutations(node.children.len()) {
        for children in &combos {
            out.push(DirectionalAlgorithm::Node {
                order: order.clone(),
                children: children.clone(),
            });
        }
    }
    out
}

/// Cartesian product with the first factor varying slowest.
pub(crate) fn cartesian<T: Clone>(parts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for prefix in &acc {
            for item in part {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Discipline {
    General,
    DepthFirst,
}

fn candidates(tree: &Tree, known: u64, vals: u64, discipline: Discipline) -> u64 {
    match discipline {
        Discipline::General => tree.live_leaves(known, vals),
        Discipline::DepthFirst => tree.depth_first_candidates(known, vals),
    }
}

fn count_from(
    tree: &Tree,
    known: u64,
    vals: u64,
    discipline: Discipline,
    memo: &mut HashMap<(u64, u64), u128>,
) -> u128 {
    if tree.statuses(known, vals)[0].is_some() {
        return 1;
    }
    if let Some(&c) = memo.get(&(known, vals)) {
        return c;
    }
    let mut total = 0u128;
    let mut mask = candidates(tree, known, vals, discipline);
    while mask != 0 {
        let bit = mask & mask.wrapping_neg();
        mask ^= bit;
        let a = count_from(tree, known | bit, vals, discipline, memo);
        let b = count_from(tree, known | bit, vals | bit, discipline, memo);
        total = total.saturating_add(a.saturating_mul(b));
    }
    memo.insert((known, vals), total);
    total
}

/// Number of depth-first algorithms, saturating at `u128::MAX`.
pub fn count_depth_first(tree: &Tree) -> u128 {
    count_from(tree, 0, 0, Discipline::DepthFirst, &mut HashMap::new())
}

/// Number of general algorithms, saturating at `u128::MAX`.
pub fn count_general(tree: &Tree) -> u128 {
    count_from(tree, 0, 0, Discipline::General, &mut HashMap::new())
}

fn enumerate_from(
    tree: &Tree,
    known: u64,
    vals: u64,
    discipline: Discipline,
    memo: &mut HashMap<(u64, u64), Vec<Arc<Decision>>>,
) -> Vec<Arc<Decision>> {
    if let Some(v) = tree.statuses(known, vals)[0] {
        return vec![Arc::new(Decision::Done(v))];
    }
    if let Some(list) = memo.get(&(known, vals)) {
        return list.clone();
    }
    let mut out = Vec::new();
    let mut mask = candidates(tree, known, vals, discipline);
    while mask != 0 {
        let leaf = mask.trailing_zeros() as usize;
        let bit = 1u64 << leaf;
        mask ^= bit;
        let zeros = enumerate_from(tree, known | bit, vals, discipline, memo);
        let ones = enumerate_from(tree, known | bit, vals | bit, discipline, memo);
        for a in &zeros {
            for b in &ones {
                out.push(Arc::new(Decision::Query {
                    leaf,
                    on0: a.clone(),
                    on1: b.clone(),
                }));
            }
        }
    }
    memo.insert((known, vals), out.clone());
    out
}

pub fn enumerate_depth_first(tree: &Tree, limits: &Limits) -> Result<Vec<GeneralAlgorithm>> {
    let n = tree.leaf_count();
    if n > limits.max_depth_first_leaves {
        return Err(exceeded(
            "leaves for depth-first enumeration",
            n as u128,
            limits.max_depth_first_leaves as u128,
        ));
    }
    let count = count_depth_first(tree);
    if count > limits.max_algorithms {
        return Err(exceeded(
            "depth-first algorithms",
            count,
            limits.max_algorithms,
        ));
    }
    let roots = enumerate_from(tree, 0, 0, Discipline::DepthFirst, &mut HashMap::new());
    Ok(roots.into_iter().map(GeneralAlgorithm::new).collect())
}

pub fn enumerate_general(tree: &Tree, limits: &Limits) -> Result<Vec<GeneralAlgorithm>> {
    let n = tree.leaf_count();
    if n > limits.max_general_leaves {
        return Err(exceeded(
            "leaves for general enumeration",
            n as u128,
            limits.max_general_leaves as u128,
        ));
    }
    let count = count_general(tree);
    if count > limits.max_algorithms {
        return Err(exceeded("general algorithms", count, limits.max_algorithms));
    }
    let roots = enumerate_from(tree, 0, 0, Discipline::General, &mut HashMap::new());
    Ok(roots.into_iter().map(GeneralAlgorithm::new).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    #[test]
    fn directional_counts() {
        let limits = Limits::default();
        assert_eq!(
            enumerate_directional(&Tree::leaf(), &limits).unwrap().len(),
            1
        );
        let and2 = Tree::parse("(and * *)").unwrap();
        assert_eq!(enumerate_directional(&and2, &limits).unwrap().len(), 2);
        let all = enumerate_directional(&two_by_two(), &limits).unwrap();
        assert_eq!(all.len(), 8);
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 8);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn directional_bound() {
        let t = Tree::parse("(or * * * * * * * * * *)").unwrap();
        let limits = Limits {
            max_algorithms: 1000,
            ..Limits::default()
        };
        assert!(matches!(
            enumerate_directional(&t, &limits),
            Err(Error::BoundExceeded {
                actual: 3628800,
                ..
            })
        ));
    }

    #[test]
    fn small_depth_first_and_general() {
        let limits = Limits::default();
        let leaf = Tree::leaf();
        assert_eq!(enumerate_depth_first(&leaf, &limits).unwrap().len(), 1);
        assert_eq!(enumerate_general(&leaf, &limits).unwrap().len(), 1);
        let and2 = Tree::parse("(and * *)").unwrap();
        let df = enumerate_depth_first(&and2, &limits).unwrap();
        let lowered: BTreeSet<_> = enumerate_directional(&and2, &limits)
            .unwrap()
            .iter()
            .map(|a| a.lower(&and2))
            .collect();
        assert_eq!(df.iter().cloned().collect::<BTreeSet<_>>(), lowered);
        assert_eq!(enumerate_general(&and2, &limits).unwrap().len(), 2);
    }

    #[test]
    fn class_containment_on_two_by_two() {
        let t = two_by_two();
        let limits = Limits::default();
        let dir: BTreeSet<_> = enumerate_directional(&t, &limits)
            .unwrap()
            .iter()
            .map(|a| a.lower(&t))
            .collect();
        let df: BTreeSet<_> = enumerate_depth_first(&t, &limits)
            .unwrap()
            .into_iter()
            .collect();
        let general: BTreeSet<_> = enumerate_general(&t, &limits)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(dir.len(), 8);
        assert!(dir.is_subset(&df) && dir.len() < df.len());
        assert!(df.is_subset(&general) && df.len() < general.len());
        assert_eq!(df.len() as u128, count_depth_first(&t));
        assert_eq!(general.len() as u128, count_general(&t));
        for a in &general {
            assert!(a.validate(&t).is_ok());
            assert_eq!(a.is_depth_first(&t), df.contains(a));
            assert_eq!(a.is_directional(&t), dir.contains(a));
        }
    }

    #[test]
    fn leaf_bounds() {
        let t = Tree::parse("(and (or * *) (or * *) (or * *))").unwrap();
        assert!(matches!(
            enumerate_general(&t, &Limits::default()),
            Err(Error::BoundExceeded { .. })
        ));
        assert!(enumerate_depth_first(&t, &Limits::default()).is_ok());
    }
}
