//! Seeded generators for trees, algorithms and distributions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::{Assignment, AssignmentDistribution, Filter};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::strategy::decision::GeneralAlgorithm;
use crate::strategy::directional::{permutations, DirectionalAlgorithm};
use crate::strategy::randomized::{Class, DirectionalMix, RandomizedAlgorithm};
use crate::strategy::rda::Rda;
use crate::tree::{Shape, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A tree with `leaves` leaves and internal arities in `2..=max_arity`,
/// each gate chosen independently.
pub fn random_tree(leaves: usize, max_arity: usize, seed: u64) -> Result<Tree> {
    if leaves == 0 {
        return Err(Error::EmptyInput);
    }
    if leaves > 1 && max_arity < 2 {
        return Err(Error::Arity {
            path: "root".into(),
            arity: max_arity,
        });
    }
    let mut r = rng(seed);
    Tree::from_shape(&random_shape(&mut r, leaves, max_arity))
}

fn random_shape(r: &mut ChaCha8Rng, leaves: usize, max_arity: usize) -> Shape {
    if leaves == 1 {
        return Shape::leaf();
    }
    let arity = r.random_range(2..=max_arity.min(leaves));
    // Random composition of `leaves` into `arity` positive parts.
    let mut cuts: Vec<usize> = (1..leaves).collect();
    cuts.shuffle(r);
    let mut cuts: Vec<usize> = cuts[..arity - 1].to_vec();
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(arity);
    let mut prev = 0;
    for c in cuts.into_iter().chain([leaves]) {
        sizes.push(c - prev);
        prev = c;
    }
    let children = sizes
        .into_iter()
        .map(|n| random_shape(r, n, max_arity))
        .collect();
    if r.random::<bool>() {
        Shape::and(children)
    } else {
        Shape::or(children)
    }
}

/// Positive weights with small numerators, normalized.
pub fn random_weights(r: &mut impl Rng, n: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| r.random_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| rational::ratio(w, total)).collect()
}

pub fn random_directional(r: &mut impl Rng, tree: &Tree) -> DirectionalAlgorithm {
    if tree.is_leaf() {
        return DirectionalAlgorithm::Leaf;
    }
    let mut order: Vec<usize> = (0..tree.arity()).collect();
    order.shuffle(r);
    let children = tree
        .children_trees()
        .iter()
        .map(|c| random_directional(r, c))
        .collect();
    DirectionalAlgorithm::compose(order, children)
}

/// A mix of up to `size` random directional algorithms.
pub fn random_directional_mix(r: &mut impl Rng, tree: &Tree, size: usize) -> DirectionalMix {
    let n = r.random_range(1..=size.max(1));
    let algs: Vec<_> = (0..n).map(|_| random_directional(r, tree)).collect();
    let weights = random_weights(r, n);
    RandomizedAlgorithm::from_weights(Class::Directional, algs.into_iter().zip(weights))
        .expect("normalized weights")
}

/// Independent random order laws at every node, over at most `size`
/// permutations each.
pub fn random_rda(r: &mut impl Rng, tree: &Tree, size: usize) -> Rda {
    if tree.is_leaf() {
        return Rda::Leaf;
    }
    let mut perms = permutations(tree.arity());
    perms.shuffle(r);
    perms.truncate(r.random_range(1..=size.max(1)));
    let weights = random_weights(r, perms.len());
    let children = tree
        .children_trees()
        .iter()
        .map(|c| random_rda(r, c, size))
        .collect();
    Rda::node(perms.into_iter().zip(weights), children).expect("valid random order law")
}

/// A depth-first decision tree choosing uniformly among the allowed leaves
/// in every state.
pub fn random_depth_first(r: &mut impl Rng, tree: &Tree) -> GeneralAlgorithm {
    GeneralAlgorithm::from_policy(tree, |known, vals| {
        let mask = tree.depth_first_candidates(known, vals);
        let leaves: Vec<usize> = (0..tree.leaf_count())
            .filter(|&l| mask >> l & 1 == 1)
            .collect();
        leaves[r.random_range(0..leaves.len())]
    })
}

pub fn random_depth_first_mix(
    r: &mut impl Rng,
    tree: &Tree,
    size: usize,
) -> RandomizedAlgorithm<GeneralAlgorithm> {
    let n = r.random_range(1..=size.max(1));
    let algs: Vec<_> = (0..n).map(|_| random_depth_first(r, tree)).collect();
    let weights = random_weights(r, n);
    RandomizedAlgorithm::from_weights(Class::DepthFirst, algs.into_iter().zip(weights))
        .expect("normalized weights")
}

/// A distribution on a random subset of the filtered assignments of size at
/// most `size`.
pub fn random_distribution(
    r: &mut impl Rng,
    tree: &Tree,
    filter: Filter,
    size: usize,
) -> Result<AssignmentDistribution> {
    let mut support: Vec<Assignment> = tree.enumerate_assignments(filter)?;
    support.shuffle(r);
    support.truncate(r.random_range(1..=size.max(1)).min(support.len()));
    let weights = random_weights(r, support.len());
    AssignmentDistribution::new(tree.leaf_count(), support.into_iter().zip(weights))
}
