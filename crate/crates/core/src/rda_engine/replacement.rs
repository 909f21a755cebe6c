//! Replacing the part of a randomized directional algorithm that acts on one
//! root subtree, and the cost identities that survive the replacement.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::assignment::{Assignment, Filter};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::strategy::directional::DirectionalAlgorithm;
use crate::strategy::randomized::{Class, DirectionalMix};
use crate::strategy::rda::{order_marginal, Rda, DEFAULT_EXPANSION_BOUND};
use crate::tree::{Gate, Tree};
use crate::verdict::Verdict;

/// Root order plus every root-child part except the one at `k`. Two
/// algorithms are equivalent away from `k` exactly when their keys match.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EquivClassKey {
    pub k: usize,
    pub order: Vec<usize>,
    pub others: Vec<Option<DirectionalAlgorithm>>,
}

impl EquivClassKey {
    pub fn of(alpha: &DirectionalAlgorithm, k: usize) -> Self {
        EquivClassKey {
            k,
            order: alpha.order().to_vec(),
            others: alpha
                .children()
                .iter()
                .enumerate()
                .map(|(j, a)| (j != k).then(|| a.clone()))
                .collect(),
        }
    }

    pub fn admits(&self, beta: &DirectionalAlgorithm) -> bool {
        *self == Self::of(beta, self.k)
    }

    /// The member of the class whose part at `k` is `part`.
    pub fn complete(&self, part: DirectionalAlgorithm) -> DirectionalAlgorithm {
        let children = self
            .others
            .iter()
            .map(|o| o.clone().unwrap_or_else(|| part.clone()))
            .collect();
        DirectionalAlgorithm::compose(self.order.clone(), children)
    }
}

/// Whether a root gate evaluating its children in `sigma` with child values
/// `t` reaches child `k`.
pub fn event_holds(gate: Gate, sigma: &[usize], t: &[bool], k: usize) -> bool {
    let stop = gate.controlling();
    for &j in sigma {
        if j == k {
            return true;
        }
        if t[j] == stop {
            return false;
        }
    }
    false
}

fn root_gate(tree: &Tree) -> Result<Gate> {
    tree.gate()
        .ok_or_else(|| Error::ShapeMismatch("the root is a leaf and has no subtrees".into()))
}

fn check_child(tree: &Tree, k: usize) -> Result<()> {
    let n = tree.root_children().len();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    Ok(())
}

fn check_directional(x: &DirectionalMix) -> Result<()> {
    if x.class() != Class::Directional {
        return Err(Error::InvalidAlgorithm(format!(
            "expected a directional mix, got class {}",
            x.class()
        )));
    }
    Ok(())
}

/// Probability under `x` that child `k` is evaluated when the root children
/// take values `t`.
pub fn event_probability(
    tree: &Tree,
    x: &DirectionalMix,
    k: usize,
    t: &[bool],
) -> Result<Rational> {
    let gate = root_gate(tree)?;
    check_child(tree, k)?;
    check_directional(x)?;
    Ok(x.iter()
        .filter(|(a, _)| event_holds(gate, a.order(), t, k))
        .map(|(_, p)| p.clone())
        .sum())
}

/// Mass of the equivalence class of `alpha` away from `k`.
pub fn equivalence_probability(
    x: &DirectionalMix,
    alpha: &DirectionalAlgorithm,
    k: usize,
) -> Rational {
    let key = EquivClassKey::of(alpha, k);
    x.iter()
        .filter(|(b, _)| key.admits(b))
        .map(|(_, p)| p.clone())
        .sum()
}

fn expand_on_child(tree: &Tree, k: usize, y: &Rda) -> Result<DirectionalMix> {
    check_child(tree, k)?;
    let (sub, _) = tree.subtree_at(tree.root_children()[k]);
    y.validate(&sub)?;
    y.expand(DEFAULT_EXPANSION_BOUND)
}

/// Keeps `alpha` outside child `k` and plays `y` on child `k`.
pub fn replace_in_algorithm(
    tree: &Tree,
    alpha: &DirectionalAlgorithm,
    k: usize,
    y: &Rda,
) -> Result<DirectionalMix> {
    alpha.validate(tree)?;
    let part = expand_on_child(tree, k, y)?;
    let key = EquivClassKey::of(alpha, k);
    DirectionalMix::from_weights(
        Class::Directional,
        part.iter()
            .map(|(g, p)| (key.complete(g.clone()), p.clone())),
    )
}

/// Replacement defined as the `x`-weighted mixture of the pointwise
/// replacements.
pub fn replace_subalgorithm(
    tree: &Tree,
    x: &DirectionalMix,
    k: usize,
    y: &Rda,
) -> Result<DirectionalMix> {
    check_directional(x)?;
    let part = expand_on_child(tree, k, y)?;
    let mut acc: BTreeMap<DirectionalAlgorithm, Rational> = BTreeMap::new();
    for (alpha, px) in x.iter() {
        alpha.validate(tree)?;
        let key = EquivClassKey::of(alpha, k);
        for (g, py) in part.iter() {
            *acc.entry(key.complete(g.clone()))
                .or_insert_with(Rational::zero) += px * py;
        }
    }
    DirectionalMix::from_weights(Class::Directional, acc)
}

/// Replacement through the closed form: the class mass away from `k` times
/// the probability `y` assigns to the part at `k`.
pub fn replace_closed_form(
    tree: &Tree,
    x: &DirectionalMix,
    k: usize,
    y: &Rda,
) -> Result<DirectionalMix> {
    check_directional(x)?;
    let part = expand_on_child(tree, k, y)?;
    let mut classes: BTreeMap<EquivClassKey, Rational> = BTreeMap::new();
    for (alpha, p) in x.iter() {
        *classes
            .entry(EquivClassKey::of(alpha, k))
            .or_insert_with(Rational::zero) += p;
    }
    let mut weights = Vec::new();
    for (key, mass) in &classes {
        for (g, py) in part.iter() {
            let gamma = key.complete(g.clone());
            debug_assert_eq!(&equivalence_probability(x, &gamma, k), mass);
            weights.push((gamma, mass * py));
        }
    }
    DirectionalMix::from_weights(Class::Directional, weights)
}

/// Root orders keep their probabilities under replacement.
pub fn check_order_invariance(
    tree: &Tree,
    x: &DirectionalMix,
    k: usize,
    y: &Rda,
) -> Result<Verdict> {
    let replaced = replace_subalgorithm(tree, x, k, y)?;
    let closed = replace_closed_form(tree, x, k, y)?;
    let mut v = Verdict::new("order invariance under replacement");
    v.require(replaced == closed, || {
        "mixture and closed-form replacements differ".into()
    });
    let total: Rational = replaced.iter().map(|(_, p)| p.clone()).sum();
    v.require(total.is_one(), || {
        format!("replaced mass is {}", rational::fmt(&total))
    });
    let before = order_marginal(x);
    let after = order_marginal(&replaced);
    v.require(before == after, || {
        format!("order marginals differ: {before:?} vs {after:?}")
    });
    Ok(v)
}

/// Mass of each part on child `j` restricted to orders that reach `j`
/// under child values `t`.
pub fn filtered_child_mass(
    tree: &Tree,
    x: &DirectionalMix,
    j: usize,
    t: &[bool],
) -> Result<BTreeMap<DirectionalAlgorithm, Rational>> {
    let gate = root_gate(tree)?;
    check_child(tree, j)?;
    let mut out: BTreeMap<DirectionalAlgorithm, Rational> = BTreeMap::new();
    for (alpha, p) in x.iter() {
        if event_holds(gate, alpha.order(), t, j) {
            *out.entry(alpha.child(j).clone())
                .or_insert_with(Rational::zero) += p;
        }
    }
    Ok(out)
}

/// Recomputes the expected cost on `omega` subtree by subtree and compares
/// it with the direct computation.
pub fn check_cost_decomposition(
    tree: &Tree,
    x: &DirectionalMix,
    omega: &Assignment,
) -> Result<Verdict> {
    check_directional(x)?;
    tree.check(omega)?;
    let mut v = Verdict::new(format!("cost decomposition at {omega}"));
    let direct = x.cost(tree, omega)?;
    let decomposed = if tree.is_leaf() {
        x.iter().map(|(_, p)| p.clone()).sum::<Rational>()
    } else {
        let t = tree.ttype(omega)?.0;
        let ranges = tree.child_ranges();
        let subtrees = tree.children_trees();
        let mut total = Rational::zero();
        for (j, (range, sub)) in ranges.iter().zip(&subtrees).enumerate() {
            let wj = omega.restrict(range).bits();
            for (part, mass) in filtered_child_mass(tree, x, j, &t)? {
                total += mass * rational::int(i64::from(part.cost_bits(sub, wj)));
            }
        }
        total
    };
    v.require(direct == decomposed, || {
        format!(
            "direct cost {} but decomposed cost {}",
            rational::fmt(&direct),
            rational::fmt(&decomposed)
        )
    });
    Ok(v)
}

/// Replacing child `k` leaves the filtered part masses of every other child
/// unchanged.
pub fn check_sibling_masses(
    tree: &Tree,
    x: &DirectionalMix,
    j: usize,
    k: usize,
    y: &Rda,
    t: &[bool],
) -> Result<Verdict> {
    if j == k {
        return Err(Error::InvalidAlgorithm(
            "sibling masses need two distinct children".into(),
        ));
    }
    let replaced = replace_subalgorithm(tree, x, k, y)?;
    let before = filtered_child_mass(tree, x, j, t)?;
    let after = filtered_child_mass(tree, &replaced, j, t)?;
    let mut v = Verdict::new(format!(
        "filtered masses of child {} after replacing child {}",
        j + 1,
        k + 1
    ));
    let parts: std::collections::BTreeSet<_> = before.keys().chain(after.keys()).collect();
    for part in parts {
        let a = before.get(part).cloned().unwrap_or_else(Rational::zero);
        let b = after.get(part).cloned().unwrap_or_else(Rational::zero);
        v.require(a == b, || {
            format!(
                "part {} has mass {} before and {} after",
                part.encode(),
                rational::fmt(&a),
                rational::fmt(&b)
            )
        });
    }
    Ok(v)
}

fn worst_cases(tree: &Tree, x: &DirectionalMix) -> Result<[Rational; 3]> {
    Ok([
        x.max_cost(tree, Filter::All)?.0,
        x.max_cost(tree, Filter::Zero)?.0,
        x.max_cost(tree, Filter::One)?.0,
    ])
}

/// Replacing each child in turn by `parts[k]` never raises a worst case, and
/// the final result costs the same as the RDA with the root orders of `x`
/// over `parts`.
pub fn check_improvement(tree: &Tree, x: &DirectionalMix, parts: &[Rda]) -> Result<Verdict> {
    check_directional(x)?;
    let n = tree.root_children().len();
    if parts.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: parts.len(),
        });
    }
    let mut v = Verdict::new("worst cases do not increase under replacement");
    let original = worst_cases(tree, x)?;
    let mut current = x.clone();
    let mut current_worst = original.clone();
    for (k, part) in parts.iter().enumerate() {
        let next = replace_subalgorithm(tree, &current, k, part)?;
        let next_worst = worst_cases(tree, &next)?;
        for (f, filter) in Filter::ALL.iter().enumerate() {
            v.require(next_worst[f] <= current_worst[f], || {
                format!(
                    "replacing child {} raises the {} worst case from {} to {}",
                    k + 1,
                    filter.name(),
                    rational::fmt(&current_worst[f]),
                    rational::fmt(&next_worst[f])
                )
            });
        }
        current = next;
        current_worst = next_worst;
    }
    if n > 0 {
        let z = Rda::node(order_marginal(x), parts.to_vec())?;
        for w in tree.enumerate_assignments(Filter::All)? {
            let a = z.cost_bits(tree, w.bits());
            let b = current.cost_bits(tree, w.bits());
            v.require(a == b, || {
                format!(
                    "at {w} the re-expressed RDA costs {} but the replaced mix costs {}",
                    rational::fmt(&a),
                    rational::fmt(&b)
                )
            });
        }
        let z_worst = worst_cases(tree, &z.expand(DEFAULT_EXPANSION_BOUND)?)?;
        for (f, filter) in Filter::ALL.iter().enumerate() {
            v.require(z_worst[f] <= original[f], || {
                format!(
                    "the re-expressed RDA has {} worst case {} above {}",
                    filter.name(),
                    rational::fmt(&z_worst[f]),
                    rational::fmt(&original[f])
                )
            });
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::rda_engine::joint::build_joint_optimal_rda;
    use crate::strategy::enumerate::{enumerate_directional, Limits};

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    fn alg(text: &str, t: &Tree) -> DirectionalAlgorithm {
        DirectionalAlgorithm::decode(text, t).unwrap()
    }

    fn joint_parts(t: &Tree) -> Vec<Rda> {
        t.children_trees()
            .iter()
            .map(|c| build_joint_optimal_rda(c).unwrap().rda)
            .collect()
    }

    #[test]
    fn event_examples() {
        assert!(event_holds(Gate::And, &[0, 1], &[false, true], 0));
        assert!(!event_holds(Gate::And, &[0, 1], &[false, true], 1));
        assert!(event_holds(Gate::And, &[0, 1], &[true, false], 1));
        assert!(!event_holds(Gate::Or, &[1, 0], &[true, true], 0));
        let t = two_by_two();
        let a = alg("[2 1 | [1 2] [1 2]]", &t);
        let x = DirectionalMix::point(Class::Directional, a.clone());
        for tt in [[false, false], [false, true], [true, false], [true, true]] {
            for k in 0..2 {
                let p = event_probability(&t, &x, k, &tt).unwrap();
                let expected = if event_holds(Gate::And, a.order(), &tt, k) {
                    1
                } else {
                    0
                };
                assert_eq!(p, ratio(expected, 1));
            }
        }
    }

    #[test]
    fn identity_replacement() {
        let t = two_by_two();
        let a = alg("[2 1 | [1 2] [2 1]]", &t);
        let y = Rda::point(a.child(0));
        let r = replace_in_algorithm(&t, &a, 0, &y).unwrap();
        assert_eq!(r, DirectionalMix::point(Class::Directional, a));
    }

    #[test]
    fn uniform_replacement_splits_in_half() {
        let t = two_by_two();
        let a = alg("[1 2 | [1 2] [2 1]]", &t);
        let y = Rda::uniform(&t.children_trees()[0]);
        let r = replace_in_algorithm(&t, &a, 0, &y).unwrap();
        assert_eq!(r.support_len(), 2);
        assert_eq!(r.prob(&alg("[1 2 | [1 2] [2 1]]", &t)), ratio(1, 2));
        assert_eq!(r.prob(&alg("[1 2 | [2 1] [2 1]]", &t)), ratio(1, 2));
        let x = DirectionalMix::point(Class::Directional, a);
        assert_eq!(replace_subalgorithm(&t, &x, 0, &y).unwrap(), r);
        assert!(check_order_invariance(&t, &x, 0, &y).unwrap().passed);
    }

    #[test]
    fn replacement_forms_agree_on_a_correlated_mix() {
        let t = two_by_two();
        let x = DirectionalMix::from_weights(
            Class::Directional,
            [
                (alg("[1 2 | [1 2] [1 2]]", &t), ratio(1, 3)),
                (alg("[1 2 | [2 1] [2 1]]", &t), ratio(1, 6)),
                (alg("[2 1 | [2 1] [1 2]]", &t), ratio(1, 2)),
            ],
        )
        .unwrap();
        let y = Rda::node(
            [(vec![0, 1], ratio(1, 4)), (vec![1, 0], ratio(3, 4))],
            vec![Rda::Leaf, Rda::Leaf],
        )
        .unwrap();
        for k in 0..2 {
            let a = replace_subalgorithm(&t, &x, k, &y).unwrap();
            let b = replace_closed_form(&t, &x, k, &y).unwrap();
            assert_eq!(a, b);
            assert!(check_order_invariance(&t, &x, k, &y).unwrap().passed);
        }
    }

    #[test]
    fn cost_decomposition_on_two_by_two() {
        let t = two_by_two();
        let algs = enumerate_directional(&t, &Limits::default()).unwrap();
        for a in &algs {
            let x = DirectionalMix::point(Class::Directional, a.clone());
            for w in t.enumerate_assignments(Filter::All).unwrap() {
                assert!(check_cost_decomposition(&t, &x, &w).unwrap().passed);
            }
        }
        let u = DirectionalMix::uniform(Class::Directional, &algs).unwrap();
        let v = check_cost_decomposition(&t, &u, &"1111".parse().unwrap()).unwrap();
        assert!(v.passed, "{v}");
        let leaf = Tree::leaf();
        let x = DirectionalMix::point(Class::Directional, DirectionalAlgorithm::Leaf);
        assert!(
            check_cost_decomposition(&leaf, &x, &"0".parse().unwrap())
                .unwrap()
                .passed
        );
    }

    #[test]
    fn sibling_masses_on_two_by_two() {
        let t = two_by_two();
        let x = DirectionalMix::from_weights(
            Class::Directional,
            [
                (alg("[1 2 | [1 2] [1 2]]", &t), ratio(1, 2)),
                (alg("[2 1 | [2 1] [2 1]]", &t), ratio(1, 2)),
            ],
        )
        .unwrap();
        let y = Rda::uniform(&t.children_trees()[0]);
        for tt in [[false, false], [false, true], [true, false], [true, true]] {
            assert!(check_sibling_masses(&t, &x, 1, 0, &y, &tt).unwrap().passed);
        }
        assert!(check_sibling_masses(&t, &x, 0, 0, &y, &[true, true]).is_err());
    }

    #[test]
    fn improvement_from_correlated_mix() {
        let t = two_by_two();
        let x = DirectionalMix::from_weights(
            Class::Directional,
            [
                (alg("[1 2 | [1 2] [1 2]]", &t), ratio(1, 2)),
                (alg("[1 2 | [2 1] [2 1]]", &t), ratio(1, 2)),
            ],
        )
        .unwrap();
        let v = check_improvement(&t, &x, &joint_parts(&t)).unwrap();
        assert!(v.passed, "{v}");
    }

    #[test]
    fn improvement_is_equality_on_the_joint_optimum() {
        let t = Tree::parse("(or (and * *) (and * * *))").unwrap();
        let joint = build_joint_optimal_rda(&t).unwrap();
        let x = joint.rda.expand(DEFAULT_EXPANSION_BOUND).unwrap();
        let v = check_improvement(&t, &x, &joint_parts(&t)).unwrap();
        assert!(v.passed, "{v}");
        let after = (0..2)
            .try_fold(x.clone(), |acc, k| {
                replace_subalgorithm(&t, &acc, k, &joint_parts(&t)[k])
            })
            .unwrap();
        assert_eq!(
            worst_cases(&t, &after).unwrap(),
            worst_cases(&t, &x).unwrap()
        );
    }

    #[test]
    fn out_of_range_child() {
        let t = two_by_two();
        let x = DirectionalMix::point(Class::Directional, DirectionalAlgorithm::identity(&t));
        assert!(matches!(
            replace_subalgorithm(&t, &x, 2, &Rda::Leaf),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }
}
